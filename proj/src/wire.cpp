#include "secvos/wire.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>

#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include "secvos/image_io.hpp"

namespace secvos {

using nlohmann::json;

json rle_to_json(const RleMask& rle) {
    return json{{"w", rle.width}, {"h", rle.height}, {"runs", rle.runs}};
}

RleMask rle_from_json(const json& j) {
    if (!j.is_object() || !j.contains("w") || !j.contains("h") || !j.contains("runs") ||
        !j["w"].is_number_integer() || !j["h"].is_number_integer() ||
        !j["runs"].is_array())
        throw ProtocolViolationError("malformed RLE mask object");
    RleMask rle;
    rle.width = j["w"].get<int>();
    rle.height = j["h"].get<int>();
    for (const auto& r : j["runs"]) {
        if (!r.is_number_integer())
            throw ProtocolViolationError("non-integer run length");
        rle.runs.push_back(r.get<std::int64_t>());
    }
    return rle;
}

json mask_to_json(const BinaryMask& mask) { return rle_to_json(rle_encode(mask)); }

BinaryMask mask_from_json(const json& j) {
    try {
        return rle_decode(rle_from_json(j));
    } catch (const MalformedRleError& e) {
        throw ProtocolViolationError(std::string("bad mask payload: ") + e.what());
    }
}

namespace {

constexpr char kB64Alphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

} // namespace

std::string base64_encode(const std::uint8_t* data, std::size_t size) {
    std::string out;
    out.reserve((size + 2) / 3 * 4);
    for (std::size_t i = 0; i < size; i += 3) {
        std::uint32_t v = static_cast<std::uint32_t>(data[i]) << 16;
        if (i + 1 < size)
            v |= static_cast<std::uint32_t>(data[i + 1]) << 8;
        if (i + 2 < size)
            v |= data[i + 2];
        out.push_back(kB64Alphabet[(v >> 18) & 63]);
        out.push_back(kB64Alphabet[(v >> 12) & 63]);
        out.push_back(i + 1 < size ? kB64Alphabet[(v >> 6) & 63] : '=');
        out.push_back(i + 2 < size ? kB64Alphabet[v & 63] : '=');
    }
    return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
    auto value = [](char c) -> int {
        if (c >= 'A' && c <= 'Z') return c - 'A';
        if (c >= 'a' && c <= 'z') return c - 'a' + 26;
        if (c >= '0' && c <= '9') return c - '0' + 52;
        if (c == '+') return 62;
        if (c == '/') return 63;
        return -1;
    };
    std::vector<std::uint8_t> out;
    std::uint32_t acc = 0;
    int bits = 0;
    for (char c : text) {
        if (c == '=')
            break;
        const int v = value(c);
        if (v < 0)
            throw ProtocolViolationError("invalid base64 payload");
        acc = (acc << 6) | static_cast<std::uint32_t>(v);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<std::uint8_t>((acc >> bits) & 0xff));
        }
    }
    return out;
}

namespace {

void ignore_sigpipe_once() {
    static const bool done = [] {
        std::signal(SIGPIPE, SIG_IGN);
        return true;
    }();
    (void)done;
}

void write_all(int fd, const char* data, std::size_t size) {
    std::size_t off = 0;
    while (off < size) {
        const ssize_t n = ::write(fd, data + off, size - off);
        if (n < 0) {
            if (errno == EINTR)
                continue;
            throw BackendUnavailableError(std::string("write to backend failed: ") +
                                          std::strerror(errno));
        }
        off += static_cast<std::size_t>(n);
    }
}

// Pulls one '\n'-terminated line out of buffer/fd; nullopt on EOF.
std::optional<std::string> read_line_fd(int fd, std::string& buffer,
                                        std::chrono::milliseconds timeout) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    for (;;) {
        const auto pos = buffer.find('\n');
        if (pos != std::string::npos) {
            std::string line = buffer.substr(0, pos);
            buffer.erase(0, pos + 1);
            return line;
        }
        const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
            deadline - std::chrono::steady_clock::now());
        if (remaining.count() <= 0)
            throw TimeoutError("backend did not answer in time");
        pollfd pfd{fd, POLLIN, 0};
        const int pr = ::poll(&pfd, 1, static_cast<int>(remaining.count()));
        if (pr < 0) {
            if (errno == EINTR)
                continue;
            throw BackendUnavailableError(std::string("poll failed: ") +
                                          std::strerror(errno));
        }
        if (pr == 0)
            throw TimeoutError("backend did not answer in time");
        char chunk[4096];
        const ssize_t n = ::read(fd, chunk, sizeof chunk);
        if (n < 0) {
            if (errno == EINTR)
                continue;
            throw BackendUnavailableError(std::string("read from backend failed: ") +
                                          std::strerror(errno));
        }
        if (n == 0) {
            if (!buffer.empty()) {
                std::string line = std::move(buffer);
                buffer.clear();
                return line;
            }
            return std::nullopt;
        }
        buffer.append(chunk, static_cast<std::size_t>(n));
    }
}

} // namespace

SubprocessTransport::SubprocessTransport(const std::string& command) {
    ignore_sigpipe_once();
    int in_pipe[2];  // engine -> child
    int out_pipe[2]; // child -> engine
    if (::pipe(in_pipe) != 0 || ::pipe(out_pipe) != 0)
        throw BackendUnavailableError("pipe() failed");
    const pid_t pid = ::fork();
    if (pid < 0)
        throw BackendUnavailableError("fork() failed");
    if (pid == 0) {
        ::dup2(in_pipe[0], STDIN_FILENO);
        ::dup2(out_pipe[1], STDOUT_FILENO);
        ::close(in_pipe[0]);
        ::close(in_pipe[1]);
        ::close(out_pipe[0]);
        ::close(out_pipe[1]);
        ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    child_pid_ = pid;
    to_child_ = in_pipe[1];
    from_child_ = out_pipe[0];
}

SubprocessTransport::~SubprocessTransport() {
    if (to_child_ >= 0)
        ::close(to_child_);
    if (from_child_ >= 0)
        ::close(from_child_);
    if (child_pid_ > 0) {
        int status = 0;
        for (int i = 0; i < 50; ++i) {
            if (::waitpid(child_pid_, &status, WNOHANG) != 0)
                return;
            ::usleep(10000);
        }
        ::kill(child_pid_, SIGKILL);
        ::waitpid(child_pid_, &status, 0);
    }
}

void SubprocessTransport::send_line(const std::string& line) {
    write_all(to_child_, line.data(), line.size());
    write_all(to_child_, "\n", 1);
}

std::optional<std::string> SubprocessTransport::recv_line(
    std::chrono::milliseconds timeout) {
    return read_line_fd(from_child_, buffer_, timeout);
}

TcpTransport::TcpTransport(const std::string& host, int port,
                           std::chrono::milliseconds connect_timeout) {
    ignore_sigpipe_once();
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    const std::string service = std::to_string(port);
    if (::getaddrinfo(host.c_str(), service.c_str(), &hints, &res) != 0 || !res)
        throw BackendUnavailableError("cannot resolve " + host);
    int fd = -1;
    for (addrinfo* ai = res; ai; ai = ai->ai_next) {
        fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
        if (fd < 0)
            continue;
        const int flags = ::fcntl(fd, F_GETFL, 0);
        ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);
        if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0)
            break;
        if (errno == EINPROGRESS) {
            pollfd pfd{fd, POLLOUT, 0};
            if (::poll(&pfd, 1, static_cast<int>(connect_timeout.count())) == 1) {
                int err = 0;
                socklen_t len = sizeof err;
                ::getsockopt(fd, SOL_SOCKET, SO_ERROR, &err, &len);
                if (err == 0)
                    break;
            }
        }
        ::close(fd);
        fd = -1;
    }
    ::freeaddrinfo(res);
    if (fd < 0)
        throw BackendUnavailableError("cannot connect to " + host + ":" + service);
    const int flags = ::fcntl(fd, F_GETFL, 0);
    ::fcntl(fd, F_SETFL, flags & ~O_NONBLOCK);
    fd_ = fd;
}

TcpTransport::~TcpTransport() {
    if (fd_ >= 0)
        ::close(fd_);
}

void TcpTransport::send_line(const std::string& line) {
    std::string framed = line;
    framed.push_back('\n');
    std::size_t off = 0;
    while (off < framed.size()) {
        const ssize_t n =
            ::send(fd_, framed.data() + off, framed.size() - off, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR)
                continue;
            throw BackendUnavailableError(std::string("send to backend failed: ") +
                                          std::strerror(errno));
        }
        off += static_cast<std::size_t>(n);
    }
}

std::optional<std::string> TcpTransport::recv_line(std::chrono::milliseconds timeout) {
    return read_line_fd(fd_, buffer_, timeout);
}

WireClient::WireClient(std::unique_ptr<LineTransport> transport, std::string role,
                       WireOptions options)
    : transport_(std::move(transport)), options_(std::move(options)) {
    handshake(role);
}

void WireClient::handshake(const std::string& role) {
    json hello{{"proto", 1}, {"role", role}};
    if (options_.frames_dir)
        hello["frames_dir"] = *options_.frames_dir;
    transport_->send_line(json{{"hello", hello}}.dump());
    const auto line = transport_->recv_line(options_.timeout);
    if (!line)
        throw BackendUnavailableError("backend closed the stream during handshake");
    json reply = json::parse(*line, nullptr, false);
    if (reply.is_discarded() || !reply.is_object() || !reply.contains("ready") ||
        !reply["ready"].is_object() || reply["ready"].value("proto", -1) != 1)
        throw ProtocolViolationError("bad handshake reply: " + *line);
}

json WireClient::frame_ref(int frame_index) const {
    json ref{{"frame_index", frame_index}};
    if (options_.embed_frames) {
        const std::vector<std::uint8_t> png =
            encode_png_rgb(options_.embed_frames->frame(frame_index));
        ref["png_b64"] = base64_encode(png.data(), png.size());
    }
    return ref;
}

json WireClient::roundtrip(json request_body, const char* kind) {
    const std::uint64_t id = next_id_++;
    json request{{"id", id}, {kind, std::move(request_body)}};
    transport_->send_line(request.dump());

    const auto line = transport_->recv_line(options_.timeout);
    if (!line)
        throw BackendUnavailableError("backend closed the stream mid-request");
    json reply = json::parse(*line, nullptr, false);
    if (reply.is_discarded() || !reply.is_object())
        throw ProtocolViolationError("response is not a JSON object: " + *line);
    if (reply.value("id", std::uint64_t{0}) != id)
        throw ProtocolViolationError("response id does not match request");
    if (reply.contains("error"))
        throw BackendError("backend error: " +
                           reply["error"].get_ref<const std::string&>());
    if (!reply.contains("result") || !reply["result"].is_object())
        throw ProtocolViolationError("response carries no result object");
    return reply["result"];
}

namespace {

json window_to_json(const WireClient& client, const std::vector<MemoryWindowItem>& window) {
    json out = json::array();
    for (const MemoryWindowItem& item : window)
        out.push_back(json{{"frame", client.frame_ref(item.frame_index)},
                           {"mask", mask_to_json(item.mask)},
                           {"presence", item.presence_score},
                           {"offset", item.offset}});
    return out;
}

SegmentationRecord record_from_result(const json& result, int frame_index, int object_id) {
    if (!result.contains("mask") || !result.contains("presence") ||
        !result.contains("confidence") || !result["presence"].is_number() ||
        !result["confidence"].is_number())
        throw ProtocolViolationError("result missing mask/presence/confidence");
    SegmentationRecord rec;
    rec.frame_index = frame_index;
    rec.object_id = object_id;
    rec.mask = mask_from_json(result["mask"]);
    rec.presence_score = result["presence"].get<double>();
    rec.confidence = result["confidence"].get<double>();
    return rec;
}

} // namespace

WirePixelBackend::WirePixelBackend(std::unique_ptr<LineTransport> transport,
                                   WireOptions options)
    : client_(std::move(transport), "pixel", std::move(options)) {}

BackendResponse WirePixelBackend::segment(const PixelRequest& request) {
    json body{{"frame", client_.frame_ref(request.frame_index)},
              {"object_id", request.object_id},
              {"window", window_to_json(client_, request.window)}};
    const json result = client_.roundtrip(std::move(body), "pixel");
    return {record_from_result(result, request.frame_index, request.object_id)};
}

WireConceptBackend::WireConceptBackend(std::unique_ptr<LineTransport> transport,
                                       WireOptions options)
    : client_(std::move(transport), "concept", std::move(options)) {}

BackendResponse WireConceptBackend::segment(const ConceptRequest& request) {
    json keyframes = json::array();
    for (const KeyframeItem& kf : request.keyframes)
        keyframes.push_back(json{{"frame", client_.frame_ref(kf.frame_index)},
                                 {"mask", mask_to_json(kf.mask)}});
    json body{{"frame", client_.frame_ref(request.frame_index)},
              {"object_id", request.object_id},
              {"keyframes", std::move(keyframes)},
              {"window", window_to_json(client_, request.window)}};
    const json result = client_.roundtrip(std::move(body), "concept");
    return {record_from_result(result, request.frame_index, request.object_id)};
}

} // namespace secvos
