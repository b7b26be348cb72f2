#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "secvos/backends.hpp"

namespace secvos {

// JSON shapes shared with out-of-process backends. One UTF-8 JSON object per
// line; see docs/protocol.md for the full contract.
nlohmann::json rle_to_json(const RleMask& rle);
RleMask rle_from_json(const nlohmann::json& j);
nlohmann::json mask_to_json(const BinaryMask& mask);
BinaryMask mask_from_json(const nlohmann::json& j);

std::string base64_encode(const std::uint8_t* data, std::size_t size);
std::vector<std::uint8_t> base64_decode(const std::string& text);

// Byte-stream transport delivering newline-delimited messages.
class LineTransport {
public:
    virtual ~LineTransport() = default;
    virtual void send_line(const std::string& line) = 0;
    // nullopt on orderly EOF; throws TimeoutError when the deadline passes.
    virtual std::optional<std::string> recv_line(std::chrono::milliseconds timeout) = 0;
};

// Runs `/bin/sh -c command` and speaks over its stdin/stdout.
class SubprocessTransport final : public LineTransport {
public:
    explicit SubprocessTransport(const std::string& command);
    ~SubprocessTransport() override;
    SubprocessTransport(const SubprocessTransport&) = delete;
    SubprocessTransport& operator=(const SubprocessTransport&) = delete;

    void send_line(const std::string& line) override;
    std::optional<std::string> recv_line(std::chrono::milliseconds timeout) override;

private:
    int child_pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string buffer_;
};

class TcpTransport final : public LineTransport {
public:
    TcpTransport(const std::string& host, int port,
                 std::chrono::milliseconds connect_timeout);
    ~TcpTransport() override;
    TcpTransport(const TcpTransport&) = delete;
    TcpTransport& operator=(const TcpTransport&) = delete;

    void send_line(const std::string& line) override;
    std::optional<std::string> recv_line(std::chrono::milliseconds timeout) override;

private:
    int fd_ = -1;
    std::string buffer_;
};

struct WireOptions {
    std::chrono::milliseconds timeout{30000};
    // Sent in the handshake so the backend can read frames from disk.
    std::optional<std::string> frames_dir;
    // When set, frame references additionally carry base64 PNG bytes.
    std::shared_ptr<const FrameSource> embed_frames;
};

// Shared handshake/request/response mechanics of the two wire backends.
class WireClient {
public:
    WireClient(std::unique_ptr<LineTransport> transport, std::string role,
               WireOptions options);

    nlohmann::json roundtrip(nlohmann::json request_body, const char* kind);
    nlohmann::json frame_ref(int frame_index) const;
    const WireOptions& options() const { return options_; }

private:
    void handshake(const std::string& role);

    std::unique_ptr<LineTransport> transport_;
    WireOptions options_;
    std::uint64_t next_id_ = 1;
};

class WirePixelBackend final : public PixelBackend {
public:
    WirePixelBackend(std::unique_ptr<LineTransport> transport, WireOptions options = {});
    BackendResponse segment(const PixelRequest& request) override;

private:
    WireClient client_;
};

class WireConceptBackend final : public ConceptBackend {
public:
    WireConceptBackend(std::unique_ptr<LineTransport> transport, WireOptions options = {});
    BackendResponse segment(const ConceptRequest& request) override;

private:
    WireClient client_;
};

} // namespace secvos
