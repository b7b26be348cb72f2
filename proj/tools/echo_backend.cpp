// Minimal wire-protocol peer used by protocol tests and as a reference for
// implementing real backends. Answers pixel requests with the newest memory
// mask and concept requests with the anchor keyframe mask.
//
// Modes exercise engine-side error handling:
//   echo      normal behavior (default)
//   bad-ready wrong protocol version in the handshake reply
//   garbage   responds with a non-JSON line
//   wrong-id  responds with a mismatched request id
//   error     responds with an error message
//   silent    never responds to requests

#include <fstream>
#include <iostream>
#include <string>

#include <nlohmann/json.hpp>

using nlohmann::json;

namespace {

struct Options {
    std::string mode = "echo";
    std::string log_path;
};

void log_line(const Options& opts, const char* direction, const std::string& line) {
    if (opts.log_path.empty())
        return;
    std::ofstream out(opts.log_path, std::ios::app);
    out << direction << " " << line << "\n";
}

void reply(const Options& opts, const std::string& line) {
    log_line(opts, ">>", line);
    std::cout << line << "\n" << std::flush;
}

json pick_mask(const json& body, const char* kind) {
    if (std::string(kind) == "pixel")
        return body.at("window").back().at("mask");
    return body.at("keyframes").front().at("mask");
}

bool mask_empty(const json& mask) {
    const auto& runs = mask.at("runs");
    // Alternating background/object runs: any odd-position nonzero run means
    // object pixels exist.
    for (std::size_t i = 1; i < runs.size(); i += 2)
        if (runs[i].get<long long>() > 0)
            return false;
    return true;
}

} // namespace

int main(int argc, char** argv) {
    Options opts;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--mode" && i + 1 < argc)
            opts.mode = argv[++i];
        else if (arg == "--log" && i + 1 < argc)
            opts.log_path = argv[++i];
        else {
            std::cerr << "usage: echo_backend [--mode MODE] [--log FILE]\n";
            return 1;
        }
    }

    std::string line;
    bool greeted = false;
    while (std::getline(std::cin, line)) {
        log_line(opts, "<<", line);
        json message = json::parse(line, nullptr, false);
        if (message.is_discarded()) {
            reply(opts, json{{"error", "unparseable message"}}.dump());
            continue;
        }
        if (!greeted) {
            if (!message.contains("hello")) {
                reply(opts, json{{"error", "expected hello"}}.dump());
                return 2;
            }
            greeted = true;
            if (opts.mode == "bad-ready")
                reply(opts, json{{"ready", {{"proto", 99}}}}.dump());
            else
                reply(opts, json{{"ready", {{"proto", 1}}}}.dump());
            continue;
        }

        const char* kind = message.contains("pixel") ? "pixel"
                           : message.contains("concept") ? "concept"
                                                         : nullptr;
        if (!kind || !message.contains("id")) {
            reply(opts, json{{"error", "malformed request"},
                             {"id", message.value("id", 0)}}.dump());
            continue;
        }
        const auto id = message["id"].get<std::uint64_t>();

        if (opts.mode == "silent")
            continue;
        if (opts.mode == "garbage") {
            reply(opts, "this is not json");
            continue;
        }
        if (opts.mode == "error") {
            reply(opts, json{{"error", "backend refused"}, {"id", id}}.dump());
            continue;
        }

        json mask;
        try {
            mask = pick_mask(message[kind], kind);
        } catch (const json::exception&) {
            reply(opts, json{{"error", "request missing masks"}, {"id", id}}.dump());
            continue;
        }
        const bool empty = mask_empty(mask);
        json result{{"mask", mask},
                    {"presence", empty ? 0.0 : 1.0},
                    {"confidence", empty ? 0.0 : 1.0}};
        const std::uint64_t reply_id = opts.mode == "wrong-id" ? id + 1000 : id;
        reply(opts, json{{"id", reply_id}, {"result", result}}.dump());
    }
    return 0;
}
