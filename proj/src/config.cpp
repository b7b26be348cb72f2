#include "secvos/config.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace secvos {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos)
        return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

// Flat TOML subset: comments, [sections] (ignored), key = value with
// numbers, booleans, and quoted strings.
json parse_toml_subset(std::istream& in) {
    json out = json::object();
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty() || line.front() == '[')
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config: expected key = value, got: " + line);
        const std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (value.empty())
            throw ValidationError("config: missing value for " + key);
        if (value.front() == '"' && value.back() == '"' && value.size() >= 2) {
            out[key] = value.substr(1, value.size() - 2);
        } else if (value == "true" || value == "false") {
            out[key] = value == "true";
        } else {
            try {
                if (value.find_first_of(".eE") != std::string::npos)
                    out[key] = std::stod(value);
                else
                    out[key] = std::stoll(value);
            } catch (const std::exception&) {
                throw ValidationError("config: cannot parse value for " + key);
            }
        }
    }
    return out;
}

} // namespace

void apply_config_file(TrackerConfig& config, const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw MissingFileError("cannot open config " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();

    json j;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        j = json::parse(text, nullptr, false);
        if (j.is_discarded())
            throw ValidationError("config: invalid JSON in " + path);
    } else {
        std::istringstream stream(text);
        j = parse_toml_subset(stream);
    }

    for (const auto& [key, value] : j.items()) {
        if (key == "scene_threshold")
            config.scene_threshold = value.get<double>();
        else if (key == "h_bins")
            config.h_bins = value.get<int>();
        else if (key == "s_bins")
            config.s_bins = value.get<int>();
        else if (key == "memory_window")
            config.memory_window = value.get<std::size_t>();
        else if (key == "keyframe_capacity")
            config.keyframe_capacity = value.get<std::size_t>();
        else if (key == "diversity_threshold")
            config.diversity_threshold = value.get<double>();
        else if (key == "confidence_threshold")
            config.confidence_threshold = value.get<double>();
        else if (key == "mode") {
            const std::string mode = value.get<std::string>();
            if (mode == "online")
                config.mode = TrackerConfig::Mode::kOnline;
            else if (mode == "offline")
                config.mode = TrackerConfig::Mode::kOffline;
            else
                throw ValidationError("config: mode must be online or offline");
        } else if (key == "keep_going")
            config.keep_going = value.get<bool>();
        else if (key == "force_concept_every_frame")
            config.force_concept_every_frame = value.get<bool>();
        else if (key == "reset_memory_on_disagreement")
            config.reset_memory_on_disagreement = value.get<bool>();
        else if (key == "reset_iou_threshold")
            config.reset_iou_threshold = value.get<double>();
        else
            throw ValidationError("config: unknown key " + key);
    }
}

} // namespace secvos
