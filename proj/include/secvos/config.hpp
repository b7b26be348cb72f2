#pragma once

#include <string>

#include "secvos/pipeline.hpp"

namespace secvos {

// Applies fields from a JSON or flat TOML config file onto `config`.
// Recognized keys mirror the TrackerConfig fields (scene_threshold, h_bins,
// s_bins, memory_window, keyframe_capacity, diversity_threshold,
// confidence_threshold, mode, force_concept_every_frame,
// reset_memory_on_disagreement, reset_iou_threshold). Unknown keys fail.
void apply_config_file(TrackerConfig& config, const std::string& path);

} // namespace secvos
