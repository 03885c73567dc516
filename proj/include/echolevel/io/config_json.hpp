#pragma once

#include <string>
#include <string_view>

#include "echolevel/dsp.hpp"
#include "echolevel/search.hpp"
#include "echolevel/sirec.hpp"
#include "echolevel/synth.hpp"

namespace echolevel::io {

// JSON config files. Every field is optional and falls back to the default;
// unknown fields are rejected with their path.

dsp::SweepConfig parse_sweep_config(std::string_view json, const std::string& source = "<sweep config>");
synth::SceneConfig parse_scene_config(std::string_view json, const std::string& source = "<scene config>");
sirec::TrainConfig parse_train_config(std::string_view json, const std::string& source = "<train config>");
search::SearchSpace parse_search_space(std::string_view json, const std::string& source = "<search config>");

std::string to_json(const dsp::SweepConfig& cfg);
std::string to_json(const synth::SceneConfig& cfg);
std::string to_json(const sirec::TrainConfig& cfg);
std::string to_json(const search::SearchSpace& space);

dsp::SweepConfig load_sweep_config(const std::string& path);
synth::SceneConfig load_scene_config(const std::string& path);
sirec::TrainConfig load_train_config(const std::string& path);
search::SearchSpace load_search_space(const std::string& path);

}  // namespace echolevel::io
