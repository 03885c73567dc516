#pragma once

#include <map>
#include <utility>

#include "echolevel/synth.hpp"

namespace fixture {

// Default synthetic scene, generated once per test binary.
inline const std::pair<echolevel::LabeledDataset, echolevel::LabeledDataset>& scene_data() {
  static const auto data = echolevel::synth::generate_train_test(echolevel::synth::SceneConfig{}, 7);
  return data;
}

// A small balanced subset: the first `per_class` rows of every class.
inline echolevel::LabeledDataset subset(const echolevel::LabeledDataset& ds, std::size_t per_class) {
  echolevel::LabeledDataset out = ds;
  out.rows.clear();
  std::map<echolevel::Label, std::size_t> taken;
  for (const auto& row : ds.rows) {
    if (taken[row.label]++ < per_class) out.rows.push_back(row);
  }
  return out;
}

}  // namespace fixture
