#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "echolevel/dataset.hpp"
#include "echolevel/features.hpp"
#include "echolevel/tree.hpp"

namespace echolevel::sirec {

inline constexpr const char* kModelFormatVersion = "1.0";

struct TrainConfig {
  std::size_t n_estimators = 100;
  std::size_t segment_length = 300;
  features::IntervalBounds bounds{17, 153};
  std::uint64_t random_state = 7;
  std::optional<std::size_t> max_depth;
  std::size_t min_samples_leaf = 1;
  // Resample training rows with replacement per tree. Off by default: tree
  // diversity comes from the random intervals alone.
  bool bootstrap = false;

  void validate() const;
};

struct SirecTree {
  features::IntervalPair intervals;
  tree::DecisionTree tree;

  bool operator==(const SirecTree&) const = default;
};

/// Trained ensemble. Immutable after fit; predictions are read-only.
struct SirecModel {
  TrainConfig config;
  std::vector<Label> classes;  // ascending
  std::vector<SirecTree> trees;

  /// Per-tree votes for one RIR (its first segment_length samples are used).
  std::vector<Label> tree_votes(std::span<const double> rir) const;

  /// Plurality vote; ties go to the smallest label.
  Label predict(std::span<const double> rir) const;

  std::vector<Label> predict(const LabeledDataset& dataset) const;

  /// Throws FormatError when trees, intervals or labels are inconsistent.
  void validate() const;

  /// Compares everything that affects predictions plus the serialized config.
  bool same_content(const SirecModel& other) const;
};

/// Features of every row for one interval pair.
std::vector<tree::FeatureRow> feature_matrix(const LabeledDataset& dataset, const features::IntervalPair& pair,
                                             std::size_t segment_length);

SirecModel fit(const LabeledDataset& dataset, const TrainConfig& config);

/// Label with the highest count, smallest label among ties. `classes` must be
/// ascending; votes outside it are ignored.
Label plurality_vote(std::span<const Label> votes, std::span<const Label> classes);

/// Versioned JSON model file.
std::string serialize(const SirecModel& model);
SirecModel deserialize(std::string_view text);

/// Self-contained, allocation-free C++ source implementing the model's
/// feature extraction and vote. Entry point:
///   int32_t sirec_model::predict(const float* rir);   // segment_length samples
std::string export_portable_source(const SirecModel& model);

}  // namespace echolevel::sirec
