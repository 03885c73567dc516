#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "echolevel/features.hpp"

namespace echolevel::tree {

using Label = std::int64_t;
using FeatureRow = std::array<double, features::kFeatureCount>;

/// Flat binary-tree node. Split nodes send `value <= threshold` left.
struct Node {
  bool is_leaf = true;
  std::uint8_t feature = 0;
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  Label label = 0;

  bool operator==(const Node&) const = default;
};

struct DecisionTree {
  std::vector<Node> nodes;  // nodes[0] is the root

  Label predict(const FeatureRow& row) const;
  std::size_t depth() const;
  std::size_t split_count() const;

  /// Throws FormatError if child links are out of range, form a cycle, share
  /// nodes, or leave nodes unreachable.
  void validate() const;

  bool operator==(const DecisionTree&) const = default;
};

struct TreeParams {
  std::optional<std::size_t> max_depth;
  std::size_t min_samples_leaf = 1;
};

/// CART with Gini impurity over all features. Candidate thresholds are the
/// midpoints of consecutive distinct sorted values, rounded to the nearest
/// 32-bit float that still separates them. Ties between equally good splits
/// go to the lowest feature index, then the lowest threshold. Leaves predict
/// the majority label, ties to the smallest label.
DecisionTree grow_tree(std::span<const FeatureRow> rows, std::span<const Label> labels,
                       const TreeParams& params = {});

}  // namespace echolevel::tree
