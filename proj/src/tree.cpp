#include "echolevel/tree.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "echolevel/error.hpp"

namespace echolevel::tree {

Label DecisionTree::predict(const FeatureRow& row) const {
  std::size_t index = 0;
  while (!nodes[index].is_leaf) {
    const Node& n = nodes[index];
    index = static_cast<std::size_t>(row[n.feature] <= n.threshold ? n.left : n.right);
  }
  return nodes[index].label;
}

std::size_t DecisionTree::depth() const {
  std::size_t best = 0;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [index, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    if (!nodes[index].is_leaf) {
      stack.emplace_back(static_cast<std::size_t>(nodes[index].left), d + 1);
      stack.emplace_back(static_cast<std::size_t>(nodes[index].right), d + 1);
    }
  }
  return best;
}

std::size_t DecisionTree::split_count() const {
  return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const Node& n) { return !n.is_leaf; }));
}

void DecisionTree::validate() const {
  if (nodes.empty()) throw FormatError("tree has no nodes");
  std::vector<int> seen(nodes.size(), 0);
  std::vector<std::size_t> stack{0};
  while (!stack.empty()) {
    const std::size_t index = stack.back();
    stack.pop_back();
    if (seen[index]++) throw FormatError("tree node " + std::to_string(index) + " is reachable twice");
    const Node& n = nodes[index];
    if (n.is_leaf) continue;
    if (n.feature >= features::kFeatureCount) {
      throw FormatError("tree node " + std::to_string(index) + " uses feature " + std::to_string(n.feature));
    }
    if (!std::isfinite(n.threshold)) throw FormatError("tree node " + std::to_string(index) + " has a non-finite threshold");
    for (std::int32_t child : {n.left, n.right}) {
      if (child <= 0 || static_cast<std::size_t>(child) >= nodes.size()) {
        throw FormatError("tree node " + std::to_string(index) + " links to invalid child " + std::to_string(child));
      }
      stack.push_back(static_cast<std::size_t>(child));
    }
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!seen[i]) throw FormatError("tree node " + std::to_string(i) + " is unreachable");
  }
}

namespace {

__extension__ typedef __int128 Wide;

// Split quality as the exact rational score(L) / n_L + score(R) / n_R where
// score = sum of squared class counts. Larger is purer.
struct SplitScore {
  Wide numerator = 0;
  Wide denominator = 1;

  bool better_than(const SplitScore& other) const {
    return numerator * other.denominator > other.numerator * denominator;
  }
};

SplitScore make_score(Wide sq_left, Wide n_left, Wide sq_right, Wide n_right) {
  return {sq_left * n_right + sq_right * n_left, n_left * n_right};
}

// Midpoint of (lo, hi) rounded to float, nudged so that lo <= t < hi holds.
std::optional<double> float_threshold(double lo, double hi) {
  float t = static_cast<float>(lo + (hi - lo) / 2.0);
  if (static_cast<double>(t) < lo) t = std::nextafter(t, INFINITY);
  if (static_cast<double>(t) >= hi) {
    t = std::nextafter(static_cast<float>(hi), -INFINITY);
    if (static_cast<double>(t) >= hi) t = std::nextafter(t, -INFINITY);
  }
  const double value = static_cast<double>(t);
  if (value < lo || value >= hi) return std::nullopt;
  return value;
}

class Builder {
 public:
  Builder(std::span<const FeatureRow> rows, std::span<const std::size_t> class_of, std::span<const Label> classes,
          const TreeParams& params)
      : rows_(rows), class_of_(class_of), classes_(classes), params_(params) {}

  DecisionTree build() {
    std::vector<std::size_t> all(rows_.size());
    std::iota(all.begin(), all.end(), 0);
    tree_.nodes.clear();
    grow(all, 0);
    return std::move(tree_);
  }

 private:
  struct Best {
    std::uint8_t feature = 0;
    double threshold = 0.0;
    SplitScore score;
    bool found = false;
  };

  std::size_t grow(std::vector<std::size_t>& members, std::size_t depth) {
    const std::size_t index = tree_.nodes.size();
    tree_.nodes.emplace_back();

    std::vector<std::size_t> counts(classes_.size(), 0);
    for (std::size_t m : members) ++counts[class_of_[m]];
    const std::size_t majority =
        static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    const bool pure = counts[majority] == members.size();
    const bool depth_limited = params_.max_depth && depth >= *params_.max_depth;
    const std::size_t min_leaf = std::max<std::size_t>(1, params_.min_samples_leaf);

    Best best;
    if (!pure && !depth_limited && members.size() >= 2 * min_leaf) best = find_split(members, min_leaf);

    if (!best.found) {
      tree_.nodes[index].is_leaf = true;
      tree_.nodes[index].label = classes_[majority];
      return index;
    }

    std::vector<std::size_t> left, right;
    for (std::size_t m : members) {
      (rows_[m][best.feature] <= best.threshold ? left : right).push_back(m);
    }
    members.clear();
    members.shrink_to_fit();

    const std::size_t left_index = grow(left, depth + 1);
    const std::size_t right_index = grow(right, depth + 1);
    Node& node = tree_.nodes[index];
    node.is_leaf = false;
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = static_cast<std::int32_t>(left_index);
    node.right = static_cast<std::int32_t>(right_index);
    return index;
  }

  Best find_split(const std::vector<std::size_t>& members, std::size_t min_leaf) const {
    Best best;
    const std::size_t n = members.size();
    std::vector<std::size_t> order(members);
    for (std::uint8_t f = 0; f < features::kFeatureCount; ++f) {
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return rows_[a][f] < rows_[b][f]; });

      std::vector<Wide> left_counts(classes_.size(), 0), right_counts(classes_.size(), 0);
      for (std::size_t m : order) ++right_counts[class_of_[m]];
      Wide sq_left = 0, sq_right = 0;
      for (Wide c : right_counts) sq_right += c * c;

      for (std::size_t i = 0; i + 1 < n; ++i) {
        const std::size_t c = class_of_[order[i]];
        sq_left += 2 * left_counts[c] + 1;
        ++left_counts[c];
        sq_right -= 2 * right_counts[c] - 1;
        --right_counts[c];

        const double lo = rows_[order[i]][f];
        const double hi = rows_[order[i + 1]][f];
        if (!(lo < hi)) continue;
        const std::size_t n_left = i + 1;
        if (n_left < min_leaf || n - n_left < min_leaf) continue;

        const SplitScore score = make_score(sq_left, static_cast<Wide>(n_left), sq_right, static_cast<Wide>(n - n_left));
        // Strict improvement keeps the earliest feature and lowest threshold.
        if (best.found && !score.better_than(best.score)) continue;
        const auto threshold = float_threshold(lo, hi);
        if (!threshold) continue;
        best = {f, *threshold, score, true};
      }
    }
    return best;
  }

  std::span<const FeatureRow> rows_;
  std::span<const std::size_t> class_of_;
  std::span<const Label> classes_;
  TreeParams params_;
  DecisionTree tree_;
};

}  // namespace

DecisionTree grow_tree(std::span<const FeatureRow> rows, std::span<const Label> labels, const TreeParams& params) {
  if (rows.empty()) throw TrainingError("cannot grow a tree from zero rows");
  if (rows.size() != labels.size()) throw TrainingError("feature rows and labels differ in length");
  for (const auto& row : rows) {
    for (double v : row) {
      if (!std::isfinite(v)) throw TrainingError("feature matrix contains a non-finite value");
    }
  }

  std::vector<Label> classes(labels.begin(), labels.end());
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  std::vector<std::size_t> class_of(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    class_of[i] = static_cast<std::size_t>(std::lower_bound(classes.begin(), classes.end(), labels[i]) - classes.begin());
  }
  return Builder(rows, class_of, classes, params).build();
}

}  // namespace echolevel::tree
