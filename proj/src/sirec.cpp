#include "echolevel/sirec.hpp"

#include <algorithm>
#include <iostream>
#include <map>
#include <string>

#include "echolevel/error.hpp"
#include "echolevel/random.hpp"

namespace echolevel::sirec {

void TrainConfig::validate() const {
  if (n_estimators < 1) throw ConfigError("n_estimators must be at least 1");
  if (segment_length < 2) throw ConfigError("segment_length must be at least 2");
  bounds.validate(segment_length);
  if (max_depth && *max_depth < 1) throw ConfigError("max_depth must be at least 1 when set");
  if (min_samples_leaf < 1) throw ConfigError("min_samples_leaf must be at least 1");
}

std::vector<tree::FeatureRow> feature_matrix(const LabeledDataset& dataset, const features::IntervalPair& pair,
                                             std::size_t segment_length) {
  std::vector<tree::FeatureRow> out;
  out.reserve(dataset.rows.size());
  for (const auto& row : dataset.rows) {
    const std::span<const double> segment(row.rir.data(), segment_length);
    out.push_back(features::extract_features(segment, pair).as_array());
  }
  return out;
}

Label plurality_vote(std::span<const Label> votes, std::span<const Label> classes) {
  if (classes.empty()) throw InputError("plurality vote over an empty class set");
  std::vector<std::size_t> counts(classes.size(), 0);
  for (Label v : votes) {
    auto it = std::lower_bound(classes.begin(), classes.end(), v);
    if (it != classes.end() && *it == v) ++counts[static_cast<std::size_t>(it - classes.begin())];
  }
  // max_element returns the first maximum, i.e. the smallest label.
  return classes[static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin())];
}

SirecModel fit(const LabeledDataset& dataset, const TrainConfig& config) {
  config.validate();
  if (dataset.rows.empty()) throw TrainingError("training dataset is empty");
  dataset.require_segment(config.segment_length);

  SirecModel model;
  model.config = config;
  model.classes = dataset.classes();
  const auto labels = dataset.labels();
  {
    std::vector<Label> present = labels;
    std::sort(present.begin(), present.end());
    present.erase(std::unique(present.begin(), present.end()), present.end());
    if (present.size() < 2) throw TrainingError("training needs at least 2 distinct classes");
    if (present.size() < model.classes.size()) {
      std::cerr << "warning: " << model.classes.size() - present.size()
                << " declared class(es) have no training rows\n";
    }
  }

  const tree::TreeParams params{config.max_depth, config.min_samples_leaf};
  model.trees.reserve(config.n_estimators);
  for (std::size_t i = 0; i < config.n_estimators; ++i) {
    Rng rng(derive_seed(config.random_state, i));
    SirecTree member;
    member.intervals = features::sample_interval_pair(rng, config.segment_length, config.bounds);
    auto matrix = feature_matrix(dataset, member.intervals, config.segment_length);
    if (config.bootstrap) {
      std::vector<tree::FeatureRow> sampled_rows;
      std::vector<Label> sampled_labels;
      for (std::size_t r = 0; r < matrix.size(); ++r) {
        const auto pick = static_cast<std::size_t>(rng.uniform_int(0, matrix.size() - 1));
        sampled_rows.push_back(matrix[pick]);
        sampled_labels.push_back(labels[pick]);
      }
      member.tree = tree::grow_tree(sampled_rows, sampled_labels, params);
    } else {
      member.tree = tree::grow_tree(matrix, labels, params);
    }
    model.trees.push_back(std::move(member));
  }
  return model;
}

std::vector<Label> SirecModel::tree_votes(std::span<const double> rir) const {
  if (rir.size() < config.segment_length) {
    throw InputError("rir has " + std::to_string(rir.size()) + " samples, model needs segment_length " +
                     std::to_string(config.segment_length));
  }
  const auto segment = rir.subspan(0, config.segment_length);
  std::vector<Label> votes;
  votes.reserve(trees.size());
  for (const auto& member : trees) {
    votes.push_back(member.tree.predict(features::extract_features(segment, member.intervals).as_array()));
  }
  return votes;
}

Label SirecModel::predict(std::span<const double> rir) const { return plurality_vote(tree_votes(rir), classes); }

std::vector<Label> SirecModel::predict(const LabeledDataset& dataset) const {
  std::vector<Label> out;
  out.reserve(dataset.rows.size());
  for (const auto& row : dataset.rows) out.push_back(predict(row.rir));
  return out;
}

void SirecModel::validate() const {
  config.validate();
  if (trees.size() != config.n_estimators) {
    throw FormatError("model has " + std::to_string(trees.size()) + " trees but n_estimators is " +
                      std::to_string(config.n_estimators));
  }
  if (classes.empty()) throw FormatError("model has no classes");
  if (!std::is_sorted(classes.begin(), classes.end()) ||
      std::adjacent_find(classes.begin(), classes.end()) != classes.end()) {
    throw FormatError("model classes must be strictly ascending");
  }
  for (std::size_t i = 0; i < trees.size(); ++i) {
    const auto& member = trees[i];
    if (!member.intervals.fits(config.segment_length)) {
      throw FormatError("tree " + std::to_string(i) + " interval does not fit segment_length");
    }
    if (member.intervals.length < config.bounds.min_len || member.intervals.length > config.bounds.max_len) {
      throw FormatError("tree " + std::to_string(i) + " interval length is outside [min_len, max_len]");
    }
    try {
      member.tree.validate();
    } catch (const FormatError& e) {
      throw FormatError("tree " + std::to_string(i) + ": " + e.what());
    }
    for (const auto& node : member.tree.nodes) {
      if (node.is_leaf && !std::binary_search(classes.begin(), classes.end(), node.label)) {
        throw FormatError("tree " + std::to_string(i) + " predicts label " + std::to_string(node.label) +
                          " which is not in classes");
      }
    }
  }
}

bool SirecModel::same_content(const SirecModel& other) const {
  return config.n_estimators == other.config.n_estimators && config.segment_length == other.config.segment_length &&
         config.bounds.min_len == other.config.bounds.min_len && config.bounds.max_len == other.config.bounds.max_len &&
         config.random_state == other.config.random_state && classes == other.classes && trees == other.trees;
}

}  // namespace echolevel::sirec
