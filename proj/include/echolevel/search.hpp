#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "echolevel/dataset.hpp"
#include "echolevel/sirec.hpp"

namespace echolevel::search {

/// Closed integer range [lo, hi].
struct Range {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;

  bool contains(std::uint64_t v) const { return v >= lo && v <= hi; }
};

/// Sampling ranges for the stochastic search.
struct SearchSpace {
  Range segment_length{100, 500};
  Range n_estimators{10, 200};
  Range max_len{10, 200};
  Range min_len{10, 200};
  Range random_state{0, 0xFFFFFFFFull};

  /// Throws ConfigError for empty ranges, min_len below 2, or when no draw
  /// can satisfy min_len <= max_len <= segment_length.
  void validate() const;
  bool satisfiable() const;
};

struct SearchResult {
  sirec::TrainConfig config;
  double f1 = 0.0;
  std::size_t draw_index = 0;
  std::size_t rank = 0;  // 1-based

  bool operator==(const SearchResult& other) const;
};

/// Draws `budget` configs from the space up front, then fits and scores each
/// one once. Results are sorted by F1 descending, ties kept in draw order.
std::vector<SearchResult> stochastic_search(const LabeledDataset& train, const LabeledDataset& test,
                                            const SearchSpace& space, std::size_t budget, std::uint64_t meta_seed);

/// The configs stochastic_search would evaluate, in draw order.
std::vector<sirec::TrainConfig> draw_configs(const SearchSpace& space, std::size_t budget, std::uint64_t meta_seed);

/// One fit on `train` and macro-F1 on `test`.
double score_config(const LabeledDataset& train, const LabeledDataset& test, const sirec::TrainConfig& config);

/// segment_length,n_estimators,max_len,min_len,random_state,f1
std::string results_csv(const std::vector<SearchResult>& results);
std::string results_json(const std::vector<SearchResult>& results);

}  // namespace echolevel::search
