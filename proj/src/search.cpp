#include "echolevel/search.hpp"

#include <algorithm>
#include <cstdio>
#include <json.hpp>
#include <sstream>
#include <tuple>

#include "echolevel/error.hpp"
#include "echolevel/evaluation.hpp"
#include "echolevel/random.hpp"

namespace echolevel::search {

namespace {

// Give up after this many rejected draws in a row; a satisfiable space with
// a vanishing acceptance rate is still reported instead of spinning.
constexpr std::size_t kMaxRejections = 1'000'000;

void check_range(const Range& r, const char* name) {
  if (r.lo > r.hi) {
    throw ConfigError(std::string("search range ") + name + " is empty (" + std::to_string(r.lo) + " > " +
                      std::to_string(r.hi) + ")");
  }
}

}  // namespace

bool SearchResult::operator==(const SearchResult& other) const {
  const auto key = [](const SearchResult& r) {
    return std::tuple(r.config.segment_length, r.config.n_estimators, r.config.bounds.min_len, r.config.bounds.max_len,
                      r.config.random_state, r.f1, r.draw_index, r.rank);
  };
  return key(*this) == key(other);
}

bool SearchSpace::satisfiable() const {
  if (segment_length.lo > segment_length.hi || n_estimators.lo > n_estimators.hi || max_len.lo > max_len.hi ||
      min_len.lo > min_len.hi || random_state.lo > random_state.hi) {
    return false;
  }
  if (n_estimators.lo < 1) return false;
  // Smallest feasible min_len must fit under some max_len that fits under
  // some segment length.
  const std::uint64_t min_len_floor = std::max<std::uint64_t>(min_len.lo, 2);
  if (min_len_floor > min_len.hi) return false;
  const std::uint64_t max_len_floor = std::max(max_len.lo, min_len_floor);
  if (max_len_floor > max_len.hi) return false;
  return max_len_floor <= segment_length.hi;
}

void SearchSpace::validate() const {
  check_range(segment_length, "segment_length");
  check_range(n_estimators, "n_estimators");
  check_range(max_len, "max_len");
  check_range(min_len, "min_len");
  check_range(random_state, "random_state");
  if (n_estimators.lo < 1) throw ConfigError("search range n_estimators must start at 1 or more");
  if (!satisfiable()) {
    throw ConfigError("search space is unsatisfiable: no draw meets 2 <= min_len <= max_len <= segment_length");
  }
}

std::vector<sirec::TrainConfig> draw_configs(const SearchSpace& space, std::size_t budget, std::uint64_t meta_seed) {
  space.validate();
  if (budget < 1) throw ConfigError("search budget must be at least 1");
  Rng rng(meta_seed);
  std::vector<sirec::TrainConfig> configs;
  configs.reserve(budget);
  std::size_t rejected = 0;
  while (configs.size() < budget) {
    sirec::TrainConfig c;
    c.segment_length = rng.uniform_int(space.segment_length.lo, space.segment_length.hi);
    c.n_estimators = rng.uniform_int(space.n_estimators.lo, space.n_estimators.hi);
    c.bounds.max_len = rng.uniform_int(space.max_len.lo, space.max_len.hi);
    c.bounds.min_len = rng.uniform_int(space.min_len.lo, space.min_len.hi);
    c.random_state = rng.uniform_int(space.random_state.lo, space.random_state.hi);
    if (c.bounds.min_len < 2 || c.bounds.min_len > c.bounds.max_len || c.bounds.max_len > c.segment_length) {
      if (++rejected > kMaxRejections) {
        throw ConfigError("search space acceptance rate is too low: " + std::to_string(kMaxRejections) +
                          " consecutive draws violated min_len <= max_len <= segment_length");
      }
      continue;
    }
    rejected = 0;
    configs.push_back(c);
  }
  return configs;
}

double score_config(const LabeledDataset& train, const LabeledDataset& test, const sirec::TrainConfig& config) {
  const sirec::SirecModel model = sirec::fit(train, config);
  return evaluation::f1_macro(test.labels(), model.predict(test));
}

std::vector<SearchResult> stochastic_search(const LabeledDataset& train, const LabeledDataset& test,
                                            const SearchSpace& space, std::size_t budget, std::uint64_t meta_seed) {
  const std::size_t shortest = std::min(train.min_row_length(), test.min_row_length());
  if (shortest < space.segment_length.hi) {
    throw InputError("dataset rows have " + std::to_string(shortest) +
                     " samples, shorter than the largest segment_length in the search space (" +
                     std::to_string(space.segment_length.hi) + ")");
  }
  const auto configs = draw_configs(space, budget, meta_seed);
  std::vector<SearchResult> results;
  results.reserve(configs.size());
  for (std::size_t i = 0; i < configs.size(); ++i) {
    results.push_back({configs[i], score_config(train, test, configs[i]), i, 0});
  }
  std::stable_sort(results.begin(), results.end(),
                   [](const SearchResult& a, const SearchResult& b) { return a.f1 > b.f1; });
  for (std::size_t i = 0; i < results.size(); ++i) results[i].rank = i + 1;
  return results;
}

std::string results_csv(const std::vector<SearchResult>& results) {
  std::ostringstream out;
  out << "segment_length,n_estimators,max_len,min_len,random_state,f1\n";
  char f1[40];
  for (const auto& r : results) {
    std::snprintf(f1, sizeof f1, "%.17g", r.f1);
    out << r.config.segment_length << ',' << r.config.n_estimators << ',' << r.config.bounds.max_len << ','
        << r.config.bounds.min_len << ',' << r.config.random_state << ',' << f1 << '\n';
  }
  return out.str();
}

std::string results_json(const std::vector<SearchResult>& results) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    doc.push_back({{"rank", r.rank},
                   {"draw_index", r.draw_index},
                   {"segment_length", r.config.segment_length},
                   {"n_estimators", r.config.n_estimators},
                   {"max_len", r.config.bounds.max_len},
                   {"min_len", r.config.bounds.min_len},
                   {"random_state", r.config.random_state},
                   {"f1", r.f1}});
  }
  return doc.dump(2) + "\n";
}

}  // namespace echolevel::search
