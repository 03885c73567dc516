#include <doctest.h>

#include <algorithm>
#include <json.hpp>

#include "echolevel/error.hpp"
#include "echolevel/search.hpp"
#include "fixtures.hpp"

using namespace echolevel;
using namespace echolevel::search;

namespace {

SearchSpace small_space() {
  SearchSpace s;
  s.segment_length = {100, 300};
  s.n_estimators = {5, 15};
  s.max_len = {20, 150};
  s.min_len = {10, 60};
  return s;
}

}  // namespace

TEST_CASE("drawn configs satisfy the constraints and are reproducible") {
  const auto space = small_space();
  const auto a = draw_configs(space, 500, 3);
  const auto b = draw_configs(space, 500, 3);
  REQUIRE(a.size() == 500);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& c = a[i];
    CHECK(space.segment_length.contains(c.segment_length));
    CHECK(space.n_estimators.contains(c.n_estimators));
    CHECK(space.max_len.contains(c.bounds.max_len));
    CHECK(space.min_len.contains(c.bounds.min_len));
    CHECK(c.bounds.min_len >= 2);
    CHECK(c.bounds.min_len <= c.bounds.max_len);
    CHECK(c.bounds.max_len <= c.segment_length);
    CHECK(c.segment_length == b[i].segment_length);
    CHECK(c.random_state == b[i].random_state);
    differs |= c.random_state != draw_configs(space, 500, 4)[i].random_state;
  }
  CHECK(differs);
  // A smaller budget draws a prefix of the same sequence.
  const auto prefix = draw_configs(space, 10, 3);
  for (std::size_t i = 0; i < 10; ++i) CHECK(prefix[i].random_state == a[i].random_state);
}

TEST_CASE("unsatisfiable or invalid spaces are rejected") {
  SearchSpace s = small_space();
  s.min_len = {400, 500};
  CHECK_FALSE(s.satisfiable());
  CHECK_THROWS_AS(s.validate(), ConfigError);
  CHECK_THROWS_AS(draw_configs(s, 1, 0), ConfigError);
  s = small_space();
  s.n_estimators = {10, 5};
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = small_space();
  s.min_len = {1, 1};
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = small_space();
  s.n_estimators = {0, 3};
  CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("search on the synthetic scene") {
  const auto& [train_full, test_full] = fixture::scene_data();
  const auto train = fixture::subset(train_full, 40);
  const auto test = fixture::subset(test_full, 20);
  const auto space = small_space();

  SUBCASE("budget one equals a direct fit") {
    const auto results = stochastic_search(train, test, space, 1, 11);
    REQUIRE(results.size() == 1);
    const auto config = draw_configs(space, 1, 11)[0];
    CHECK(results[0].f1 == score_config(train, test, config));
    CHECK(results[0].rank == 1);
    CHECK(results[0].draw_index == 0);
  }

  SUBCASE("results are sorted, ranked and reproducible") {
    const auto a = stochastic_search(train, test, space, 6, 2);
    const auto b = stochastic_search(train, test, space, 6, 2);
    CHECK(a == b);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].rank == i + 1);
      if (i > 0) {
        CHECK(a[i - 1].f1 >= a[i].f1);
        if (a[i - 1].f1 == a[i].f1) CHECK(a[i - 1].draw_index < a[i].draw_index);
      }
    }
    // Re-running the winning config reproduces its score.
    CHECK(score_config(train, test, a[0].config) == a[0].f1);

    const auto csv = results_csv(a);
    CHECK(csv.rfind("segment_length,n_estimators,max_len,min_len,random_state,f1\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
    const auto doc = nlohmann::json::parse(results_json(a));
    CHECK(doc.size() == 6);
    CHECK(doc[0]["rank"] == 1);
  }

  SUBCASE("rows shorter than the largest segment are rejected") {
    SearchSpace wide = space;
    wide.segment_length = {100, 600};
    CHECK_THROWS_AS(stochastic_search(train, test, wide, 1, 0), InputError);
  }
}
