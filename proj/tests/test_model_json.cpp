#include <doctest.h>

#include <random>
#include <string>

#include "echolevel/error.hpp"
#include "echolevel/sirec.hpp"

using namespace echolevel;
using namespace echolevel::sirec;

namespace {

SirecModel trained_model() {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> noise(0.0, 0.3);
  LabeledDataset ds;
  for (Label label : {0, 25, 50}) {
    for (int r = 0; r < 15; ++r) {
      LabeledRow row;
      row.label = label;
      for (int i = 0; i < 80; ++i) row.rir.push_back(static_cast<double>(label) * 0.001 * i + noise(gen));
      ds.rows.push_back(row);
    }
  }
  TrainConfig c;
  c.n_estimators = 9;
  c.segment_length = 80;
  c.bounds = {10, 60};
  c.random_state = 12345678901ULL;
  return fit(ds, c);
}

std::string expect_format_error(const std::string& text) {
  try {
    deserialize(text);
  } catch (const FormatError& e) {
    return e.what();
  }
  FAIL("no FormatError for input");
  return {};
}

const char* kOneTree = R"({
  "format_version": "1.0",
  "config": {"n_estimators": 1, "segment_length": 20, "min_len": 4, "max_len": 10, "random_state": 0},
  "classes": [0, 100],
  "trees": [
    {"rnd_start": 3, "length": 8, "nodes": [
      {"kind": "split", "feature": 2, "threshold": 0.25, "left": 1, "right": 2},
      {"kind": "leaf", "label": 0},
      {"kind": "leaf", "label": 100}
    ]}
  ]
})";

}  // namespace

TEST_CASE("serialize then deserialize preserves the model") {
  const auto model = trained_model();
  const auto text = serialize(model);
  const auto back = deserialize(text);
  CHECK(back.same_content(model));
  CHECK(serialize(back) == text);
}

TEST_CASE("hand-written one-tree model") {
  const auto model = deserialize(kOneTree);
  CHECK(model.trees.size() == 1);
  // Fixed interval is samples [0, 8): a flat start has diff_std 0.
  std::vector<double> flat(20, 1.0);
  CHECK(model.predict(flat) == 0);
  std::vector<double> zigzag(20, 0.0);
  for (std::size_t i = 0; i < 20; ++i) zigzag[i] = i % 2 ? 1.0 : -1.0;
  CHECK(model.predict(zigzag) == 100);
}

TEST_CASE("truncated file names the field it stopped in") {
  const std::string text = serialize(trained_model());
  const auto cut = text.find("\"trees\"") + 40;
  const auto msg = expect_format_error(text.substr(0, cut));
  CHECK(msg.find("truncated") != std::string::npos);
  CHECK(msg.find("trees") != std::string::npos);

  const auto early = expect_format_error(text.substr(0, text.find("\"classes\"") + 5));
  CHECK(early.find("missing field(s)") != std::string::npos);
  CHECK(early.find("trees") != std::string::npos);
}

TEST_CASE("unknown and missing fields are named") {
  std::string text = kOneTree;
  text.replace(text.find("\"random_state\""), 14, "\"randomstate\"");
  const auto msg = expect_format_error(text);
  CHECK(msg.find("config.randomstate") != std::string::npos);

  std::string extra = kOneTree;
  extra.replace(extra.find("\"label\": 0"), 10, "\"label\": 0, \"weight\": 1");
  CHECK(expect_format_error(extra).find("trees[0].nodes[1].weight") != std::string::npos);
}

TEST_CASE("format version is checked") {
  std::string text = kOneTree;
  text.replace(text.find("1.0"), 3, "2.0");
  CHECK(expect_format_error(text).find("format_version") != std::string::npos);
  std::string minor = kOneTree;
  minor.replace(minor.find("1.0"), 3, "1.7");
  CHECK_NOTHROW(deserialize(minor));
}

TEST_CASE("semantic validation on load") {
  std::string bad_label = kOneTree;
  bad_label.replace(bad_label.find("\"label\": 100"), 12, "\"label\": 75");
  CHECK(expect_format_error(bad_label).find("label 75") != std::string::npos);

  std::string bad_child = kOneTree;
  bad_child.replace(bad_child.find("\"right\": 2"), 10, "\"right\": 7");
  expect_format_error(bad_child);

  std::string bad_interval = kOneTree;
  bad_interval.replace(bad_interval.find("\"rnd_start\": 3"), 14, "\"rnd_start\": 15");
  expect_format_error(bad_interval);

  std::string bad_count = kOneTree;
  bad_count.replace(bad_count.find("\"n_estimators\": 1"), 17, "\"n_estimators\": 2");
  expect_format_error(bad_count);

  expect_format_error("");
  expect_format_error("[]");
}
