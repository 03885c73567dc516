#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "echolevel/error.hpp"
#include "echolevel/features.hpp"
#include "echolevel/io/dataset_csv.hpp"
#include "echolevel/synth.hpp"
#include "echolevel/tree.hpp"
#include "oracles.hpp"

using namespace echolevel;
using namespace echolevel::synth;

TEST_CASE("zero-jitter IRs are identical across draws") {
  const auto cfg = without_jitter(SceneConfig{});
  Rng a(1), b(2);
  CHECK(make_class_ir(50, 50, a, cfg) == make_class_ir(50, 50, b, cfg));
}

TEST_CASE("fuller containers reflect earlier") {
  const auto cfg = without_jitter(SceneConfig{});
  Rng rng(3);
  const auto empty = class_taps(0, "straw", rng, cfg);
  const auto full = class_taps(100, "straw", rng, cfg);
  REQUIRE(empty.size() >= 2);
  REQUIRE(full.size() >= 2);
  CHECK(full[1].delay < empty[1].delay);
  CHECK(empty[1].delay == 150.0);
  CHECK(full[1].delay == 30.0);
  CHECK(full.size() == 1 + cfg.max_bounces);
}

TEST_CASE("IR energy matches the closed form without jitter") {
  const auto cfg = without_jitter(SceneConfig{});
  for (const auto& [fill, material] : std::vector<std::pair<double, std::string>>{
           {0, "straw"}, {25, "straw"}, {50, "cardboard"}, {100, "cardboard"}}) {
    const double f = fill / 100.0;
    const double spacing = 150.0 - 120.0 * f;  // integer for these fills
    const double gain = 0.9 + 0.2 * f;
    const double decay = (material == "straw" ? 0.5 : 0.65) * (1.0 - 0.3 * f);
    double expected = 0.3 * 0.3;
    double g = gain;
    for (int m = 1; m <= 11 && m * spacing < 511; ++m) {
      expected += g * g;
      g *= decay;
    }
    Rng rng(4);
    const auto ir = make_class_ir(fill == 0 ? 0 : static_cast<Label>(fill), fill, rng, cfg, material);
    double energy = 0;
    for (double v : ir) energy += v * v;
    CHECK(energy == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("fractional delays split linearly") {
  const auto ir = render_taps({{2.25, 1.0}, {0.0, 0.5}}, 8);
  CHECK(ir[0] == 0.5);
  CHECK(ir[2] == 0.75);
  CHECK(ir[3] == 0.25);
  CHECK_THROWS_AS(render_taps({{7.5, 1.0}}, 8), InputError);
}

TEST_CASE("jitter stays inside its bounds") {
  const SceneConfig cfg;
  Rng rng(5);
  for (int i = 0; i < 500; ++i) {
    const auto taps = class_taps(50, "straw", rng, cfg);
    CHECK(taps[0].delay == 0.0);
    CHECK(std::abs(taps[0].gain / 0.3 - 1.0) <= 0.05 + 1e-12);
    CHECK(std::abs(taps[1].delay - 90.0) <= 1.0 + 1e-12);
    CHECK(std::abs(taps[1].gain / 1.0 - 1.0) <= 0.05 + 1e-12);
  }
}

TEST_CASE("recording through a delta IR without noise is the sweep") {
  const auto sweep = dsp::generate_stepped_sweep(dsp::SweepConfig{});
  std::vector<double> delta(512, 0.0);
  delta[0] = 1.0;
  Rng rng(6);
  CHECK(simulate_recording(delta, sweep, INFINITY, rng).samples == sweep.samples);
}

TEST_CASE("recording matches the linear convolution oracle") {
  const auto sweep = dsp::generate_stepped_sweep(dsp::SweepConfig{});
  std::vector<double> ir(512, 0.0);
  ir[0] = 0.3;
  ir[137] = -0.8;
  Rng rng(7);
  const auto y = simulate_recording(ir, sweep, INFINITY, rng).samples;
  const auto expected = oracle::linear_convolve(sweep.samples, ir, sweep.size());
  double err = 0;
  for (std::size_t i = 0; i < y.size(); ++i) err = std::max(err, std::abs(y[i] - expected[i]));
  CHECK(err < 1e-12);
}

TEST_CASE("noise level matches the requested SNR and sits before the sweep too") {
  const SceneConfig cfg;
  const auto sweep = dsp::generate_stepped_sweep(cfg.sweep);
  Rng ir_rng(8);
  const auto ir = make_class_ir(25, 25, ir_rng, cfg);
  Rng clean_rng(9), noisy_rng(9);
  const auto clean = simulate_recording(ir, sweep, INFINITY, clean_rng).samples;
  for (double snr : {0.0, 10.0, 20.0, 30.0}) {
    const auto noisy = simulate_recording(ir, sweep, snr, noisy_rng).samples;
    double ps = 0, pn = 0;
    for (std::size_t i = 0; i < clean.size(); ++i) {
      ps += clean[i] * clean[i];
      pn += (noisy[i] - clean[i]) * (noisy[i] - clean[i]);
    }
    CHECK(std::abs(10 * std::log10(ps / pn) - snr) < 0.5);
    // Only noise precedes the sweep onset.
    for (std::size_t i = 0; i < cfg.sweep.start_sample; ++i) REQUIRE(clean[i] == 0.0);
    double pre = 0;
    for (std::size_t i = 0; i < cfg.sweep.start_sample; ++i) pre += noisy[i] * noisy[i];
    CHECK(pre > 0.0);
  }
}

TEST_CASE("scene validation") {
  SceneConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.snr_db = INFINITY;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SceneConfig{};
  cfg.ir_length = 2000;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SceneConfig{};
  cfg.buckets[0].fine_fills_percent = {120};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SceneConfig{};
  Rng rng(1);
  CHECK_THROWS_AS(make_class_ir(33, 33, rng, cfg), ConfigError);
  CHECK_THROWS_AS(generate_dataset(cfg, 1, 0, "glass"), ConfigError);
}

TEST_CASE("dataset shape, labels and determinism") {
  const SceneConfig cfg;
  const auto ds = generate_dataset(cfg, 1, 42, "straw");
  CHECK(ds.rows.size() == 15);
  CHECK(ds.classes() == std::vector<Label>{0, 25, 50, 75, 100});
  for (const auto& row : ds.rows) {
    CHECK(row.rir.size() == 512);
    CHECK(row.material == "straw");
    for (double v : row.rir) REQUIRE(static_cast<double>(static_cast<float>(v)) == v);
  }
  const auto both = generate_dataset(cfg, 1, 42);
  CHECK(both.rows.size() == 30);
  for (std::size_t i = 0; i < 15; ++i) CHECK(both.rows[i] == ds.rows[i]);

  const auto dir = oracle::temp_dir("synth_determinism");
  io::write_dataset_file(dir + "/a.csv", generate_dataset(cfg, 2, 5));
  io::write_dataset_file(dir + "/b.csv", generate_dataset(cfg, 2, 5));
  CHECK(io::read_text_file(dir + "/a.csv") == io::read_text_file(dir + "/b.csv"));
  CHECK_FALSE(generate_dataset(cfg, 1, 43, "straw").rows == ds.rows);
}

TEST_CASE("empty and full containers separate on one feature") {
  SceneConfig cfg;
  cfg.buckets = {{0, {0, 5, 10}}, {100, {90, 95, 100}}};
  const auto ds = generate_dataset(cfg, 10, 11);
  std::vector<tree::FeatureRow> rows;
  std::vector<Label> labels;
  for (const auto& r : ds.rows) {
    const std::span<const double> seg(r.rir.data(), 300);
    rows.push_back({0.0, 0.0, features::diff_std(seg)});
    labels.push_back(r.label);
  }
  tree::TreeParams stump;
  stump.max_depth = 1;
  const auto t = tree::grow_tree(rows, labels, stump);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) correct += t.predict(rows[i]) == labels[i];
  CHECK(static_cast<double>(correct) / static_cast<double>(rows.size()) >= 0.95);
}
