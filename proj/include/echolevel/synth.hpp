#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "echolevel/dataset.hpp"
#include "echolevel/dsp.hpp"
#include "echolevel/random.hpp"

namespace echolevel::synth {

/// One fill bucket: its class label and the fine fill levels recorded for it.
struct Bucket {
  Label label = 0;
  std::vector<double> fine_fills_percent;

  bool operator==(const Bucket&) const = default;
};

/// Decay profile of a filling material.
struct Material {
  std::string name;
  double decay = 0.5;  // per-bounce gain factor of an empty container

  bool operator==(const Material&) const = default;
};

/// Synthetic container scene. The impulse response is a direct path plus a
/// train of equally spaced reflections whose spacing shrinks and whose gain
/// grows with the fill level, while the per-bounce decay gets faster.
struct SceneConfig {
  dsp::SweepConfig sweep;
  double snr_db = 20.0;

  std::size_t ir_length = 512;
  double direct_gain = 0.3;
  double direct_delay = 0.0;
  double reflection_delay_empty = 150.0;
  double reflection_delay_full = 30.0;
  double reflection_gain_empty = 0.9;
  double reflection_gain_full = 1.1;
  double decay_fill_factor = 0.3;  // decay *= 1 - factor * fill
  std::size_t max_bounces = 11;

  double gain_jitter = 0.05;          // relative, uniform in [-j, j]
  double delay_jitter_samples = 1.0;  // uniform in [-j, j]

  std::vector<Material> materials{{"straw", 0.5}, {"cardboard", 0.65}};
  std::vector<Bucket> buckets{{0, {0, 5, 10}},
                              {25, {20, 25, 30}},
                              {50, {45, 50, 55}},
                              {75, {70, 75, 80}},
                              {100, {90, 95, 100}}};

  std::size_t train_rows_per_fine_fill = 20;
  std::size_t test_rows_per_fine_fill = 10;
  // Leading RIR samples kept per dataset row.
  std::size_t row_length = 512;
  dsp::PipelineOptions pipeline;

  /// Throws ConfigError when the invariants do not hold.
  void validate() const;

  const Material& material(const std::string& name) const;
  std::vector<Label> class_labels() const;
};

/// Zero-jitter scene, handy for analytic checks.
SceneConfig without_jitter(SceneConfig cfg);

struct Tap {
  double delay = 0.0;  // samples, may be fractional
  double gain = 0.0;
};

/// Direct path followed by the reflections that fall inside the IR, jitter
/// drawn from `rng` (three draws: delay, reflection gain, direct gain).
std::vector<Tap> class_taps(double fine_fill_percent, const std::string& material, Rng& rng, const SceneConfig& cfg);

/// Renders taps into an IR; a fractional delay is split linearly between the
/// two neighbouring samples.
std::vector<double> render_taps(const std::vector<Tap>& taps, std::size_t length);

/// Synthetic IR for a row of class `class_id` at the given fine fill level.
std::vector<double> make_class_ir(Label class_id, double fine_fill_percent, Rng& rng, const SceneConfig& cfg,
                                  const std::string& material = "straw");

/// Sweep convolved with the IR, truncated to the sweep frame, plus white noise
/// over the whole frame at `snr_db` relative to the mean square of the
/// convolved frame. An infinite SNR adds no noise.
dsp::SampledSignal simulate_recording(std::span<const double> ir, const dsp::SampledSignal& sweep, double snr_db,
                                      Rng& rng);

/// Rows for one material: every bucket, every fine fill, `rows_per_fine_fill`
/// recordings each, run through the RIR pipeline. Row r draws from
/// derive_seed(derive_seed(seed, material index), r).
LabeledDataset generate_dataset(const SceneConfig& cfg, std::size_t rows_per_fine_fill, std::uint64_t seed,
                                const std::string& material);

/// generate_dataset over all materials of the scene, concatenated.
LabeledDataset generate_dataset(const SceneConfig& cfg, std::size_t rows_per_fine_fill, std::uint64_t seed);

/// Train and test sets with the scene's row counts and independent seeds.
std::pair<LabeledDataset, LabeledDataset> generate_train_test(const SceneConfig& cfg, std::uint64_t seed);

}  // namespace echolevel::synth
