#include "echolevel/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "echolevel/error.hpp"

namespace echolevel::synth {

void SceneConfig::validate() const {
  sweep.validate();
  if (!std::isfinite(snr_db)) throw ConfigError("snr_db must be finite");
  if (ir_length < 1) throw ConfigError("ir_length must be at least 1");
  if (ir_length > sweep.frame_len - sweep.end_sample) {
    throw ConfigError("ir_length " + std::to_string(ir_length) + " exceeds the " +
                      std::to_string(sweep.frame_len - sweep.end_sample) + " samples after the sweep end");
  }
  if (direct_delay < 0.0 || direct_delay + 1.0 >= static_cast<double>(ir_length)) {
    throw ConfigError("direct_delay must lie inside the IR");
  }
  if (!(reflection_delay_full > 0.0) || !(reflection_delay_empty > 0.0)) {
    throw ConfigError("reflection delays must be positive");
  }
  if (reflection_delay_full - delay_jitter_samples <= 0.0) {
    throw ConfigError("delay jitter can push the first reflection to a non-positive delay");
  }
  if (gain_jitter < 0.0 || delay_jitter_samples < 0.0) throw ConfigError("jitter magnitudes must be non-negative");
  if (decay_fill_factor < 0.0 || decay_fill_factor >= 1.0) throw ConfigError("decay_fill_factor must be in [0, 1)");
  if (materials.empty()) throw ConfigError("scene needs at least one material");
  for (const auto& m : materials) {
    if (!(m.decay > 0.0)) throw ConfigError("material '" + m.name + "' needs a positive decay");
  }
  if (buckets.empty()) throw ConfigError("scene needs at least one bucket");
  for (std::size_t i = 0; i < buckets.size(); ++i) {
    if (buckets[i].fine_fills_percent.empty()) {
      throw ConfigError("bucket " + std::to_string(buckets[i].label) + " has no fine fill levels");
    }
    for (double f : buckets[i].fine_fills_percent) {
      if (!(f >= 0.0 && f <= 100.0)) throw ConfigError("fine fill levels must be within [0, 100]");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (buckets[j].label == buckets[i].label) {
        throw ConfigError("bucket label " + std::to_string(buckets[i].label) + " appears twice");
      }
    }
  }
  if (row_length < 2 || row_length > sweep.frame_len) throw ConfigError("row_length must be in [2, frame_len]");
}

const Material& SceneConfig::material(const std::string& name) const {
  for (const auto& m : materials) {
    if (m.name == name) return m;
  }
  throw ConfigError("unknown material '" + name + "'");
}

std::vector<Label> SceneConfig::class_labels() const {
  std::vector<Label> labels;
  for (const auto& b : buckets) labels.push_back(b.label);
  std::sort(labels.begin(), labels.end());
  return labels;
}

SceneConfig without_jitter(SceneConfig cfg) {
  cfg.gain_jitter = 0.0;
  cfg.delay_jitter_samples = 0.0;
  return cfg;
}

std::vector<Tap> class_taps(double fine_fill_percent, const std::string& material, Rng& rng, const SceneConfig& cfg) {
  const double fill = fine_fill_percent / 100.0;
  const double decay = cfg.material(material).decay * (1.0 - cfg.decay_fill_factor * fill);

  const double spacing = cfg.reflection_delay_empty + (cfg.reflection_delay_full - cfg.reflection_delay_empty) * fill +
                         rng.uniform(-cfg.delay_jitter_samples, cfg.delay_jitter_samples);
  const double gain = (cfg.reflection_gain_empty + (cfg.reflection_gain_full - cfg.reflection_gain_empty) * fill) *
                      (1.0 + rng.uniform(-cfg.gain_jitter, cfg.gain_jitter));
  const double direct = cfg.direct_gain * (1.0 + rng.uniform(-cfg.gain_jitter, cfg.gain_jitter));

  std::vector<Tap> taps{{cfg.direct_delay, direct}};
  const double last = static_cast<double>(cfg.ir_length - 1);
  double bounce_gain = gain;
  for (std::size_t m = 1; m <= cfg.max_bounces; ++m) {
    const double delay = cfg.direct_delay + static_cast<double>(m) * spacing;
    if (delay >= last) break;
    taps.push_back({delay, bounce_gain});
    bounce_gain *= decay;
  }
  return taps;
}

std::vector<double> render_taps(const std::vector<Tap>& taps, std::size_t length) {
  std::vector<double> ir(length, 0.0);
  for (const auto& tap : taps) {
    if (tap.delay < 0.0 || tap.delay > static_cast<double>(length - 1)) {
      throw InputError("tap delay " + std::to_string(tap.delay) + " lies outside an IR of length " +
                       std::to_string(length));
    }
    const auto i = static_cast<std::size_t>(tap.delay);
    const double frac = tap.delay - static_cast<double>(i);
    ir[i] += tap.gain * (1.0 - frac);
    if (frac > 0.0) ir[i + 1] += tap.gain * frac;
  }
  return ir;
}

std::vector<double> make_class_ir(Label class_id, double fine_fill_percent, Rng& rng, const SceneConfig& cfg,
                                  const std::string& material) {
  const auto bucket = std::find_if(cfg.buckets.begin(), cfg.buckets.end(),
                                   [&](const Bucket& b) { return b.label == class_id; });
  if (bucket == cfg.buckets.end()) throw ConfigError("unknown class " + std::to_string(class_id));
  if (!(fine_fill_percent >= 0.0 && fine_fill_percent <= 100.0)) {
    throw InputError("fine fill " + std::to_string(fine_fill_percent) + "% is outside [0, 100]");
  }
  return render_taps(class_taps(fine_fill_percent, material, rng, cfg), cfg.ir_length);
}

dsp::SampledSignal simulate_recording(std::span<const double> ir, const dsp::SampledSignal& sweep, double snr_db,
                                      Rng& rng) {
  const std::size_t n = sweep.size();
  std::vector<double> y(n, 0.0);
  for (std::size_t k = 0; k < ir.size() && k < n; ++k) {
    if (ir[k] == 0.0) continue;
    for (std::size_t i = 0; i + k < n; ++i) y[i + k] += ir[k] * sweep.samples[i];
  }
  if (!(std::isinf(snr_db) && snr_db > 0.0)) {
    double power = 0.0;
    for (double v : y) power += v * v;
    power /= static_cast<double>(n);
    const double sigma = std::sqrt(power / std::pow(10.0, snr_db / 10.0));
    for (double& v : y) v += sigma * rng.normal();
  }
  return {std::move(y), sweep.sample_rate_hz};
}

LabeledDataset generate_dataset(const SceneConfig& cfg, std::size_t rows_per_fine_fill, std::uint64_t seed,
                                const std::string& material) {
  cfg.validate();
  const auto mat = std::find_if(cfg.materials.begin(), cfg.materials.end(),
                                [&](const Material& m) { return m.name == material; });
  if (mat == cfg.materials.end()) throw ConfigError("unknown material '" + material + "'");
  const std::uint64_t material_seed = derive_seed(seed, static_cast<std::uint64_t>(mat - cfg.materials.begin()));

  const dsp::SampledSignal sweep = dsp::generate_stepped_sweep(cfg.sweep);
  LabeledDataset out;
  out.declared_classes = cfg.class_labels();
  out.sample_rate_hz = cfg.sweep.sample_rate_hz;
  out.frame_len = cfg.sweep.frame_len;

  std::uint64_t row_index = 0;
  for (const auto& bucket : cfg.buckets) {
    for (double fine : bucket.fine_fills_percent) {
      for (std::size_t r = 0; r < rows_per_fine_fill; ++r) {
        Rng rng(derive_seed(material_seed, row_index++));
        const auto ir = make_class_ir(bucket.label, fine, rng, cfg, material);
        const auto recording = simulate_recording(ir, sweep, cfg.snr_db, rng);
        const auto rir = dsp::recording_to_rir(recording, cfg.sweep, cfg.pipeline);
        LabeledRow row;
        row.rir.reserve(cfg.row_length);
        // Stored at float precision so a written and re-read dataset is
        // identical to the generated one.
        for (std::size_t i = 0; i < cfg.row_length; ++i) {
          row.rir.push_back(static_cast<double>(static_cast<float>(rir.samples[i])));
        }
        row.label = bucket.label;
        row.fine_fill_percent = fine;
        row.material = material;
        out.rows.push_back(std::move(row));
      }
    }
  }
  return out;
}

LabeledDataset generate_dataset(const SceneConfig& cfg, std::size_t rows_per_fine_fill, std::uint64_t seed) {
  cfg.validate();
  LabeledDataset out;
  out.declared_classes = cfg.class_labels();
  out.sample_rate_hz = cfg.sweep.sample_rate_hz;
  out.frame_len = cfg.sweep.frame_len;
  for (const auto& m : cfg.materials) out.append(generate_dataset(cfg, rows_per_fine_fill, seed, m.name));
  return out;
}

std::pair<LabeledDataset, LabeledDataset> generate_train_test(const SceneConfig& cfg, std::uint64_t seed) {
  return {generate_dataset(cfg, cfg.train_rows_per_fine_fill, derive_seed(seed, 0)),
          generate_dataset(cfg, cfg.test_rows_per_fine_fill, derive_seed(seed, 1))};
}

}  // namespace echolevel::synth
