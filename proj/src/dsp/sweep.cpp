#include <cmath>
#include <numbers>
#include <string>

#include "echolevel/dsp.hpp"
#include "echolevel/error.hpp"

namespace echolevel::dsp {

void SweepConfig::validate() const {
  if (!(sample_rate_hz > 0.0)) throw ConfigError("sweep sample_rate_hz must be positive");
  if (!(f0_hz > 0.0)) throw ConfigError("sweep f0_hz must be positive");
  if (!(f0_hz <= f1_hz)) throw ConfigError("sweep f0_hz must not exceed f1_hz");
  if (!(f1_hz <= sample_rate_hz / 2.0)) throw ConfigError("sweep f1_hz exceeds the Nyquist frequency");
  if (f1_hz > f0_hz && !(f_step_hz > 0.0)) throw ConfigError("sweep f_step_hz must be positive");
  if (!is_power_of_two(frame_len)) throw ConfigError("sweep frame_len must be a power of two");
  if (!(start_sample < end_sample && end_sample <= frame_len)) {
    throw ConfigError("sweep needs 0 <= start_sample < end_sample <= frame_len");
  }
  if (step_frequencies().size() > sweep_len()) {
    throw ConfigError("sweep has more frequency steps than samples");
  }
}

std::vector<double> SweepConfig::step_frequencies() const {
  std::vector<double> freqs{f0_hz};
  if (f1_hz <= f0_hz || !(f_step_hz > 0.0)) return freqs;
  const auto steps = static_cast<std::size_t>(std::ceil((f1_hz - f0_hz) / f_step_hz - 1e-12));
  for (std::size_t k = 1; k <= steps; ++k) {
    freqs.push_back(std::min(f0_hz + static_cast<double>(k) * f_step_hz, f1_hz));
  }
  return freqs;
}

std::size_t SweepConfig::samples_per_step() const { return sweep_len() / step_frequencies().size(); }

SampledSignal generate_stepped_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const auto freqs = cfg.step_frequencies();
  const std::size_t hold = cfg.samples_per_step();

  SampledSignal out;
  out.sample_rate_hz = cfg.sample_rate_hz;
  out.samples.assign(cfg.frame_len, 0.0);

  double phase = 0.0;
  for (std::size_t n = 0; n < cfg.sweep_len(); ++n) {
    const std::size_t step = std::min(n / hold, freqs.size() - 1);
    out.samples[cfg.start_sample + n] = std::sin(phase);
    phase += 2.0 * std::numbers::pi * freqs[step] / cfg.sample_rate_hz;
    // Keep the argument small; sin() is exact under 2 pi shifts to rounding.
    if (phase >= 2.0 * std::numbers::pi) phase -= 2.0 * std::numbers::pi;
  }
  return out;
}

}  // namespace echolevel::dsp
