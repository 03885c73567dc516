#include <algorithm>
#include <cmath>
#include <string>

#include "echolevel/dsp.hpp"
#include "echolevel/error.hpp"

namespace echolevel::dsp {

namespace {

std::vector<double> polar_inverse(std::span<const double> magnitudes, std::span<const double> phases) {
  Spectrum spectrum;
  spectrum.magnitudes.assign(magnitudes.begin(), magnitudes.end());
  spectrum.phases.assign(phases.begin(), phases.end());
  return inverse_transform(spectrum);
}

}  // namespace

Spectrum spectral_subtract_spectrum(std::span<const double> recording, const SweepConfig& cfg, double alpha,
                                    WindowKind window) {
  cfg.validate();
  if (!(alpha >= 0.0)) throw InputError("spectral subtraction alpha must be >= 0");
  if (recording.size() != cfg.frame_len) {
    throw InputError("recording has " + std::to_string(recording.size()) + " samples, expected frame_len " +
                     std::to_string(cfg.frame_len));
  }
  if (cfg.start_sample < kNoiseGuardSamples + kNoiseWindowLength) {
    throw InputError("noise window [start_sample - 1224, start_sample - 200) falls before the frame start");
  }
  const std::size_t noise_end = cfg.start_sample - kNoiseGuardSamples;
  const std::size_t noise_start = noise_end - kNoiseWindowLength;

  // The noise frame keeps the slice at its original positions; everything
  // else is zero.
  std::vector<double> noise(cfg.frame_len, 0.0);
  std::copy(recording.begin() + static_cast<std::ptrdiff_t>(noise_start),
            recording.begin() + static_cast<std::ptrdiff_t>(noise_end),
            noise.begin() + static_cast<std::ptrdiff_t>(noise_start));

  const auto recording_bins = real_dft(apply_window(recording, window));
  const auto noise_bins = real_dft(apply_window(noise, window));

  Spectrum out = to_spectrum(recording_bins);
  for (std::size_t k = 0; k < out.frame_len(); ++k) {
    out.magnitudes[k] = std::max(0.0, out.magnitudes[k] - alpha * std::abs(noise_bins[k]));
  }
  return out;
}

SampledSignal spectral_subtract(const SampledSignal& recording, const SweepConfig& cfg, double alpha,
                                WindowKind window) {
  const Spectrum spectrum = spectral_subtract_spectrum(recording.samples, cfg, alpha, window);
  return {polar_inverse(spectrum.magnitudes, spectrum.phases), recording.sample_rate_hz};
}

Spectrum estimate_rir_spectrum(std::span<const double> recording, std::span<const double> reference,
                               double relative_epsilon, WindowKind window) {
  if (recording.size() != reference.size()) {
    throw InputError("recording has " + std::to_string(recording.size()) + " samples but reference has " +
                     std::to_string(reference.size()));
  }
  if (!is_power_of_two(recording.size())) {
    throw InputError("frame length " + std::to_string(recording.size()) + " is not a power of two");
  }
  if (!(relative_epsilon >= 0.0)) throw InputError("rir epsilon must be >= 0");

  const auto reference_bins = real_dft(apply_window(reference, window));
  Spectrum out = to_spectrum(real_dft(apply_window(recording, window)));

  double peak = 0.0;
  for (const auto& b : reference_bins) peak = std::max(peak, std::abs(b));
  const double floor = relative_epsilon * peak;

  for (std::size_t k = 0; k < out.frame_len(); ++k) {
    const double cx = std::abs(reference_bins[k]);
    out.magnitudes[k] = (cx > 0.0 && cx >= floor) ? std::max(0.0, out.magnitudes[k] / cx) : 0.0;
  }
  return out;
}

SampledSignal estimate_rir(const SampledSignal& recording, const SampledSignal& reference, double relative_epsilon,
                           WindowKind window) {
  const Spectrum spectrum = estimate_rir_spectrum(recording.samples, reference.samples, relative_epsilon, window);
  return {polar_inverse(spectrum.magnitudes, spectrum.phases), recording.sample_rate_hz};
}

SampledSignal recording_to_rir(const SampledSignal& recording, const SweepConfig& cfg,
                               const PipelineOptions& options) {
  const SampledSignal denoised = spectral_subtract(recording, cfg, options.alpha, options.window);
  SampledSignal reference = generate_stepped_sweep(cfg);
  reference.samples = apply_window(reference.samples, options.window);
  SampledSignal rir = estimate_rir(denoised, reference, options.relative_epsilon, WindowKind::Rectangular);
  if (options.align_to_onset) {
    std::rotate(rir.samples.begin(), rir.samples.begin() + static_cast<std::ptrdiff_t>(cfg.start_sample),
                rir.samples.end());
  }
  return rir;
}

}  // namespace echolevel::dsp
