#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace echolevel::dsp {

/// Uniformly sampled real-valued signal.
struct SampledSignal {
  std::vector<double> samples;
  double sample_rate_hz = 10000.0;

  std::size_t size() const { return samples.size(); }
};

/// Per-bin polar representation of a DFT frame. Phases lie in (-pi, pi].
struct Spectrum {
  std::vector<double> magnitudes;
  std::vector<double> phases;

  std::size_t frame_len() const { return magnitudes.size(); }
};

/// Stepped linear sweep placed inside a recording frame. The defaults
/// describe a 1024-sample sweep between samples 2048 and 3072 of a 4096-sample
/// frame recorded at 10 kHz.
struct SweepConfig {
  double f0_hz = 500.0;
  double f1_hz = 4500.0;
  double f_step_hz = 100.0;
  std::size_t start_sample = 2048;
  std::size_t end_sample = 3072;
  std::size_t frame_len = 4096;
  double sample_rate_hz = 10000.0;

  /// Throws ConfigError when the invariants do not hold.
  void validate() const;

  std::size_t sweep_len() const { return end_sample - start_sample; }

  /// Frequencies of the individual steps, f0 first and f1 last.
  std::vector<double> step_frequencies() const;

  /// Samples each step is held for; the last step also takes the remainder.
  std::size_t samples_per_step() const;
};

enum class WindowKind { Rectangular, Hann };

// Noise estimation window of the spectral subtraction: it ends this many
// samples before the sweep onset and spans kNoiseWindowLength samples.
inline constexpr std::size_t kNoiseGuardSamples = 200;
inline constexpr std::size_t kNoiseWindowLength = 1024;

bool is_power_of_two(std::size_t n);
std::size_t next_power_of_two(std::size_t n);

/// In-place iterative radix-2 FFT. The inverse direction includes the 1/N
/// scaling. Throws InputError for lengths that are not a power of two.
void fft_in_place(std::span<std::complex<double>> data, bool inverse);

/// Complex DFT of a real frame, zero-padded to `padded_len` when larger.
std::vector<std::complex<double>> real_dft(std::span<const double> frame, std::size_t padded_len = 0);

Spectrum to_spectrum(std::span<const std::complex<double>> bins);

Spectrum forward_transform(std::span<const double> frame);

/// Inverse DFT of a polar spectrum. The imaginary residue must stay below
/// 1e-6 of max(1, peak |real|) -- i.e. the spectrum must be (numerically)
/// Hermitian -- otherwise InputError is thrown.
std::vector<double> inverse_transform(const Spectrum& spectrum);

std::vector<double> window_weights(WindowKind kind, std::size_t n);
std::vector<double> apply_window(std::span<const double> frame, WindowKind kind);

SampledSignal generate_stepped_sweep(const SweepConfig& cfg);

/// Spectral subtraction in the frequency domain: the magnitudes
/// max(0, |c_y| - alpha |c_n|) paired with the recording's phase.
Spectrum spectral_subtract_spectrum(std::span<const double> recording, const SweepConfig& cfg, double alpha = 1.0,
                                    WindowKind window = WindowKind::Hann);

/// Denoises a recording using the noise-only stretch that precedes the sweep.
SampledSignal spectral_subtract(const SampledSignal& recording, const SweepConfig& cfg, double alpha = 1.0,
                                WindowKind window = WindowKind::Hann);

/// Magnitude-ratio RIR spectrum |c_y| / |c_x| with the recording's phase.
/// Bins where |c_x| < relative_epsilon * max|c_x| are set to zero.
Spectrum estimate_rir_spectrum(std::span<const double> recording, std::span<const double> reference,
                               double relative_epsilon = 1e-6, WindowKind window = WindowKind::Hann);

SampledSignal estimate_rir(const SampledSignal& recording, const SampledSignal& reference,
                           double relative_epsilon = 1e-6, WindowKind window = WindowKind::Hann);

struct PipelineOptions {
  double alpha = 1.0;
  double relative_epsilon = 1e-6;
  WindowKind window = WindowKind::Hann;
  // Rotate the RIR so that index 0 corresponds to the sweep onset.
  bool align_to_onset = true;
};

/// Recording -> spectral subtraction -> RIR estimate. The analysis window is
/// applied once: the denoised (already windowed) recording is divided by the
/// spectrum of the windowed reference sweep.
SampledSignal recording_to_rir(const SampledSignal& recording, const SweepConfig& cfg,
                               const PipelineOptions& options = {});

}  // namespace echolevel::dsp
