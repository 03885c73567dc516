#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "echolevel/dsp.hpp"
#include "echolevel/error.hpp"

namespace echolevel::dsp {

namespace {

// exp(-2 pi i k / n) for k < n/2, cached per size and thread.
const std::vector<std::complex<double>>& twiddles(std::size_t n) {
  thread_local std::map<std::size_t, std::vector<std::complex<double>>> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<std::complex<double>> table(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    table[k] = {std::cos(angle), std::sin(angle)};
  }
  return cache.emplace(n, std::move(table)).first->second;
}

}  // namespace

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void fft_in_place(std::span<std::complex<double>> data, bool inverse) {
  const std::size_t n = data.size();
  if (!is_power_of_two(n)) {
    throw InputError("transform length " + std::to_string(n) + " is not a power of two");
  }
  if (n == 1) return;

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }

  const auto& table = twiddles(n);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n / len;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        std::complex<double> w = table[k * stride];
        if (inverse) w = std::conj(w);
        const std::complex<double> odd = data[start + k + half] * w;
        data[start + k + half] = data[start + k] - odd;
        data[start + k] += odd;
      }
    }
  }

  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& v : data) v *= scale;
  }
}

std::vector<std::complex<double>> real_dft(std::span<const double> frame, std::size_t padded_len) {
  const std::size_t n = std::max(frame.size(), padded_len);
  std::vector<std::complex<double>> bins(n);
  for (std::size_t i = 0; i < frame.size(); ++i) bins[i] = {frame[i], 0.0};
  fft_in_place(bins, false);
  return bins;
}

Spectrum to_spectrum(std::span<const std::complex<double>> bins) {
  Spectrum spectrum;
  spectrum.magnitudes.resize(bins.size());
  spectrum.phases.resize(bins.size());
  for (std::size_t k = 0; k < bins.size(); ++k) {
    spectrum.magnitudes[k] = std::abs(bins[k]);
    double phase = std::atan2(bins[k].imag(), bins[k].real());
    if (phase <= -std::numbers::pi) phase = std::numbers::pi;
    spectrum.phases[k] = phase;
  }
  return spectrum;
}

Spectrum forward_transform(std::span<const double> frame) {
  if (!is_power_of_two(frame.size())) {
    throw InputError("frame length " + std::to_string(frame.size()) + " is not a power of two");
  }
  return to_spectrum(real_dft(frame));
}

std::vector<double> inverse_transform(const Spectrum& spectrum) {
  const std::size_t n = spectrum.frame_len();
  if (spectrum.phases.size() != n) {
    throw InputError("spectrum has " + std::to_string(n) + " magnitudes but " +
                     std::to_string(spectrum.phases.size()) + " phases");
  }
  std::vector<std::complex<double>> bins(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (!(spectrum.magnitudes[k] >= 0.0)) {
      throw InputError("spectrum magnitude at bin " + std::to_string(k) + " is negative or NaN");
    }
    bins[k] = std::polar(spectrum.magnitudes[k], spectrum.phases[k]);
  }
  fft_in_place(bins, true);

  double peak = 1.0;
  double residue = 0.0;
  for (const auto& v : bins) {
    peak = std::max(peak, std::abs(v.real()));
    residue = std::max(residue, std::abs(v.imag()));
  }
  if (residue > 1e-6 * peak) {
    throw InputError("inverse transform left an imaginary residue of " + std::to_string(residue) +
                     "; spectrum is not conjugate-symmetric");
  }
  std::vector<double> frame(n);
  for (std::size_t i = 0; i < n; ++i) frame[i] = bins[i].real();
  return frame;
}

}  // namespace echolevel::dsp
