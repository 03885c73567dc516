#include <cmath>
#include <numbers>

#include "echolevel/dsp.hpp"

namespace echolevel::dsp {

std::vector<double> window_weights(WindowKind kind, std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (kind == WindowKind::Rectangular || n < 2) return w;
  const double denom = static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / denom));
  }
  // Exact endpoints and peak; cos() does not land on them bit-for-bit.
  w.front() = 0.0;
  w.back() = 0.0;
  if (n % 2 == 1) w[(n - 1) / 2] = 1.0;
  return w;
}

std::vector<double> apply_window(std::span<const double> frame, WindowKind kind) {
  const auto w = window_weights(kind, frame.size());
  std::vector<double> out(frame.size());
  for (std::size_t i = 0; i < frame.size(); ++i) out[i] = frame[i] * w[i];
  return out;
}

}  // namespace echolevel::dsp
