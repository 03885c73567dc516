#include "echolevel/features.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "echolevel/dsp.hpp"
#include "echolevel/error.hpp"

namespace echolevel::features {

void IntervalBounds::validate(std::size_t segment_length) const {
  if (min_len < 2) throw ConfigError("interval min_len must be at least 2");
  if (min_len > max_len) throw ConfigError("interval min_len exceeds max_len");
  if (max_len > segment_length) {
    throw ConfigError("interval max_len " + std::to_string(max_len) + " exceeds segment_length " +
                      std::to_string(segment_length));
  }
}

IntervalPair sample_interval_pair(Rng& rng, std::size_t segment_length, const IntervalBounds& bounds) {
  bounds.validate(segment_length);
  IntervalPair pair;
  pair.length = rng.uniform_int(bounds.min_len, bounds.max_len);
  pair.rnd_start = rng.uniform_int(0, segment_length - pair.length);
  return pair;
}

namespace {

void require_two(std::span<const double> values, const char* what) {
  if (values.size() < 2) throw InputError(std::string(what) + " needs at least 2 values");
}

}  // namespace

double diff_mean(std::span<const double> values) {
  require_two(values, "diff_mean");
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < values.size(); ++k) sum += values[k] - values[k + 1];
  return sum / static_cast<double>(values.size() - 1);
}

double diff_std(std::span<const double> values) {
  require_two(values, "diff_std");
  const double mean = diff_mean(values);
  double sum_sq = 0.0;
  for (std::size_t k = 0; k + 1 < values.size(); ++k) {
    const double d = values[k] - values[k + 1] - mean;
    sum_sq += d * d;
  }
  return std::sqrt(sum_sq / static_cast<double>(values.size() - 1));
}

double spectral_min_max_ratio(std::span<const double> segment, RatioBins bins) {
  require_two(segment, "spectral_min_max_ratio");
  const std::size_t padded = dsp::next_power_of_two(segment.size());
  const auto spectrum = dsp::real_dft(segment, padded);
  const std::size_t first = bins == RatioBins::OneSidedNoDc ? 1 : 0;
  double lo = std::abs(spectrum[first]);
  double hi = lo;
  for (std::size_t k = first + 1; k <= padded / 2; ++k) {
    const double m = std::abs(spectrum[k]);
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  if (hi <= 0.0) return 0.0;
  return lo / hi;
}

FeatureVector extract_features(std::span<const double> rir_segment, const IntervalPair& pair) {
  if (!pair.fits(rir_segment.size())) {
    throw InputError("interval pair (start " + std::to_string(pair.rnd_start) + ", length " +
                     std::to_string(pair.length) + ") does not fit a segment of " +
                     std::to_string(rir_segment.size()) + " samples");
  }
  const auto fixed = rir_segment.subspan(0, pair.length);
  return {spectral_min_max_ratio(rir_segment.subspan(pair.rnd_start, pair.length)), diff_mean(fixed),
          diff_std(fixed)};
}

}  // namespace echolevel::features
