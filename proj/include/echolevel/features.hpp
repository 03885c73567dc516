#pragma once

#include <array>
#include <cstddef>
#include <span>

#include "echolevel/random.hpp"

namespace echolevel::features {

/// Allowed lengths for the per-tree intervals.
struct IntervalBounds {
  std::size_t min_len = 17;
  std::size_t max_len = 153;

  /// Throws ConfigError unless 2 <= min_len <= max_len <= segment_length.
  void validate(std::size_t segment_length) const;
};

/// One random interval [rnd_start, rnd_start + length) and its matching fixed
/// interval [0, length).
struct IntervalPair {
  std::size_t rnd_start = 0;
  std::size_t length = 2;

  bool fits(std::size_t segment_length) const {
    return length >= 2 && length <= segment_length && rnd_start <= segment_length - length;
  }
  bool operator==(const IntervalPair&) const = default;
};

inline constexpr std::size_t kFeatureCount = 3;
enum FeatureIndex : std::size_t { kSpectralRatio = 0, kDiffMean = 1, kDiffStd = 2 };

struct FeatureVector {
  double spectral_ratio = 0.0;
  double diff_mean = 0.0;
  double diff_std = 0.0;

  std::array<double, kFeatureCount> as_array() const { return {spectral_ratio, diff_mean, diff_std}; }
  bool operator==(const FeatureVector&) const = default;
};

/// Which one-sided bins enter the min/max ratio.
enum class RatioBins {
  OneSidedNoDc,   // bins [1, P/2]
  OneSidedWithDc  // bins [0, P/2]
};

IntervalPair sample_interval_pair(Rng& rng, std::size_t segment_length, const IntervalBounds& bounds);

/// Mean of the adjacent differences v[k] - v[k+1].
double diff_mean(std::span<const double> values);

/// Standard deviation of the adjacent differences v[k] - v[k+1], normalised by
/// the number of differences.
double diff_std(std::span<const double> values);

/// min/max of the magnitude spectrum of the segment zero-padded to the next
/// power of two. Returns 0 for an all-zero segment.
double spectral_min_max_ratio(std::span<const double> segment, RatioBins bins = RatioBins::OneSidedNoDc);

FeatureVector extract_features(std::span<const double> rir_segment, const IntervalPair& pair);

}  // namespace echolevel::features
