#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace echolevel {

using Label = std::int64_t;

struct LabeledRow {
  std::vector<double> rir;
  Label label = 0;
  double fine_fill_percent = 0.0;
  std::string material;

  bool operator==(const LabeledRow&) const = default;
};

/// RIR rows with fill-level labels. `declared_classes` is the class set a
/// dataset file announces in its header; it may list classes without rows.
struct LabeledDataset {
  std::vector<LabeledRow> rows;
  std::vector<Label> declared_classes;
  double sample_rate_hz = 10000.0;
  std::size_t frame_len = 4096;

  /// Sorted union of the declared classes and the labels present in rows.
  std::vector<Label> classes() const;
  std::vector<Label> labels() const;
  std::size_t min_row_length() const;

  /// Throws InputError if any row is shorter than `segment_length`.
  void require_segment(std::size_t segment_length) const;

  void append(const LabeledDataset& other);

  bool operator==(const LabeledDataset&) const = default;
};

}  // namespace echolevel
