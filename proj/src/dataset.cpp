#include "echolevel/dataset.hpp"

#include <algorithm>
#include <limits>

#include "echolevel/error.hpp"

namespace echolevel {

std::vector<Label> LabeledDataset::classes() const {
  std::vector<Label> out = declared_classes;
  for (const auto& row : rows) out.push_back(row.label);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Label> LabeledDataset::labels() const {
  std::vector<Label> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row.label);
  return out;
}

std::size_t LabeledDataset::min_row_length() const {
  if (rows.empty()) return 0;
  std::size_t shortest = std::numeric_limits<std::size_t>::max();
  for (const auto& row : rows) shortest = std::min(shortest, row.rir.size());
  return shortest;
}

void LabeledDataset::require_segment(std::size_t segment_length) const {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].rir.size() < segment_length) {
      throw InputError("dataset row " + std::to_string(i) + " has " + std::to_string(rows[i].rir.size()) +
                       " samples, fewer than segment_length " + std::to_string(segment_length));
    }
  }
}

void LabeledDataset::append(const LabeledDataset& other) {
  rows.insert(rows.end(), other.rows.begin(), other.rows.end());
  declared_classes.insert(declared_classes.end(), other.declared_classes.begin(), other.declared_classes.end());
  std::sort(declared_classes.begin(), declared_classes.end());
  declared_classes.erase(std::unique(declared_classes.begin(), declared_classes.end()), declared_classes.end());
}

}  // namespace echolevel
