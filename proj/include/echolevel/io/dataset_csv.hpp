#pragma once

#include <string>
#include <string_view>

#include "echolevel/dataset.hpp"

namespace echolevel::io {

inline constexpr const char* kDatasetFormatVersion = "1.0";

/// Dataset CSV: a metadata line, a column header, then one row per RIR.
///
///   # echolevel-dataset format_version=1.0 sample_rate_hz=10000 frame_len=4096 segment=rir-leading classes=0;25;50
///   label,fine_fill_percent,material,s0,s1,...
///   25,20,straw,0.0123,...
///
/// Samples are stored at float precision: written with 9 significant digits
/// and rounded to float on reading, so a roundtrip is exact for float values.
std::string write_dataset(const LabeledDataset& dataset);

/// Header line and column line only; used when starting an empty file.
std::string dataset_header(const LabeledDataset& dataset, std::size_t sample_columns);

/// One data line (with trailing newline).
std::string dataset_row(const LabeledRow& row);

/// Parses a dataset; errors name the source, line and column.
LabeledDataset read_dataset(std::string_view text, const std::string& source = "<dataset>");

LabeledDataset read_dataset_file(const std::string& path);

/// Writes to a temporary file next to `path`, then renames it into place.
void write_text_file_atomic(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

void write_dataset_file(const std::string& path, const LabeledDataset& dataset);

}  // namespace echolevel::io
