#include "echolevel/io/dataset_csv.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>
#include <vector>

#include <unistd.h>

#include "echolevel/error.hpp"

namespace echolevel::io {

namespace {

constexpr std::string_view kMagic = "# echolevel-dataset";
constexpr std::string_view kSegmentSemantics = "rir-leading";

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string format_exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

class LineError {
 public:
  explicit LineError(std::string source) : source_(std::move(source)) {}
  [[noreturn]] void fail(std::size_t line, std::size_t column, const std::string& msg) const {
    std::string where = source_ + ": line " + std::to_string(line);
    if (column) where += ", column " + std::to_string(column);
    throw FormatError(where + ": " + msg);
  }

 private:
  std::string source_;
};

template <typename T>
bool parse_number(std::string_view text, T& out) {
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

void check_material(const std::string& material) {
  if (material.find_first_of(",\n\r") != std::string::npos) {
    throw InputError("material '" + material + "' contains a comma or line break");
  }
}

}  // namespace

std::string dataset_header(const LabeledDataset& dataset, std::size_t sample_columns) {
  std::ostringstream out;
  out << kMagic << " format_version=" << kDatasetFormatVersion
      << " sample_rate_hz=" << format_exact(dataset.sample_rate_hz) << " frame_len=" << dataset.frame_len
      << " segment=" << kSegmentSemantics << " classes=";
  const auto classes = dataset.classes();
  for (std::size_t i = 0; i < classes.size(); ++i) out << (i ? ";" : "") << classes[i];
  out << "\nlabel,fine_fill_percent,material";
  for (std::size_t i = 0; i < sample_columns; ++i) out << ",s" << i;
  out << "\n";
  return out.str();
}

std::string dataset_row(const LabeledRow& row) {
  check_material(row.material);
  std::string line = std::to_string(row.label) + "," + format_double(row.fine_fill_percent) + "," + row.material;
  for (double v : row.rir) {
    line += ',';
    line += format_double(v);
  }
  line += '\n';
  return line;
}

std::string write_dataset(const LabeledDataset& dataset) {
  const std::size_t columns = dataset.rows.empty() ? 0 : dataset.rows.front().rir.size();
  std::string out = dataset_header(dataset, columns);
  for (std::size_t i = 0; i < dataset.rows.size(); ++i) {
    if (dataset.rows[i].rir.size() != columns) {
      throw InputError("dataset row " + std::to_string(i) + " has " + std::to_string(dataset.rows[i].rir.size()) +
                       " samples but row 0 has " + std::to_string(columns));
    }
    out += dataset_row(dataset.rows[i]);
  }
  return out;
}

LabeledDataset read_dataset(std::string_view text, const std::string& source) {
  const LineError err(source);
  std::vector<std::string_view> lines = split(text, '\n');
  for (auto& l : lines) {
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) err.fail(1, 0, "empty file, expected the '" + std::string(kMagic) + "' header line");

  const std::string_view meta = lines[0];
  if (meta.substr(0, kMagic.size()) != kMagic) {
    err.fail(1, 1, "expected the '" + std::string(kMagic) + "' header line");
  }
  LabeledDataset ds;
  bool have_version = false, have_classes = false;
  for (std::string_view token : split(meta.substr(kMagic.size()), ' ')) {
    if (token.empty()) continue;
    const auto eq = token.find('=');
    if (eq == std::string_view::npos) err.fail(1, 0, "malformed header entry '" + std::string(token) + "'");
    const std::string_view key = token.substr(0, eq);
    const std::string_view value = token.substr(eq + 1);
    if (key == "format_version") {
      have_version = true;
      const std::string_view major = value.substr(0, value.find('.'));
      if (major != std::string_view(kDatasetFormatVersion).substr(0, 1)) {
        err.fail(1, 0, "unsupported dataset format_version '" + std::string(value) + "' (expected " +
                           kDatasetFormatVersion + ")");
      }
    } else if (key == "sample_rate_hz") {
      if (!parse_number(value, ds.sample_rate_hz) || !(ds.sample_rate_hz > 0.0)) {
        err.fail(1, 0, "sample_rate_hz must be a positive number");
      }
    } else if (key == "frame_len") {
      if (!parse_number(value, ds.frame_len)) err.fail(1, 0, "frame_len must be a non-negative integer");
    } else if (key == "segment") {
      if (value != kSegmentSemantics) err.fail(1, 0, "unsupported segment semantics '" + std::string(value) + "'");
    } else if (key == "classes") {
      have_classes = true;
      if (!value.empty()) {
        for (std::string_view c : split(value, ';')) {
          Label label = 0;
          if (!parse_number(c, label)) err.fail(1, 0, "class '" + std::string(c) + "' is not an integer");
          ds.declared_classes.push_back(label);
        }
      }
    } else {
      err.fail(1, 0, "unknown header entry '" + std::string(key) + "'");
    }
  }
  if (!have_version) err.fail(1, 0, "header lacks format_version");
  if (!have_classes) err.fail(1, 0, "header lacks classes");
  std::sort(ds.declared_classes.begin(), ds.declared_classes.end());
  ds.declared_classes.erase(std::unique(ds.declared_classes.begin(), ds.declared_classes.end()),
                            ds.declared_classes.end());

  if (lines.size() < 2) err.fail(2, 0, "missing the column header line");
  const auto columns = split(lines[1], ',');
  const char* fixed[] = {"label", "fine_fill_percent", "material"};
  if (columns.size() < 3) err.fail(2, columns.size() + 1, "expected columns label,fine_fill_percent,material");
  for (std::size_t c = 0; c < 3; ++c) {
    if (columns[c] != fixed[c]) {
      err.fail(2, c + 1, "expected column '" + std::string(fixed[c]) + "', found '" + std::string(columns[c]) + "'");
    }
  }
  for (std::size_t c = 3; c < columns.size(); ++c) {
    if (columns[c] != "s" + std::to_string(c - 3)) {
      err.fail(2, c + 1, "expected column 's" + std::to_string(c - 3) + "', found '" + std::string(columns[c]) + "'");
    }
  }
  const std::size_t n_samples = columns.size() - 3;

  for (std::size_t li = 2; li < lines.size(); ++li) {
    const std::size_t line_no = li + 1;
    if (lines[li].find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const auto fields = split(lines[li], ',');
    if (fields.size() != columns.size()) {
      err.fail(line_no, std::min(fields.size(), columns.size()) + 1,
               "expected " + std::to_string(columns.size()) + " fields, found " + std::to_string(fields.size()));
    }
    LabeledRow row;
    if (!parse_number(fields[0], row.label)) err.fail(line_no, 1, "label '" + std::string(fields[0]) + "' is not an integer");
    if (!std::binary_search(ds.declared_classes.begin(), ds.declared_classes.end(), row.label)) {
      err.fail(line_no, 1, "label " + std::to_string(row.label) + " is not in the declared classes");
    }
    if (!parse_number(fields[1], row.fine_fill_percent)) {
      err.fail(line_no, 2, "fine_fill_percent '" + std::string(fields[1]) + "' is not a number");
    }
    row.material = std::string(fields[2]);
    row.rir.resize(n_samples);
    for (std::size_t s = 0; s < n_samples; ++s) {
      if (!parse_number(fields[s + 3], row.rir[s])) {
        err.fail(line_no, s + 4, "sample '" + std::string(fields[s + 3]) + "' is not a number");
      }
      row.rir[s] = static_cast<double>(static_cast<float>(row.rir[s]));
    }
    ds.rows.push_back(std::move(row));
  }
  return ds;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file_atomic(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp + "' for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("failed writing '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw IoError("cannot move '" + tmp + "' to '" + path + "'");
  }
}

LabeledDataset read_dataset_file(const std::string& path) { return read_dataset(read_text_file(path), path); }

void write_dataset_file(const std::string& path, const LabeledDataset& dataset) {
  write_text_file_atomic(path, write_dataset(dataset));
}

}  // namespace echolevel::io
