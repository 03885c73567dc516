#pragma once

#include <chrono>
#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "echolevel/dataset.hpp"
#include "echolevel/dsp.hpp"
#include "echolevel/io/mqtt.hpp"

namespace echolevel::io {

/// One recorded frame sent by a device. Payload JSON:
///   {"format_version": "1.0", "device_id": "lid-3", "timestamp": "2024-05-01T10:00:00Z",
///    "label": 25, "fine_fill_percent": 20, "material": "straw", "samples": [...]}
/// label, fine_fill_percent and material are optional.
struct IngestMessage {
  std::string topic;
  std::string device_id;
  std::string timestamp;
  std::optional<Label> label;
  std::optional<double> fine_fill_percent;
  std::string material = "unknown";
  std::vector<double> samples;
};

IngestMessage parse_ingest_payload(std::string_view payload, const std::string& topic, std::size_t frame_len);

/// Stream line: {"topic": "...", "payload": {...}}.
IngestMessage parse_ingest_line(std::string_view line, std::size_t frame_len);

/// Dataset file that grows one row at a time. Rows are appended and flushed;
/// when a row brings a new class (or the file has no sample columns yet) the
/// whole file is rewritten to a temporary and renamed into place.
class DatasetAppender {
 public:
  DatasetAppender(std::string path, double sample_rate_hz, std::size_t frame_len);

  void append(const LabeledRow& row);
  const LabeledDataset& dataset() const { return dataset_; }

 private:
  std::string path_;
  LabeledDataset dataset_;
};

struct IngestOptions {
  dsp::SweepConfig sweep;
  dsp::PipelineOptions pipeline;
  std::size_t row_length = 512;
};

struct IngestStats {
  std::size_t received = 0;
  std::size_t appended = 0;
  std::size_t skipped_unlabeled = 0;
  std::size_t rejected = 0;
};

/// Turns labeled recording frames into RIR rows of a dataset file.
/// Unlabeled frames are counted and skipped.
class Ingestor {
 public:
  Ingestor(const std::string& dataset_path, IngestOptions options);

  /// Returns true when the message produced a row.
  bool handle(const IngestMessage& message);

  const IngestStats& stats() const { return stats_; }
  IngestStats& stats() { return stats_; }
  const IngestOptions& options() const { return options_; }

 private:
  IngestOptions options_;
  DatasetAppender appender_;
  IngestStats stats_;
};

/// Newline-delimited messages; blank lines are ignored. A malformed line
/// raises InputError naming its line number.
IngestStats ingest_stream(std::istream& in, Ingestor& ingestor);

/// Consumes PUBLISH messages until `max_messages` have arrived (0 = no limit)
/// or nothing arrives for `idle_timeout`. Malformed payloads are reported on
/// stderr and skipped so one bad device cannot stop the consumer.
IngestStats ingest_broker(mqtt::Client& client, Ingestor& ingestor, std::size_t max_messages,
                          std::chrono::milliseconds idle_timeout);

}  // namespace echolevel::io
