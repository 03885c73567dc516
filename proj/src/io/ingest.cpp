#include "echolevel/io/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "echolevel/error.hpp"
#include "echolevel/io/dataset_csv.hpp"

namespace echolevel::io {

using Json = nlohmann::json;

namespace {

bool file_exists(const std::string& path) { return std::ifstream(path).good(); }

const std::vector<std::string> kPayloadFields = {"format_version", "device_id", "timestamp", "label",
                                                 "fine_fill_percent", "material", "samples"};

IngestMessage from_json(const Json& doc, const std::string& topic, std::size_t frame_len) {
  if (!doc.is_object()) throw InputError("ingest payload must be a JSON object");
  for (const auto& item : doc.items()) {
    if (std::find(kPayloadFields.begin(), kPayloadFields.end(), item.key()) == kPayloadFields.end()) {
      throw InputError("unknown payload field '" + item.key() + "'");
    }
  }
  auto require = [&](const char* key) -> const Json& {
    if (!doc.contains(key)) throw InputError(std::string("payload lacks '") + key + "'");
    return doc.at(key);
  };

  const Json& version = require("format_version");
  if (!version.is_string() || version.get<std::string>().substr(0, 2) != "1.") {
    throw InputError("unsupported payload format_version");
  }
  IngestMessage m;
  m.topic = topic;
  const Json& device = require("device_id");
  if (!device.is_string()) throw InputError("'device_id' must be a string");
  m.device_id = device.get<std::string>();
  const Json& ts = require("timestamp");
  if (ts.is_string()) {
    m.timestamp = ts.get<std::string>();
  } else if (ts.is_number()) {
    m.timestamp = ts.dump();
  } else {
    throw InputError("'timestamp' must be a string or a number");
  }
  if (doc.contains("label") && !doc.at("label").is_null()) {
    if (!doc.at("label").is_number_integer()) throw InputError("'label' must be an integer");
    m.label = doc.at("label").get<Label>();
  }
  if (doc.contains("fine_fill_percent") && !doc.at("fine_fill_percent").is_null()) {
    if (!doc.at("fine_fill_percent").is_number()) throw InputError("'fine_fill_percent' must be a number");
    m.fine_fill_percent = doc.at("fine_fill_percent").get<double>();
  }
  if (doc.contains("material")) {
    if (!doc.at("material").is_string()) throw InputError("'material' must be a string");
    m.material = doc.at("material").get<std::string>();
    if (m.material.empty() || m.material.find_first_of(",\n\r") != std::string::npos) {
      throw InputError("'material' must be non-empty without commas or line breaks");
    }
  }
  const Json& samples = require("samples");
  if (!samples.is_array()) throw InputError("'samples' must be an array");
  if (samples.size() != frame_len) {
    throw InputError("payload has " + std::to_string(samples.size()) + " samples, expected frame_len " +
                     std::to_string(frame_len));
  }
  m.samples.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!samples[i].is_number()) throw InputError("'samples[" + std::to_string(i) + "]' must be a number");
    m.samples.push_back(samples[i].get<double>());
  }
  return m;
}

}  // namespace

IngestMessage parse_ingest_payload(std::string_view payload, const std::string& topic, std::size_t frame_len) {
  const Json doc = Json::parse(payload, nullptr, false);
  if (doc.is_discarded()) throw InputError("ingest payload is not valid JSON");
  return from_json(doc, topic, frame_len);
}

IngestMessage parse_ingest_line(std::string_view line, std::size_t frame_len) {
  const Json doc = Json::parse(line, nullptr, false);
  if (doc.is_discarded()) throw InputError("line is not valid JSON");
  if (!doc.is_object()) throw InputError("line must be a JSON object");
  for (const auto& item : doc.items()) {
    if (item.key() != "topic" && item.key() != "payload") throw InputError("unknown field '" + item.key() + "'");
  }
  std::string topic;
  if (doc.contains("topic")) {
    if (!doc.at("topic").is_string()) throw InputError("'topic' must be a string");
    topic = doc.at("topic").get<std::string>();
  }
  if (!doc.contains("payload")) throw InputError("line lacks 'payload'");
  return from_json(doc.at("payload"), topic, frame_len);
}

DatasetAppender::DatasetAppender(std::string path, double sample_rate_hz, std::size_t frame_len)
    : path_(std::move(path)) {
  if (file_exists(path_)) {
    dataset_ = read_dataset_file(path_);
    if (dataset_.sample_rate_hz != sample_rate_hz || dataset_.frame_len != frame_len) {
      throw InputError("'" + path_ + "' was recorded with a different sample rate or frame length");
    }
  } else {
    dataset_.sample_rate_hz = sample_rate_hz;
    dataset_.frame_len = frame_len;
    write_dataset_file(path_, dataset_);
  }
}

void DatasetAppender::append(const LabeledRow& row) {
  if (!dataset_.rows.empty() && dataset_.rows.front().rir.size() != row.rir.size()) {
    throw InputError("row has " + std::to_string(row.rir.size()) + " samples but '" + path_ + "' rows have " +
                     std::to_string(dataset_.rows.front().rir.size()));
  }
  const bool new_class =
      std::find(dataset_.declared_classes.begin(), dataset_.declared_classes.end(), row.label) ==
      dataset_.declared_classes.end();
  const bool first_row = dataset_.rows.empty();
  dataset_.rows.push_back(row);
  if (new_class || first_row) {
    if (new_class) {
      dataset_.declared_classes.push_back(row.label);
      std::sort(dataset_.declared_classes.begin(), dataset_.declared_classes.end());
    }
    write_dataset_file(path_, dataset_);
    return;
  }
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  if (!out) throw IoError("cannot open '" + path_ + "' for appending");
  out << dataset_row(row);
  out.flush();
  if (!out) throw IoError("failed appending to '" + path_ + "'");
}

Ingestor::Ingestor(const std::string& dataset_path, IngestOptions options)
    : options_(std::move(options)), appender_(dataset_path, options_.sweep.sample_rate_hz, options_.sweep.frame_len) {
  options_.sweep.validate();
  if (options_.row_length < 2 || options_.row_length > options_.sweep.frame_len) {
    throw ConfigError("row_length must be in [2, frame_len]");
  }
}

bool Ingestor::handle(const IngestMessage& message) {
  ++stats_.received;
  if (!message.label) {
    ++stats_.skipped_unlabeled;
    return false;
  }
  const dsp::SampledSignal recording{message.samples, options_.sweep.sample_rate_hz};
  const dsp::SampledSignal rir = dsp::recording_to_rir(recording, options_.sweep, options_.pipeline);
  LabeledRow row;
  row.rir.reserve(options_.row_length);
  for (std::size_t i = 0; i < options_.row_length; ++i) {
    row.rir.push_back(static_cast<double>(static_cast<float>(rir.samples[i])));
  }
  row.label = *message.label;
  row.fine_fill_percent = message.fine_fill_percent.value_or(static_cast<double>(*message.label));
  row.material = message.material;
  appender_.append(row);
  ++stats_.appended;
  return true;
}

IngestStats ingest_stream(std::istream& in, Ingestor& ingestor) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      ingestor.handle(parse_ingest_line(line, ingestor.options().sweep.frame_len));
    } catch (const Error& e) {
      throw InputError("stream line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return ingestor.stats();
}

IngestStats ingest_broker(mqtt::Client& client, Ingestor& ingestor, std::size_t max_messages,
                          std::chrono::milliseconds idle_timeout) {
  std::size_t seen = 0;
  while (max_messages == 0 || seen < max_messages) {
    const auto message = client.next_message(idle_timeout);
    if (!message) break;
    ++seen;
    try {
      ingestor.handle(parse_ingest_payload(message->payload, message->topic, ingestor.options().sweep.frame_len));
    } catch (const InputError& e) {
      ++ingestor.stats().rejected;
      std::cerr << "warning: ingest: message on '" << message->topic << "' rejected: " << e.what() << "\n";
    }
  }
  return ingestor.stats();
}

}  // namespace echolevel::io
