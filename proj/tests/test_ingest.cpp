#include <doctest.h>

#include <json.hpp>
#include <sstream>

#include "echolevel/error.hpp"
#include "echolevel/io/dataset_csv.hpp"
#include "echolevel/io/ingest.hpp"
#include "echolevel/synth.hpp"
#include "fake_broker.hpp"
#include "oracles.hpp"

using namespace echolevel;
using namespace echolevel::io;

namespace {

std::vector<double> recording(Label label, std::uint64_t seed) {
  const synth::SceneConfig cfg;
  Rng rng(seed);
  const auto ir = synth::make_class_ir(label, static_cast<double>(label), rng, cfg);
  return synth::simulate_recording(ir, dsp::generate_stepped_sweep(cfg.sweep), cfg.snr_db, rng).samples;
}

std::string payload(const std::vector<double>& samples, std::optional<Label> label, const std::string& device = "lid-1") {
  nlohmann::ordered_json doc;
  doc["format_version"] = "1.0";
  doc["device_id"] = device;
  doc["timestamp"] = "2024-05-01T10:00:00Z";
  if (label) doc["label"] = *label;
  doc["material"] = "straw";
  doc["samples"] = samples;
  return doc.dump();
}

std::string line(const std::string& topic, const std::string& body) {
  return R"({"topic": ")" + topic + R"(", "payload": )" + body + "}\n";
}

}  // namespace

TEST_CASE("payload parsing") {
  const auto samples = recording(25, 1);
  const auto m = parse_ingest_payload(payload(samples, 25), "echolevel/lid-1", 4096);
  CHECK(m.device_id == "lid-1");
  CHECK(m.label == 25);
  CHECK_FALSE(m.fine_fill_percent);
  CHECK(m.samples == samples);
  CHECK(m.topic == "echolevel/lid-1");

  const auto numeric_time = parse_ingest_payload(
      R"({"format_version": "1.2", "device_id": "d", "timestamp": 1714557600, "samples": [0, 1]})", "t", 2);
  CHECK(numeric_time.timestamp == "1714557600");
  CHECK_FALSE(numeric_time.label);

  CHECK_THROWS_AS(parse_ingest_payload(payload(samples, 25), "t", 2048), InputError);
  CHECK_THROWS_AS(parse_ingest_payload(R"({"format_version": "2.0", "device_id": "d", "timestamp": 1, "samples": [0]})",
                                       "t", 1),
                  InputError);
  CHECK_THROWS_AS(parse_ingest_payload(R"({"format_version": "1.0", "device_id": "d", "timestamp": 1, "samples": [0], "x": 1})",
                                       "t", 1),
                  InputError);
  CHECK_THROWS_AS(parse_ingest_payload("nope", "t", 1), InputError);
}

TEST_CASE("stream ingest appends labeled frames and skips unlabeled ones") {
  const auto dir = oracle::temp_dir("ingest_stream");
  const std::string out = dir + "/live.csv";
  std::stringstream in;
  const auto r0 = recording(0, 1), r1 = recording(0, 2), r2 = recording(100, 3), r3 = recording(50, 4);
  in << line("echolevel/a", payload(r0, 0)) << "\n"
     << line("echolevel/a", payload(r1, 0)) << line("echolevel/b", payload(r2, std::nullopt))
     << line("echolevel/b", payload(r2, 100)) << line("echolevel/c", payload(r3, 50));
  Ingestor ingestor(out, IngestOptions{});
  const auto stats = ingest_stream(in, ingestor);
  CHECK(stats.received == 5);
  CHECK(stats.appended == 4);
  CHECK(stats.skipped_unlabeled == 1);

  const auto ds = read_dataset_file(out);
  REQUIRE(ds.rows.size() == 4);
  CHECK(ds.classes() == std::vector<Label>{0, 50, 100});
  CHECK(ds.labels() == std::vector<Label>{0, 0, 100, 50});
  // Each row is the float-rounded leading RIR of its recording.
  const auto rir = dsp::recording_to_rir({r2, 10000.0}, dsp::SweepConfig{}).samples;
  for (std::size_t i = 0; i < 512; ++i) REQUIRE(ds.rows[2].rir[i] == static_cast<double>(static_cast<float>(rir[i])));
  CHECK(ds.rows[2].fine_fill_percent == 100.0);
  CHECK(ds.rows[2].material == "straw");

  // Reopening continues the same file.
  Ingestor again(out, IngestOptions{});
  std::stringstream more(line("echolevel/a", payload(r1, 25)));
  ingest_stream(more, again);
  const auto grown = read_dataset_file(out);
  CHECK(grown.rows.size() == 5);
  CHECK(grown.classes() == std::vector<Label>{0, 25, 50, 100});
}

TEST_CASE("a malformed stream line stops with its line number") {
  const auto dir = oracle::temp_dir("ingest_bad");
  Ingestor ingestor(dir + "/x.csv", IngestOptions{});
  std::stringstream in(line("t", payload(recording(0, 1), 0)) + "{\"topic\": \"t\"}\n");
  try {
    ingest_stream(in, ingestor);
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("stream line 2") != std::string::npos);
  }
  CHECK(read_dataset_file(dir + "/x.csv").rows.size() == 1);
}

TEST_CASE("an empty new dataset file is valid") {
  const auto dir = oracle::temp_dir("ingest_empty");
  Ingestor ingestor(dir + "/e.csv", IngestOptions{});
  CHECK(read_dataset_file(dir + "/e.csv").rows.empty());
}

TEST_CASE("broker ingest skips bad payloads and keeps going") {
  const auto dir = oracle::temp_dir("ingest_broker");
  fixture::FakeBroker broker({{"echolevel/a", payload(recording(0, 1), 0)},
                              {"echolevel/a", "garbage"},
                              {"echolevel/b", payload(recording(75, 2), 75)}});
  mqtt::Client client;
  client.connect({"127.0.0.1", broker.port()}, "ingest-test");
  client.subscribe("echolevel/#");
  Ingestor ingestor(dir + "/b.csv", IngestOptions{});
  const auto stats = ingest_broker(client, ingestor, 0, std::chrono::milliseconds(300));
  client.disconnect();
  CHECK(stats.appended == 2);
  CHECK(stats.rejected == 1);
  CHECK(read_dataset_file(dir + "/b.csv").labels() == std::vector<Label>{0, 75});
}
