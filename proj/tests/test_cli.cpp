#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <json.hpp>
#include <sstream>

#include "echolevel/cli.hpp"
#include "echolevel/evaluation.hpp"
#include "echolevel/io/dataset_csv.hpp"
#include "echolevel/io/signal_io.hpp"
#include "oracles.hpp"

using namespace echolevel;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

// One small synthetic train/test pair shared by the CLI tests.
const std::string& data_dir() {
  static const std::string dir = [] {
    const auto d = oracle::temp_dir("cli_data");
    const auto r = cli({"synth", "--seed", "3", "--out", d, "--train-rows", "4", "--test-rows", "2"});
    REQUIRE(r.code == 0);
    return d;
  }();
  return dir;
}

}  // namespace

TEST_CASE("usage errors exit 1 with a one-line message") {
  auto r = cli({});
  CHECK(r.code == 1);
  CHECK(r.err.rfind("error: usage: ", 0) == 0);
  r = cli({"train", "--data"});
  CHECK(r.code == 1);
  r = cli({"frobnicate"});
  CHECK(r.code == 1);
  r = cli({"eval", "--data", "/nonexistent.csv"});
  CHECK(r.code == 1);
  r = cli({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("sweep-gen") != std::string::npos);
}

TEST_CASE("runtime errors exit 2 and name their kind") {
  const auto dir = oracle::temp_dir("cli_errors");
  io::write_text_file_atomic(dir + "/bad.csv", "label,x\n");
  auto r = cli({"train", "--data", dir + "/bad.csv", "--out", dir + "/m.json"});
  CHECK(r.code == 2);
  CHECK(r.err.rfind("error: format: ", 0) == 0);
  CHECK(r.err.find("bad.csv") != std::string::npos);

  r = cli({"train", "--data", data_dir() + "/train.csv", "--out", dir + "/m.json", "--segment-length", "50"});
  CHECK(r.code == 2);
  CHECK(r.err.rfind("error: config: ", 0) == 0);

  r = cli({"eval", "--data", data_dir() + "/test.csv"});
  CHECK(r.code == 2);
  CHECK(r.err.find("--model or --train") != std::string::npos);
}

TEST_CASE("synth writes both datasets") {
  const auto train = io::read_dataset_file(data_dir() + "/train.csv");
  const auto test = io::read_dataset_file(data_dir() + "/test.csv");
  CHECK(train.rows.size() == 4 * 15 * 2);
  CHECK(test.rows.size() == 2 * 15 * 2);
}

TEST_CASE("train is byte-for-byte reproducible and eval matches the library") {
  const auto dir = oracle::temp_dir("cli_train");
  const std::vector<std::string> common{"--data", data_dir() + "/train.csv", "--seed", "11", "--n-estimators", "12"};
  auto a = common;
  a.insert(a.begin(), "train");
  a.insert(a.end(), {"--out", dir + "/a.json"});
  auto b = common;
  b.insert(b.begin(), "train");
  b.insert(b.end(), {"--out", dir + "/b.json"});
  const auto ra = cli(a);
  REQUIRE(ra.code == 0);
  CHECK(ra.out.rfind("training macro-F1: ", 0) == 0);
  REQUIRE(cli(b).code == 0);
  CHECK(io::read_text_file(dir + "/a.json") == io::read_text_file(dir + "/b.json"));

  // Scoring the trained model equals iteration 0 of the repeated protocol
  // with the same base seed.
  const auto scored = cli({"eval", "--model", dir + "/a.json", "--data", data_dir() + "/test.csv"});
  REQUIRE(scored.code == 0);
  const auto repeated = cli({"eval", "--train", data_dir() + "/train.csv", "--data", data_dir() + "/test.csv", "--seed",
                             "11", "--n-estimators", "12", "--iterations", "2", "--scores-csv",
                             dir + "/scores.csv"});
  REQUIRE(repeated.code == 0);
  const auto s = nlohmann::json::parse(scored.out);
  const auto r = nlohmann::json::parse(repeated.out);
  CHECK(s["f1_scores"][0] == r["f1_scores"][0]);
  CHECK(r["iterations"] == 2);
  CHECK(io::read_text_file(dir + "/scores.csv").rfind("iteration,f1\n", 0) == 0);

  const auto text = cli({"eval", "--model", dir + "/a.json", "--data", data_dir() + "/test.csv", "--format", "text"});
  CHECK(text.out.find("confusion") != std::string::npos);
}

TEST_CASE("search prints a ranked CSV") {
  const auto dir = oracle::temp_dir("cli_search");
  io::write_text_file_atomic(dir + "/space.json",
                             R"({"segment_length": [100, 200], "n_estimators": [3, 6], "max_len": [20, 80], "min_len": [10, 20]})");
  const auto r = cli({"search", "--config", dir + "/space.json", "--train", data_dir() + "/train.csv", "--test",
                      data_dir() + "/test.csv", "--budget", "3", "--seed", "5"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("segment_length,n_estimators,max_len,min_len,random_state,f1\n", 0) == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 4);
}

TEST_CASE("sweep-gen and rir on an identity recording") {
  const auto dir = oracle::temp_dir("cli_rir");
  REQUIRE(cli({"sweep-gen", "--out", dir + "/sweep.csv"}).code == 0);
  REQUIRE(cli({"sweep-gen", "--out", dir + "/sweep.wav"}).code == 0);
  CHECK(std::filesystem::file_size(dir + "/sweep.wav") == 44 + 2 * 4096);
  REQUIRE(cli({"rir", "--input", dir + "/sweep.csv", "--out", dir + "/rir.csv", "--no-align"}).code == 0);
  const auto rir = io::read_signal_file(dir + "/rir.csv");
  const auto expected = dsp::recording_to_rir(dsp::generate_stepped_sweep(dsp::SweepConfig{}), dsp::SweepConfig{},
                                              dsp::PipelineOptions{1.0, 1e-6, dsp::WindowKind::Hann, false});
  CHECK(rir.samples == expected.samples);
}

TEST_CASE("codegen writes a source that compiles") {
  const auto dir = oracle::temp_dir("cli_codegen");
  REQUIRE(cli({"train", "--data", data_dir() + "/train.csv", "--out", dir + "/m.json", "--n-estimators", "3"}).code ==
          0);
  REQUIRE(cli({"codegen", "--model", dir + "/m.json", "--out", dir + "/model.cpp"}).code == 0);
  const std::string cmd = std::string(ECHOLEVEL_CXX_COMPILER) + " -std=c++17 -Wall -Werror -c " + dir +
                          "/model.cpp -o " + dir + "/model.o";
  CHECK(std::system(cmd.c_str()) == 0);
}

TEST_CASE("ingest from a stream file") {
  const auto dir = oracle::temp_dir("cli_ingest");
  std::vector<double> silent(4096, 0.0);
  silent[2048] = 1.0;
  nlohmann::json payload = {{"format_version", "1.0"}, {"device_id", "d"}, {"timestamp", 0}, {"label", 50},
                            {"samples", silent}};
  io::write_text_file_atomic(dir + "/in.jsonl",
                             nlohmann::json({{"topic", "echolevel/d"}, {"payload", payload}}).dump() + "\n");
  const auto r = cli({"ingest", "--stream", dir + "/in.jsonl", "--out", dir + "/live.csv", "--row-length", "64"});
  REQUIRE(r.code == 0);
  CHECK(r.out == "received 1, appended 1, skipped unlabeled 0, rejected 0\n");
  CHECK(io::read_dataset_file(dir + "/live.csv").rows.at(0).rir.size() == 64);
  ::unsetenv("ECHOLEVEL_BROKER");
  CHECK(cli({"ingest", "--out", dir + "/x.csv"}).code == 2);
}
