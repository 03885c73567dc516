#include "echolevel/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "echolevel/error.hpp"
#include "echolevel/evaluation.hpp"
#include "echolevel/io/config_json.hpp"
#include "echolevel/io/dataset_csv.hpp"
#include "echolevel/io/ingest.hpp"
#include "echolevel/io/signal_io.hpp"
#include "echolevel/search.hpp"
#include "echolevel/sirec.hpp"
#include "echolevel/synth.hpp"

namespace echolevel {

namespace {

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

// Writes to the named file, or to `out` when the path is empty or "-".
void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    io::write_text_file_atomic(path, text);
  }
}

dsp::WindowKind parse_window(const std::string& name) {
  if (name == "hann") return dsp::WindowKind::Hann;
  if (name == "rectangular") return dsp::WindowKind::Rectangular;
  throw ConfigError("window must be hann or rectangular");
}

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format;

  // sweep-gen / rir
  std::string input;
  double alpha = 1.0;
  double epsilon = 1e-6;
  std::string window = "hann";
  bool no_align = false;

  // synth
  std::optional<std::size_t> train_rows;
  std::optional<std::size_t> test_rows;

  // train / eval / search
  std::string data;
  std::string train;
  std::string test;
  std::string model;
  std::optional<std::size_t> segment_length;
  std::optional<std::size_t> n_estimators;
  std::optional<std::size_t> min_len;
  std::optional<std::size_t> max_len;
  std::size_t iterations = 0;
  std::size_t budget = 20;
  std::string scores_csv;
  std::string train_config;

  // ingest
  std::string stream;
  std::string topic = "echolevel/#";
  std::string client_id = "echolevel-ingest";
  std::size_t max_messages = 0;
  std::size_t idle_timeout_ms = 30000;
  std::size_t row_length = 512;
};

sirec::TrainConfig train_config(const Options& o, const std::string& config_path) {
  sirec::TrainConfig c = config_path.empty() ? sirec::TrainConfig{} : io::load_train_config(config_path);
  if (o.segment_length) c.segment_length = *o.segment_length;
  if (o.n_estimators) c.n_estimators = *o.n_estimators;
  if (o.min_len) c.bounds.min_len = *o.min_len;
  if (o.max_len) c.bounds.max_len = *o.max_len;
  if (o.seed) c.random_state = *o.seed;
  c.validate();
  return c;
}

void add_train_overrides(CLI::App* cmd, Options& o) {
  cmd->add_option("--segment-length", o.segment_length, "Leading RIR samples used per row");
  cmd->add_option("--n-estimators", o.n_estimators, "Number of trees");
  cmd->add_option("--min-len", o.min_len, "Shortest interval length");
  cmd->add_option("--max-len", o.max_len, "Longest interval length");
}

int cmd_sweep_gen(const Options& o, std::ostream& out) {
  const dsp::SweepConfig cfg = o.config.empty() ? dsp::SweepConfig{} : io::load_sweep_config(o.config);
  const dsp::SampledSignal sweep = dsp::generate_stepped_sweep(cfg);
  if (o.out.empty() || o.out == "-") {
    if (o.format == "wav") throw ConfigError("WAV output needs --out <file>");
    out << io::write_signal_csv(sweep);
    return 0;
  }
  io::SignalFormat format = io::format_for_path(o.out);
  if (o.format == "wav") format = io::SignalFormat::Wav;
  if (o.format == "csv") format = io::SignalFormat::Csv;
  io::write_signal_file(o.out, sweep, format);
  return 0;
}

int cmd_rir(const Options& o, std::ostream& out) {
  const dsp::SweepConfig cfg = o.config.empty() ? dsp::SweepConfig{} : io::load_sweep_config(o.config);
  const dsp::SampledSignal recording = io::read_signal_file(o.input);
  dsp::PipelineOptions opts;
  opts.alpha = o.alpha;
  opts.relative_epsilon = o.epsilon;
  opts.window = parse_window(o.window);
  opts.align_to_onset = !o.no_align;
  const dsp::SampledSignal rir = dsp::recording_to_rir(recording, cfg, opts);
  if (o.out.empty() || o.out == "-") {
    out << io::write_signal_csv(rir);
  } else {
    io::write_signal_file(o.out, rir);
  }
  return 0;
}

int cmd_synth(const Options& o, std::ostream& out) {
  synth::SceneConfig cfg = o.config.empty() ? synth::SceneConfig{} : io::load_scene_config(o.config);
  if (o.train_rows) cfg.train_rows_per_fine_fill = *o.train_rows;
  if (o.test_rows) cfg.test_rows_per_fine_fill = *o.test_rows;
  const auto [train, test] = synth::generate_train_test(cfg, o.seed.value_or(1));
  std::filesystem::create_directories(o.out);
  const std::string train_path = (std::filesystem::path(o.out) / "train.csv").string();
  const std::string test_path = (std::filesystem::path(o.out) / "test.csv").string();
  io::write_dataset_file(train_path, train);
  io::write_dataset_file(test_path, test);
  out << "wrote " << train.rows.size() << " rows to " << train_path << " and " << test.rows.size() << " rows to "
      << test_path << "\n";
  return 0;
}

int cmd_train(const Options& o, std::ostream& out) {
  const LabeledDataset data = io::read_dataset_file(o.data);
  const sirec::TrainConfig config = train_config(o, o.config);
  const sirec::SirecModel model = sirec::fit(data, config);
  io::write_text_file_atomic(o.out, sirec::serialize(model));
  char line[128];
  std::snprintf(line, sizeof line, "training macro-F1: %.6f\n", evaluation::f1_macro(data.labels(), model.predict(data)));
  out << line;
  return 0;
}

std::string render_report(const evaluation::EvalReport& report, const std::string& format) {
  if (format == "csv") return report.scores_csv();
  if (format == "text") return report.to_text();
  return report.to_json();
}

int cmd_eval(const Options& o, std::ostream& out) {
  const LabeledDataset test = io::read_dataset_file(o.data);
  evaluation::EvalReport report;
  if (!o.model.empty()) {
    if (!o.train.empty()) throw ConfigError("use either --model or --train, not both");
    const sirec::SirecModel model = sirec::deserialize(io::read_text_file(o.model));
    report = evaluation::evaluate_model(model, test);
  } else {
    if (o.train.empty()) throw ConfigError("eval needs --model or --train");
    const LabeledDataset train = io::read_dataset_file(o.train);
    const sirec::TrainConfig config = train_config(o, o.config);
    report = evaluation::run_repeated_eval(train, test, config, o.iterations ? o.iterations : 1, config.random_state);
  }
  emit(o.out, render_report(report, o.format), out);
  if (!o.scores_csv.empty()) io::write_text_file_atomic(o.scores_csv, report.scores_csv());
  return 0;
}

int cmd_search(const Options& o, std::ostream& out) {
  const LabeledDataset train = io::read_dataset_file(o.train);
  const LabeledDataset test = io::read_dataset_file(o.test);
  const search::SearchSpace space = o.config.empty() ? search::SearchSpace{} : io::load_search_space(o.config);
  const auto results = search::stochastic_search(train, test, space, o.budget, o.seed.value_or(0));
  emit(o.out, o.format == "json" ? search::results_json(results) : search::results_csv(results), out);
  return 0;
}

int cmd_codegen(const Options& o, std::ostream& out) {
  const sirec::SirecModel model = sirec::deserialize(io::read_text_file(o.model));
  emit(o.out, sirec::export_portable_source(model), out);
  return 0;
}

int cmd_ingest(const Options& o, std::ostream& out) {
  io::IngestOptions opts;
  if (!o.config.empty()) opts.sweep = io::load_sweep_config(o.config);
  opts.row_length = o.row_length;
  io::Ingestor ingestor(o.out, opts);
  io::IngestStats stats;
  if (!o.stream.empty()) {
    if (o.stream == "-") {
      stats = io::ingest_stream(std::cin, ingestor);
    } else {
      std::ifstream in(o.stream);
      if (!in) throw IoError("cannot open '" + o.stream + "' for reading");
      stats = io::ingest_stream(in, ingestor);
    }
  } else {
    const char* broker = std::getenv("ECHOLEVEL_BROKER");
    if (!broker || !*broker) throw ConfigError("ingest needs --stream or the ECHOLEVEL_BROKER environment variable");
    io::mqtt::Client client;
    client.connect(io::mqtt::parse_broker_address(broker), o.client_id);
    client.subscribe(o.topic);
    stats = io::ingest_broker(client, ingestor, o.max_messages, std::chrono::milliseconds(o.idle_timeout_ms));
    client.disconnect();
  }
  out << "received " << stats.received << ", appended " << stats.appended << ", skipped unlabeled "
      << stats.skipped_unlabeled << ", rejected " << stats.rejected << "\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Container fill-level sensing from sweep recordings: RIR estimation, SIREC training and export"};
  app.name("echolevel");
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* cmd, bool seed) {
    cmd->add_option("--config", o.config, "JSON config file")->check(CLI::ExistingFile);
    if (seed) cmd->add_option("--seed", o.seed, "Random seed");
  };

  auto* sweep = app.add_subcommand("sweep-gen", "Write the stepped sweep frame as CSV or PCM16 WAV");
  common(sweep, false);
  sweep->add_option("--out", o.out, "Output file (.wav selects WAV); stdout when omitted");
  sweep->add_option("--format", o.format, "csv or wav")->check(CLI::IsMember({"csv", "wav"}));

  auto* rir = app.add_subcommand("rir", "Recording -> spectral subtraction -> RIR estimate");
  common(rir, false);
  rir->add_option("--input", o.input, "Recording (CSV or WAV)")->required()->check(CLI::ExistingFile);
  rir->add_option("--out", o.out, "Output RIR file; stdout when omitted");
  rir->add_option("--alpha", o.alpha, "Noise over-subtraction factor");
  rir->add_option("--epsilon", o.epsilon, "Reference bins below epsilon * peak are zeroed");
  rir->add_option("--window", o.window, "hann or rectangular")->check(CLI::IsMember({"hann", "rectangular"}));
  rir->add_flag("--no-align", o.no_align, "Keep the RIR in frame coordinates instead of rotating it to the onset");

  auto* syn = app.add_subcommand("synth", "Generate synthetic train/test datasets from a scene");
  common(syn, true);
  syn->add_option("--out", o.out, "Output directory for train.csv and test.csv")->required();
  syn->add_option("--train-rows", o.train_rows, "Rows per fine fill level in train.csv");
  syn->add_option("--test-rows", o.test_rows, "Rows per fine fill level in test.csv");

  auto* train = app.add_subcommand("train", "Fit a SIREC model and write it as JSON");
  common(train, true);
  train->add_option("--data", o.data, "Training dataset CSV")->required()->check(CLI::ExistingFile);
  train->add_option("--out", o.out, "Model file")->required();
  add_train_overrides(train, o);

  auto* eval = app.add_subcommand("eval", "Score a model, or run the repeated train/test protocol");
  common(eval, true);
  eval->add_option("--data", o.data, "Test dataset CSV")->required()->check(CLI::ExistingFile);
  eval->add_option("--model", o.model, "Model file to score")->check(CLI::ExistingFile);
  eval->add_option("--train", o.train, "Training dataset for repeated evaluation")->check(CLI::ExistingFile);
  eval->add_option("--iterations", o.iterations, "Repetitions with seeds seed, seed+1, ...");
  eval->add_option("--out", o.out, "Report file; stdout when omitted");
  eval->add_option("--format", o.format, "json, csv or text")->check(CLI::IsMember({"json", "csv", "text"}));
  eval->add_option("--scores-csv", o.scores_csv, "Also write per-iteration scores here");
  add_train_overrides(eval, o);

  auto* srch = app.add_subcommand("search", "Stochastic search over SIREC hyperparameters");
  common(srch, true);
  srch->add_option("--train", o.train, "Training dataset CSV")->required()->check(CLI::ExistingFile);
  srch->add_option("--test", o.test, "Test dataset CSV")->required()->check(CLI::ExistingFile);
  srch->add_option("--budget", o.budget, "Number of sampled configurations");
  srch->add_option("--out", o.out, "Results file; stdout when omitted");
  srch->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  auto* gen = app.add_subcommand("codegen", "Emit a dependency-free C++ source for a model");
  gen->add_option("--model", o.model, "Model file")->required()->check(CLI::ExistingFile);
  gen->add_option("--out", o.out, "Source file; stdout when omitted");

  auto* ing = app.add_subcommand("ingest", "Append labeled recordings from a stream or MQTT broker to a dataset");
  common(ing, false);
  ing->add_option("--out", o.out, "Dataset CSV to create or extend")->required();
  ing->add_option("--stream", o.stream, "Newline-delimited JSON messages ('-' for stdin); broker otherwise");
  ing->add_option("--topic", o.topic, "MQTT topic filter");
  ing->add_option("--client-id", o.client_id, "MQTT client id");
  ing->add_option("--max-messages", o.max_messages, "Stop after this many messages (0 = no limit)");
  ing->add_option("--idle-timeout-ms", o.idle_timeout_ms, "Stop when the broker is silent this long");
  ing->add_option("--row-length", o.row_length, "RIR samples stored per row");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << one_line(e.what()) << "\n";
    return 1;
  }

  try {
    if (sweep->parsed()) return cmd_sweep_gen(o, out);
    if (rir->parsed()) return cmd_rir(o, out);
    if (syn->parsed()) return cmd_synth(o, out);
    if (train->parsed()) return cmd_train(o, out);
    if (eval->parsed()) {
      if (o.format.empty()) o.format = "json";
      return cmd_eval(o, out);
    }
    if (srch->parsed()) return cmd_search(o, out);
    if (gen->parsed()) return cmd_codegen(o, out);
    if (ing->parsed()) return cmd_ingest(o, out);
  } catch (const Error& e) {
    err << "error: " << e.kind() << ": " << one_line(e.what()) << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: internal: " << one_line(e.what()) << "\n";
    return 2;
  }
  return 1;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace echolevel
