#include "echolevel/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <json.hpp>
#include <memory>
#include <numeric>
#include <sstream>

#include "echolevel/error.hpp"

namespace echolevel::evaluation {

namespace {

void require_same_length(std::span<const Label> y_true, std::span<const Label> y_pred) {
  if (y_true.size() != y_pred.size()) {
    throw InputError("y_true has " + std::to_string(y_true.size()) + " labels but y_pred has " +
                     std::to_string(y_pred.size()));
  }
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

double f1_macro(std::span<const Label> y_true, std::span<const Label> y_pred) {
  require_same_length(y_true, y_pred);
  if (y_true.empty()) throw InputError("f1_macro needs at least one label");

  std::vector<Label> classes(y_true.begin(), y_true.end());
  classes.insert(classes.end(), y_pred.begin(), y_pred.end());
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());

  double total = 0.0;
  for (Label c : classes) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
      const bool t = y_true[i] == c;
      const bool p = y_pred[i] == c;
      tp += t && p;
      fp += !t && p;
      fn += t && !p;
    }
    // 2PR/(P+R) == 2tp/(2tp+fp+fn); zero when tp == 0.
    if (tp > 0) total += 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
  }
  return total / static_cast<double>(classes.size());
}

ConfusionMatrix confusion_counts(std::span<const Label> y_true, std::span<const Label> y_pred,
                                 std::span<const Label> classes) {
  require_same_length(y_true, y_pred);
  ConfusionMatrix m;
  m.classes.assign(classes.begin(), classes.end());
  const std::size_t n = m.classes.size();
  m.counts.assign(n, std::vector<std::size_t>(n, 0));
  auto index_of = [&](Label label) {
    auto it = std::find(m.classes.begin(), m.classes.end(), label);
    if (it == m.classes.end()) throw InputError("label " + std::to_string(label) + " is not in the class list");
    return static_cast<std::size_t>(it - m.classes.begin());
  };
  for (std::size_t i = 0; i < y_true.size(); ++i) ++m.counts[index_of(y_true[i])][index_of(y_pred[i])];
  return m;
}

void normalize_rows(ConfusionMatrix& m) {
  const std::size_t n = m.classes.size();
  m.rates.assign(n, std::vector<double>(n, 0.0));
  m.zero_support.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t support = std::accumulate(m.counts[i].begin(), m.counts[i].end(), std::size_t{0});
    if (support == 0) {
      m.zero_support[i] = true;
      continue;
    }
    for (std::size_t j = 0; j < n; ++j) {
      m.rates[i][j] = static_cast<double>(m.counts[i][j]) / static_cast<double>(support);
    }
  }
}

ConfusionMatrix confusion_matrix_normalized(std::span<const Label> y_true, std::span<const Label> y_pred,
                                            std::span<const Label> classes) {
  ConfusionMatrix m = confusion_counts(y_true, y_pred, classes);
  normalize_rows(m);
  return m;
}

Summary summarize(std::span<const double> values) {
  if (values.empty()) return {};
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
  };
  Summary s;
  s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(sorted.size());
  s.median = quantile(0.5);
  s.q1 = quantile(0.25);
  s.q3 = quantile(0.75);
  s.min = sorted.front();
  s.max = sorted.back();
  return s;
}

std::string EvalReport::to_json(bool include_timings) const {
  nlohmann::ordered_json doc;
  doc["format_version"] = "1.0";
  doc["classifier"] = classifier;
  doc["base_seed"] = base_seed;
  doc["iterations"] = f1_scores.size();
  doc["f1_scores"] = f1_scores;
  doc["summary"] = {{"mean", summary.mean}, {"median", summary.median}, {"q1", summary.q1},
                    {"q3", summary.q3},     {"min", summary.min},       {"max", summary.max}};
  doc["confusion"] = {{"classes", confusion.classes},
                      {"rates", confusion.rates},
                      {"counts", confusion.counts},
                      {"zero_support", confusion.zero_support}};
  if (include_timings) doc["timing"] = {{"fit_seconds", fit_seconds}, {"predict_seconds", predict_seconds}};
  return doc.dump(2) + "\n";
}

std::string EvalReport::to_text() const {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "classifier %s, %zu iteration(s), base seed %llu\n", classifier.c_str(),
                f1_scores.size(), static_cast<unsigned long long>(base_seed));
  out << line;
  std::snprintf(line, sizeof line, "macro-F1  mean %.4f  median %.4f  q1 %.4f  q3 %.4f  min %.4f  max %.4f\n",
                summary.mean, summary.median, summary.q1, summary.q3, summary.min, summary.max);
  out << line;
  std::snprintf(line, sizeof line, "time      fit %.3f s  predict %.3f s\n", fit_seconds, predict_seconds);
  out << line << "\nconfusion (rows: true, normalised)\n";
  out << "true\\pred";
  for (Label c : confusion.classes) {
    std::snprintf(line, sizeof line, "%8lld", static_cast<long long>(c));
    out << line;
  }
  out << "\n";
  for (std::size_t i = 0; i < confusion.classes.size(); ++i) {
    std::snprintf(line, sizeof line, "%9lld", static_cast<long long>(confusion.classes[i]));
    out << line;
    for (double r : confusion.rates[i]) {
      std::snprintf(line, sizeof line, "%8.3f", r);
      out << line;
    }
    out << (confusion.zero_support[i] ? "   (no support)\n" : "\n");
  }
  return out.str();
}

std::string EvalReport::scores_csv() const {
  std::ostringstream out;
  out << "iteration,f1\n";
  char line[64];
  for (std::size_t i = 0; i < f1_scores.size(); ++i) {
    std::snprintf(line, sizeof line, "%zu,%.17g\n", i, f1_scores[i]);
    out << line;
  }
  return out.str();
}

ClassifierHandle classifier_adapter(std::string name, std::function<void(const LabeledDataset&, std::uint64_t)> fit_fn,
                                    std::function<std::vector<Label>(const LabeledDataset&)> predict_fn) {
  if (!fit_fn || !predict_fn) throw ConfigError("classifier adapter needs both fit and predict functions");
  return {std::move(name), std::move(fit_fn), std::move(predict_fn)};
}

ClassifierHandle sirec_classifier(const sirec::TrainConfig& config) {
  auto model = std::make_shared<sirec::SirecModel>();
  return classifier_adapter(
      "SIREC",
      [model, config](const LabeledDataset& train, std::uint64_t seed) {
        sirec::TrainConfig c = config;
        c.random_state = seed;
        *model = sirec::fit(train, c);
      },
      [model](const LabeledDataset& test) { return model->predict(test); });
}

std::uint64_t iteration_seed(std::uint64_t base_seed, std::size_t iteration) {
  return base_seed + static_cast<std::uint64_t>(iteration);
}

EvalReport run_repeated_eval(const LabeledDataset& train, const LabeledDataset& test, const ClassifierHandle& classifier,
                             std::size_t iterations, std::uint64_t base_seed) {
  if (iterations < 1) throw ConfigError("iterations must be at least 1");
  if (test.rows.empty()) throw InputError("test dataset is empty");

  EvalReport report;
  report.classifier = classifier.name;
  report.base_seed = base_seed;
  report.f1_scores.assign(iterations, 0.0);

  std::vector<Label> classes = train.classes();
  const auto test_classes = test.classes();
  classes.insert(classes.end(), test_classes.begin(), test_classes.end());
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());

  const auto y_true = test.labels();
  ConfusionMatrix pooled = confusion_counts({}, {}, classes);

  for (std::size_t i = 0; i < iterations; ++i) {
    std::vector<Label> y_pred;
    try {
      auto start = Clock::now();
      classifier.fit(train, iteration_seed(base_seed, i));
      report.fit_seconds += seconds_since(start);
      start = Clock::now();
      y_pred = classifier.predict(test);
      report.predict_seconds += seconds_since(start);
    } catch (const std::exception& e) {
      throw EvaluationError("iteration " + std::to_string(i) + " of " + classifier.name + " failed: " + e.what());
    }
    if (y_pred.size() != y_true.size()) {
      throw EvaluationError("iteration " + std::to_string(i) + ": classifier returned " +
                            std::to_string(y_pred.size()) + " predictions for " + std::to_string(y_true.size()) +
                            " rows");
    }
    report.f1_scores[i] = f1_macro(y_true, y_pred);
    const ConfusionMatrix m = confusion_counts(y_true, y_pred, classes);
    for (std::size_t r = 0; r < classes.size(); ++r) {
      for (std::size_t c = 0; c < classes.size(); ++c) pooled.counts[r][c] += m.counts[r][c];
    }
  }
  normalize_rows(pooled);
  report.confusion = std::move(pooled);
  report.summary = summarize(report.f1_scores);
  return report;
}

EvalReport run_repeated_eval(const LabeledDataset& train, const LabeledDataset& test, const sirec::TrainConfig& config,
                             std::size_t iterations, std::uint64_t base_seed) {
  return run_repeated_eval(train, test, sirec_classifier(config), iterations, base_seed);
}

EvalReport evaluate_model(const sirec::SirecModel& model, const LabeledDataset& test) {
  if (test.rows.empty()) throw InputError("test dataset is empty");
  EvalReport report;
  report.classifier = "SIREC";
  report.base_seed = model.config.random_state;
  std::vector<Label> classes = model.classes;
  const auto test_classes = test.classes();
  classes.insert(classes.end(), test_classes.begin(), test_classes.end());
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());

  const auto start = Clock::now();
  const auto y_pred = model.predict(test);
  report.predict_seconds = seconds_since(start);
  const auto y_true = test.labels();
  report.f1_scores = {f1_macro(y_true, y_pred)};
  report.summary = summarize(report.f1_scores);
  report.confusion = confusion_matrix_normalized(y_true, y_pred, classes);
  return report;
}

}  // namespace echolevel::evaluation
