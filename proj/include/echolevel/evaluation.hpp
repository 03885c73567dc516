#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "echolevel/dataset.hpp"
#include "echolevel/sirec.hpp"

namespace echolevel::evaluation {

/// Unweighted mean of per-class F1 over the classes appearing in either
/// sequence. A class with precision + recall = 0 scores 0.
double f1_macro(std::span<const Label> y_true, std::span<const Label> y_pred);

/// Confusion matrix normalised over true labels: rates[i][j] is the share of
/// rows with true class i predicted as j. Rows without support stay zero and
/// are flagged in `zero_support`.
struct ConfusionMatrix {
  std::vector<Label> classes;
  std::vector<std::vector<std::size_t>> counts;
  std::vector<std::vector<double>> rates;
  std::vector<bool> zero_support;
};

ConfusionMatrix confusion_counts(std::span<const Label> y_true, std::span<const Label> y_pred,
                                 std::span<const Label> classes);
void normalize_rows(ConfusionMatrix& matrix);
ConfusionMatrix confusion_matrix_normalized(std::span<const Label> y_true, std::span<const Label> y_pred,
                                            std::span<const Label> classes);

struct Summary {
  double mean = 0.0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double min = 0.0;
  double max = 0.0;
};

/// Box-plot statistics; quartiles use linear interpolation between order
/// statistics.
Summary summarize(std::span<const double> values);

struct EvalReport {
  std::string classifier;
  std::uint64_t base_seed = 0;
  std::vector<double> f1_scores;  // indexed by iteration
  Summary summary;
  ConfusionMatrix confusion;  // pooled over all iterations
  double fit_seconds = 0.0;
  double predict_seconds = 0.0;

  std::string to_json(bool include_timings = true) const;
  std::string to_text() const;
  /// iteration,f1 rows for external plotting.
  std::string scores_csv() const;
};

/// Pluggable classifier for the repeated protocol. `fit` receives the
/// iteration's seed; `predict` labels every row of a dataset.
struct ClassifierHandle {
  std::string name;
  std::function<void(const LabeledDataset& train, std::uint64_t seed)> fit;
  std::function<std::vector<Label>(const LabeledDataset& test)> predict;
};

ClassifierHandle classifier_adapter(std::string name,
                                    std::function<void(const LabeledDataset&, std::uint64_t)> fit_fn,
                                    std::function<std::vector<Label>(const LabeledDataset&)> predict_fn);

/// SIREC behind the adapter interface; the seed becomes random_state.
ClassifierHandle sirec_classifier(const sirec::TrainConfig& config);

/// Seed of iteration i: base_seed + i (mod 2^64). Iteration 0 therefore
/// trains with random_state == base_seed.
std::uint64_t iteration_seed(std::uint64_t base_seed, std::size_t iteration);

EvalReport run_repeated_eval(const LabeledDataset& train, const LabeledDataset& test, const ClassifierHandle& classifier,
                             std::size_t iterations, std::uint64_t base_seed);

EvalReport run_repeated_eval(const LabeledDataset& train, const LabeledDataset& test, const sirec::TrainConfig& config,
                             std::size_t iterations, std::uint64_t base_seed);

/// Single-model report: one score plus the confusion matrix on `test`.
EvalReport evaluate_model(const sirec::SirecModel& model, const LabeledDataset& test);

}  // namespace echolevel::evaluation
