#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "juris/svm.hpp"

namespace juris {

/// p(s) = 1 / (1 + exp(A s + B)).
struct PlattParams {
  double A = 0.0;
  double B = 0.0;
  bool degenerate = false;  // fixed sigmoid, holdout lacked positives or negatives
  bool operator==(const PlattParams&) const = default;
};

/// Regularized maximum-likelihood sigmoid fit with smoothed targets
/// (N+ + 1)/(N+ + 2) and 1/(N- + 2), solved by Newton's method with
/// backtracking. Without positives the sigmoid is fixed at 1/(N + 2);
/// without negatives at (N + 1)/(N + 2).
PlattParams fit_platt(std::span<const double> scores, const std::vector<bool>& positive);

double platt_probability(const PlattParams& params, double score);

enum class ProbabilityMode { Platt, Softmax };

const char* to_string(ProbabilityMode mode);
ProbabilityMode parse_probability_mode(std::string_view name);

/// Linear model with per-class probability outputs.
struct CalibratedModel {
  LinearModel base;
  ProbabilityMode mode = ProbabilityMode::Platt;
  std::vector<PlattParams> platt;  // one per class in Platt mode
  std::vector<std::string> warnings;

  bool trained() const;

  /// Probabilities over classes: each in (0, 1), summing to 1. Throws
  /// Error(Input) on a dims mismatch and Error(State) when untrained.
  std::vector<double> predict_proba(const SparseVector& x) const;
  std::vector<double> proba_from_scores(std::span<const double> scores) const;
};

/// Fits one sigmoid per class on held-out one-vs-rest decision scores.
CalibratedModel calibrate(LinearModel model, std::span<const SparseVector> X_holdout,
                          std::span<const std::size_t> labels_holdout);

/// Wraps a model whose probabilities are a softmax over decision values.
CalibratedModel softmax_model(LinearModel model);

struct CalibratedTrainOptions {
  TrainParams params;
  ProbabilityMode mode = ProbabilityMode::Platt;
  double holdout_fraction = 0.2;
  unsigned jobs = 1;
};

/// Platt mode: splits X per class into (1 - holdout_fraction) for weight
/// fitting and holdout_fraction for calibration, every class keeping at
/// least one training example. Softmax mode trains on everything.
CalibratedModel train_calibrated(std::span<const SparseVector> X, std::span<const std::size_t> labels,
                                 const std::vector<std::string>& classes,
                                 const CalibratedTrainOptions& options);

}  // namespace juris
