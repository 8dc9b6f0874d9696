#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "juris/corpus.hpp"
#include "juris/features.hpp"

namespace juris {

enum class Loss { HingeL1, HingeL2 };

const char* to_string(Loss loss);
Loss parse_loss(std::string_view name);

struct TrainParams {
  double C = 1.0;
  Loss loss = Loss::HingeL2;
  double tol = 1e-4;
  int max_iter = 1000;
  std::uint64_t seed = 1;

  /// Throws Error(Config) unless C > 0, tol > 0 and max_iter >= 1.
  void validate() const;
  bool operator==(const TrainParams&) const = default;
};

nlohmann::json to_json(const TrainParams& params);
TrainParams train_params_from_json(const nlohmann::json& j);

/// Result of one binary L2-regularized SVM solve. The bias is the weight of
/// an implicit constant-1 feature and is regularized with the others.
struct BinaryModel {
  std::vector<double> weights;
  double bias = 0.0;
  std::vector<double> alpha;  // final dual variables
  int iterations = 0;
  bool converged = false;
  bool degenerate = false;    // y held a single class; weights are zero
};

/// Called after every coordinate update with the full dual vector and the
/// box upper bound (infinity for HingeL2).
using DualObserver = std::function<void(std::span<const double> alpha, double upper_bound)>;

/// Dual coordinate descent for
///   min_w  1/2 |w|^2 + C sum_i loss(y_i <w, x_i>)
/// with a random coordinate permutation per pass and shrinking. HingeL1 uses
/// the box [0, C]; HingeL2 has no upper bound and adds 1/(2C) to the
/// diagonal. Stops when the projected-gradient spread is <= tol or after
/// max_iter passes.
///
/// Throws Error(Input) for empty or mismatched inputs, labels other than
/// +-1, inconsistent dims or non-finite feature values.
BinaryModel train_binary(std::span<const SparseVector> X, std::span<const int> y,
                         const TrainParams& params, const DualObserver& observer = {});

/// Primal objective of (weights, bias) on the bias-augmented data.
double primal_objective(std::span<const SparseVector> X, std::span<const int> y,
                        std::span<const double> weights, double bias, const TrainParams& params);

struct ClassStatus {
  int iterations = 0;
  bool converged = false;
  bool degenerate = false;
};

/// One-vs-rest linear model; rows follow the scheme's class order.
struct LinearModel {
  std::vector<std::string> classes;
  std::size_t dims = 0;
  std::vector<std::vector<double>> weights;
  std::vector<double> bias;
  std::vector<ClassStatus> status;
  TrainParams params;

  bool trained() const { return !classes.empty() && weights.size() == classes.size(); }
};

/// Trains one class-vs-rest problem per scheme class. A scheme class that
/// never occurs (or is the only one) yields a zero, degenerate row.
/// Throws Error(Label) for labels outside the scheme and Error(Input) when
/// fewer than two classes occur.
LinearModel train_ovr(std::span<const SparseVector> X, std::span<const std::string> labels,
                      const LabelScheme& scheme, const TrainParams& params, unsigned jobs = 1);

/// Same, with labels given as scheme class indices.
LinearModel train_ovr(std::span<const SparseVector> X, std::span<const std::size_t> labels,
                      const std::vector<std::string>& classes, const TrainParams& params,
                      unsigned jobs = 1);

/// score_c = <w_c, x> + bias_c. Throws Error(Input) on a dims mismatch.
std::vector<double> decision_values(const LinearModel& model, const SparseVector& x);

}  // namespace juris
