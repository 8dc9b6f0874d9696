#include "juris/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "juris/error.hpp"
#include "juris/parallel.hpp"
#include "juris/rng.hpp"

namespace juris {

const char* to_string(Loss loss) { return loss == Loss::HingeL1 ? "hinge_l1" : "hinge_l2"; }

Loss parse_loss(std::string_view name) {
  if (name == "hinge_l1") return Loss::HingeL1;
  if (name == "hinge_l2") return Loss::HingeL2;
  throw Error(ErrorKind::Config, "unknown loss '" + std::string(name) + "' (expected hinge_l1 or hinge_l2)");
}

void TrainParams::validate() const {
  if (!(C > 0.0) || !std::isfinite(C)) throw Error(ErrorKind::Config, "C must be a positive finite number");
  if (!(tol > 0.0)) throw Error(ErrorKind::Config, "tol must be positive");
  if (max_iter < 1) throw Error(ErrorKind::Config, "max_iter must be at least 1");
}

nlohmann::json to_json(const TrainParams& params) {
  return {{"C", params.C},
          {"loss", to_string(params.loss)},
          {"tol", params.tol},
          {"max_iter", params.max_iter},
          {"seed", params.seed}};
}

TrainParams train_params_from_json(const nlohmann::json& j) {
  TrainParams params;
  try {
    params.C = j.value("C", 1.0);
    params.loss = parse_loss(j.value("loss", std::string("hinge_l2")));
    params.tol = j.value("tol", 1e-4);
    params.max_iter = j.value("max_iter", 1000);
    params.seed = j.value("seed", std::uint64_t{1});
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, std::string("invalid training parameters: ") + e.what());
  }
  params.validate();
  return params;
}

namespace {

double sparse_dot(const SparseVector& x, std::span<const double> w) {
  double sum = 0.0;
  for (const auto& e : x.entries) sum += e.value * w[e.index];
  return sum;
}

void sparse_axpy(double a, const SparseVector& x, std::span<double> w) {
  for (const auto& e : x.entries) w[e.index] += a * e.value;
}

std::size_t check_inputs(std::span<const SparseVector> X, std::size_t labels) {
  if (X.empty()) throw Error(ErrorKind::Input, "training set is empty");
  if (X.size() != labels) throw Error(ErrorKind::Input, "feature rows and labels differ in length");
  const std::size_t dims = X.front().dims;
  for (const auto& row : X) {
    if (row.dims != dims) throw Error(ErrorKind::Input, "feature rows disagree on dimensionality");
    for (const auto& e : row.entries) {
      if (!std::isfinite(e.value)) throw Error(ErrorKind::Input, "non-finite feature value");
      if (e.index >= dims) throw Error(ErrorKind::Input, "feature index out of range");
    }
  }
  return dims;
}

}  // namespace

// Dual: min_a 1/2 a'Qa - e'a, 0 <= a_i <= U, Q_ij = y_i y_j <x_i, x_j> + D_ii,
// with x augmented by a constant 1 for the bias. w = sum_i a_i y_i x_i.
BinaryModel train_binary(std::span<const SparseVector> X, std::span<const int> y,
                         const TrainParams& params, const DualObserver& observer) {
  params.validate();
  const std::size_t dims = check_inputs(X, y.size());
  const std::size_t n = X.size();

  BinaryModel model;
  model.weights.assign(dims, 0.0);
  model.alpha.assign(n, 0.0);

  bool has_positive = false;
  bool has_negative = false;
  for (int label : y) {
    if (label == 1) {
      has_positive = true;
    } else if (label == -1) {
      has_negative = true;
    } else {
      throw Error(ErrorKind::Input, "binary labels must be +1 or -1");
    }
  }
  if (!has_positive || !has_negative) {
    model.degenerate = true;
    model.converged = true;
    return model;
  }

  constexpr double kInf = std::numeric_limits<double>::infinity();
  const double diag = params.loss == Loss::HingeL2 ? 0.5 / params.C : 0.0;
  const double upper = params.loss == Loss::HingeL2 ? kInf : params.C;

  std::vector<double> qd(n);
  for (std::size_t i = 0; i < n; ++i) qd[i] = X[i].squared_norm() + 1.0 + diag;

  std::vector<std::size_t> index(n);
  std::iota(index.begin(), index.end(), 0);
  std::size_t active = n;
  Rng rng(params.seed);

  std::span<double> w(model.weights);
  auto& alpha = model.alpha;
  double& bias = model.bias;

  // Projected-gradient extremes of the previous pass, used for shrinking.
  double pg_max_old = kInf;
  double pg_min_old = -kInf;

  int iter = 0;
  while (iter < params.max_iter) {
    double pg_max_new = -kInf;
    double pg_min_new = kInf;

    rng.shuffle(std::span(index.data(), active));

    for (std::size_t s = 0; s < active; ++s) {
      const std::size_t i = index[s];
      const double yi = y[i];
      const double g = yi * (sparse_dot(X[i], w) + bias) - 1.0 + alpha[i] * diag;

      double pg = 0.0;
      if (alpha[i] == 0.0) {
        if (g > pg_max_old) {
          --active;
          std::swap(index[s], index[active]);
          --s;
          continue;
        }
        if (g < 0.0) pg = g;
      } else if (alpha[i] == upper) {
        if (g < pg_min_old) {
          --active;
          std::swap(index[s], index[active]);
          --s;
          continue;
        }
        if (g > 0.0) pg = g;
      } else {
        pg = g;
      }

      pg_max_new = std::max(pg_max_new, pg);
      pg_min_new = std::min(pg_min_new, pg);

      if (std::fabs(pg) > 1e-12) {
        const double old = alpha[i];
        alpha[i] = std::min(std::max(alpha[i] - g / qd[i], 0.0), upper);
        const double delta = (alpha[i] - old) * yi;
        sparse_axpy(delta, X[i], w);
        bias += delta;
        if (observer) observer(alpha, upper);
      }
    }

    ++iter;

    if (pg_max_new - pg_min_new <= params.tol) {
      if (active == n) {
        model.converged = true;
        break;
      }
      // Converged on the shrunk set; verify against every coordinate.
      active = n;
      pg_max_old = kInf;
      pg_min_old = -kInf;
      continue;
    }
    pg_max_old = pg_max_new <= 0.0 ? kInf : pg_max_new;
    pg_min_old = pg_min_new >= 0.0 ? -kInf : pg_min_new;
  }
  model.iterations = iter;
  return model;
}

double primal_objective(std::span<const SparseVector> X, std::span<const int> y,
                        std::span<const double> weights, double bias, const TrainParams& params) {
  double value = bias * bias;
  for (double wj : weights) value += wj * wj;
  value *= 0.5;
  double loss = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    const double slack = std::max(0.0, 1.0 - y[i] * (sparse_dot(X[i], weights) + bias));
    loss += params.loss == Loss::HingeL1 ? slack : slack * slack;
  }
  return value + params.C * loss;
}

LinearModel train_ovr(std::span<const SparseVector> X, std::span<const std::size_t> labels,
                      const std::vector<std::string>& classes, const TrainParams& params,
                      unsigned jobs) {
  params.validate();
  const std::size_t dims = check_inputs(X, labels.size());
  std::vector<std::size_t> seen(classes.size(), 0);
  for (std::size_t label : labels) {
    if (label >= classes.size()) throw Error(ErrorKind::Label, "label index outside the scheme");
    ++seen[label];
  }
  if (std::count_if(seen.begin(), seen.end(), [](std::size_t c) { return c > 0; }) < 2) {
    throw Error(ErrorKind::Input, "one-vs-rest training needs at least two classes");
  }

  LinearModel model;
  model.classes = classes;
  model.dims = dims;
  model.params = params;
  model.weights.resize(classes.size());
  model.bias.assign(classes.size(), 0.0);
  model.status.resize(classes.size());

  parallel_for(classes.size(), jobs, [&](std::size_t c) {
    std::vector<int> y(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) y[i] = labels[i] == c ? 1 : -1;
    TrainParams binary_params = params;
    binary_params.seed = derive_seed(params.seed, "ovr:" + classes[c]);
    BinaryModel binary = train_binary(X, y, binary_params);
    model.weights[c] = std::move(binary.weights);
    model.bias[c] = binary.bias;
    model.status[c] = {binary.iterations, binary.converged, binary.degenerate};
  });
  return model;
}

LinearModel train_ovr(std::span<const SparseVector> X, std::span<const std::string> labels,
                      const LabelScheme& scheme, const TrainParams& params, unsigned jobs) {
  std::vector<std::size_t> indices;
  indices.reserve(labels.size());
  for (const auto& label : labels) {
    const auto index = scheme.index_of(label);
    if (!index) throw Error(ErrorKind::Label, "label '" + label + "' is not part of the scheme");
    indices.push_back(*index);
  }
  return train_ovr(X, indices, scheme.classes, params, jobs);
}

std::vector<double> decision_values(const LinearModel& model, const SparseVector& x) {
  if (!model.trained()) throw Error(ErrorKind::State, "linear model is not trained");
  if (x.dims != model.dims) {
    throw Error(ErrorKind::Input, "feature vector has " + std::to_string(x.dims) +
                                      " dims, model expects " + std::to_string(model.dims));
  }
  std::vector<double> scores(model.classes.size());
  for (std::size_t c = 0; c < scores.size(); ++c) {
    scores[c] = sparse_dot(x, model.weights[c]) + model.bias[c];
  }
  return scores;
}

}  // namespace juris
