#include "juris/calibration.hpp"

#include <algorithm>
#include <cmath>

#include "juris/error.hpp"
#include "juris/rng.hpp"

namespace juris {
namespace {

// Keeps every probability strictly inside (0, 1) after renormalization.
constexpr double kProbabilityFloor = 1e-12;

std::vector<double> renormalize(std::vector<double> p) {
  double sum = 0.0;
  for (double& v : p) {
    v = std::clamp(v, kProbabilityFloor, 1.0);
    sum += v;
  }
  for (double& v : p) v /= sum;
  return p;
}

// Negative log-likelihood term for target t at logit f = A s + B, computed
// without overflow.
double nll_term(double t, double f) {
  return f >= 0.0 ? t * f + std::log1p(std::exp(-f)) : (t - 1.0) * f + std::log1p(std::exp(f));
}

}  // namespace

PlattParams fit_platt(std::span<const double> scores, const std::vector<bool>& positive) {
  if (scores.size() != positive.size()) throw Error(ErrorKind::Input, "scores and labels differ in length");
  const auto n = static_cast<double>(scores.size());
  const auto prior1 = static_cast<double>(std::count(positive.begin(), positive.end(), true));
  const double prior0 = n - prior1;

  if (prior1 == 0.0) return {0.0, std::log(n + 1.0), true};
  if (prior0 == 0.0) return {0.0, -std::log(n + 1.0), true};

  constexpr int kMaxIter = 100;
  constexpr double kMinStep = 1e-10;
  constexpr double kSigma = 1e-12;
  constexpr double kEps = 1e-5;

  const double hi_target = (prior1 + 1.0) / (prior1 + 2.0);
  const double lo_target = 1.0 / (prior0 + 2.0);
  std::vector<double> t(scores.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = positive[i] ? hi_target : lo_target;

  double A = 0.0;
  double B = std::log((prior0 + 1.0) / (prior1 + 1.0));
  auto objective = [&](double a, double b) {
    double f = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) f += nll_term(t[i], scores[i] * a + b);
    return f;
  };
  double fval = objective(A, B);

  for (int iter = 0; iter < kMaxIter; ++iter) {
    double h11 = kSigma, h22 = kSigma, h21 = 0.0, g1 = 0.0, g2 = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double f = scores[i] * A + B;
      double p, q;
      if (f >= 0.0) {
        p = std::exp(-f) / (1.0 + std::exp(-f));
        q = 1.0 / (1.0 + std::exp(-f));
      } else {
        p = 1.0 / (1.0 + std::exp(f));
        q = std::exp(f) / (1.0 + std::exp(f));
      }
      const double d2 = p * q;
      h11 += scores[i] * scores[i] * d2;
      h22 += d2;
      h21 += scores[i] * d2;
      const double d1 = t[i] - p;
      g1 += scores[i] * d1;
      g2 += d1;
    }
    if (std::fabs(g1) < kEps && std::fabs(g2) < kEps) break;

    const double det = h11 * h22 - h21 * h21;
    const double dA = -(h22 * g1 - h21 * g2) / det;
    const double dB = -(-h21 * g1 + h11 * g2) / det;
    const double gd = g1 * dA + g2 * dB;

    double step = 1.0;
    while (step >= kMinStep) {
      const double newA = A + step * dA;
      const double newB = B + step * dB;
      const double newf = objective(newA, newB);
      if (newf < fval + 1e-4 * step * gd) {
        A = newA;
        B = newB;
        fval = newf;
        break;
      }
      step /= 2.0;
    }
    if (step < kMinStep) break;
  }
  return {A, B, false};
}

double platt_probability(const PlattParams& params, double score) {
  const double f = params.A * score + params.B;
  return f >= 0.0 ? std::exp(-f) / (1.0 + std::exp(-f)) : 1.0 / (1.0 + std::exp(f));
}

const char* to_string(ProbabilityMode mode) {
  return mode == ProbabilityMode::Platt ? "platt" : "softmax";
}

ProbabilityMode parse_probability_mode(std::string_view name) {
  if (name == "platt") return ProbabilityMode::Platt;
  if (name == "softmax") return ProbabilityMode::Softmax;
  throw Error(ErrorKind::Config, "unknown probability mode '" + std::string(name) + "' (expected platt or softmax)");
}

bool CalibratedModel::trained() const {
  return base.trained() && (mode == ProbabilityMode::Softmax || platt.size() == base.classes.size());
}

std::vector<double> CalibratedModel::proba_from_scores(std::span<const double> scores) const {
  if (!trained()) throw Error(ErrorKind::State, "calibrated model is not trained");
  if (scores.size() != base.classes.size()) throw Error(ErrorKind::Input, "score vector length mismatch");
  std::vector<double> p(scores.size());
  if (mode == ProbabilityMode::Platt) {
    for (std::size_t c = 0; c < p.size(); ++c) p[c] = platt_probability(platt[c], scores[c]);
  } else {
    const double top = *std::max_element(scores.begin(), scores.end());
    double sum = 0.0;
    for (std::size_t c = 0; c < p.size(); ++c) sum += p[c] = std::exp(scores[c] - top);
    for (double& v : p) v /= sum;
  }
  return renormalize(std::move(p));
}

std::vector<double> CalibratedModel::predict_proba(const SparseVector& x) const {
  if (!trained()) throw Error(ErrorKind::State, "calibrated model is not trained");
  return proba_from_scores(decision_values(base, x));
}

CalibratedModel calibrate(LinearModel model, std::span<const SparseVector> X_holdout,
                          std::span<const std::size_t> labels_holdout) {
  if (X_holdout.size() != labels_holdout.size()) {
    throw Error(ErrorKind::Input, "holdout rows and labels differ in length");
  }
  CalibratedModel calibrated;
  calibrated.mode = ProbabilityMode::Platt;
  const std::size_t k = model.classes.size();

  std::vector<std::vector<double>> scores(k, std::vector<double>(X_holdout.size()));
  for (std::size_t i = 0; i < X_holdout.size(); ++i) {
    const auto s = decision_values(model, X_holdout[i]);
    for (std::size_t c = 0; c < k; ++c) scores[c][i] = s[c];
  }
  std::vector<bool> flags(X_holdout.size());
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t i = 0; i < flags.size(); ++i) flags[i] = labels_holdout[i] == c;
    PlattParams params = fit_platt(scores[c], flags);
    if (params.degenerate) {
      calibrated.warnings.push_back("class '" + model.classes[c] +
                                    "' has no positive or no negative holdout examples; using a fixed sigmoid");
    }
    calibrated.platt.push_back(params);
  }
  calibrated.base = std::move(model);
  return calibrated;
}

CalibratedModel softmax_model(LinearModel model) {
  CalibratedModel calibrated;
  calibrated.mode = ProbabilityMode::Softmax;
  calibrated.base = std::move(model);
  return calibrated;
}

CalibratedModel train_calibrated(std::span<const SparseVector> X, std::span<const std::size_t> labels,
                                 const std::vector<std::string>& classes,
                                 const CalibratedTrainOptions& options) {
  if (options.mode == ProbabilityMode::Softmax) {
    return softmax_model(train_ovr(X, labels, classes, options.params, options.jobs));
  }
  if (!(options.holdout_fraction > 0.0 && options.holdout_fraction < 1.0)) {
    throw Error(ErrorKind::Config, "holdout fraction must lie in (0, 1)");
  }
  if (X.size() != labels.size()) throw Error(ErrorKind::Input, "feature rows and labels differ in length");

  std::vector<std::vector<std::size_t>> by_class(classes.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= classes.size()) throw Error(ErrorKind::Label, "label index outside the scheme");
    by_class[labels[i]].push_back(i);
  }
  Rng rng(derive_seed(options.params.seed, "calibration-split"));
  std::vector<bool> holdout(X.size(), false);
  for (auto& members : by_class) {
    rng.shuffle(std::span(members));
    const auto n = members.size();
    auto take = static_cast<std::size_t>(std::llround(static_cast<double>(n) * options.holdout_fraction));
    take = std::min(take, n > 0 ? n - 1 : 0);
    for (std::size_t j = 0; j < take; ++j) holdout[members[j]] = true;
  }

  std::vector<SparseVector> fit_x, cal_x;
  std::vector<std::size_t> fit_y, cal_y;
  for (std::size_t i = 0; i < X.size(); ++i) {
    if (holdout[i]) {
      cal_x.push_back(X[i]);
      cal_y.push_back(labels[i]);
    } else {
      fit_x.push_back(X[i]);
      fit_y.push_back(labels[i]);
    }
  }
  LinearModel model = train_ovr(fit_x, fit_y, classes, options.params, options.jobs);
  return calibrate(std::move(model), cal_x, cal_y);
}

}  // namespace juris
