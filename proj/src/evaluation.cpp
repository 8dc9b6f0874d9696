#include "juris/evaluation.hpp"

#include <algorithm>
#include <iomanip>
#include <set>
#include <sstream>

#include "juris/error.hpp"
#include "juris/parallel.hpp"
#include "juris/rng.hpp"

namespace juris {

// ---- folds ------------------------------------------------------------------

std::vector<std::string> FoldAssignment::ids_in_fold(std::size_t fold) const {
  std::vector<std::string> ids;
  for (const auto& [id, f] : assignment) {
    if (f == fold) ids.push_back(id);
  }
  return ids;
}

FoldAssignment stratified_folds(const std::map<std::string, std::string>& labels, std::size_t k,
                                std::uint64_t seed) {
  if (k < 2) throw Error(ErrorKind::Input, "cross-validation needs k >= 2 (got " + std::to_string(k) + ")");
  FoldAssignment folds;
  folds.k = k;
  folds.seed = seed;

  std::map<std::string, std::vector<std::string>> by_class;
  for (const auto& [id, label] : labels) by_class[label].push_back(id);

  Rng rng(derive_seed(seed, "stratified-folds"));
  std::size_t next_fold = 0;
  for (auto& [label, ids] : by_class) {
    if (ids.size() < k) {
      folds.warnings.push_back("class '" + label + "' has " + std::to_string(ids.size()) +
                               " instances, fewer than k = " + std::to_string(k));
    }
    rng.shuffle(std::span(ids));
    for (const auto& id : ids) {
      folds.assignment[id] = next_fold;
      next_fold = (next_fold + 1) % k;
    }
  }
  return folds;
}

// ---- confusion matrix & metrics -----------------------------------------------

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> class_names)
    : classes(std::move(class_names)),
      counts(classes.size(), std::vector<std::size_t>(classes.size(), 0)) {}

void ConfusionMatrix::add(std::size_t gold, std::size_t predicted, std::size_t n) {
  if (gold >= classes.size() || predicted >= classes.size()) {
    throw Error(ErrorKind::Input, "confusion matrix index out of range");
  }
  counts[gold][predicted] += n;
}

void ConfusionMatrix::merge(const ConfusionMatrix& other) {
  if (other.classes != classes) throw Error(ErrorKind::Input, "cannot merge confusion matrices over different classes");
  for (std::size_t i = 0; i < counts.size(); ++i) {
    for (std::size_t j = 0; j < counts.size(); ++j) counts[i][j] += other.counts[i][j];
  }
}

std::size_t ConfusionMatrix::total() const {
  std::size_t sum = 0;
  for (const auto& row : counts) {
    for (std::size_t v : row) sum += v;
  }
  return sum;
}

std::size_t ConfusionMatrix::trace() const {
  std::size_t sum = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) sum += counts[i][i];
  return sum;
}

ConfusionMatrix confusion_matrix(std::span<const std::string> gold, std::span<const std::string> pred,
                                 const LabelScheme& scheme) {
  if (gold.size() != pred.size()) throw Error(ErrorKind::Input, "gold and predicted lists differ in length");
  ConfusionMatrix cm(scheme.classes);
  for (std::size_t n = 0; n < gold.size(); ++n) {
    const auto g = scheme.index_of(gold[n]);
    const auto p = scheme.index_of(pred[n]);
    if (!g || !p) {
      throw Error(ErrorKind::Input, "label '" + (g ? pred[n] : gold[n]) + "' is not part of the scheme");
    }
    cm.add(*g, *p);
  }
  return cm;
}

const char* to_string(Averaging averaging) { return averaging == Averaging::Macro ? "macro" : "weighted"; }

Averaging parse_averaging(std::string_view name) {
  if (name == "macro") return Averaging::Macro;
  if (name == "weighted") return Averaging::Weighted;
  throw Error(ErrorKind::Config, "unknown averaging '" + std::string(name) + "' (expected macro or weighted)");
}

Metrics metrics(const ConfusionMatrix& cm, Averaging averaging) {
  const std::size_t total = cm.total();
  if (total == 0) throw Error(ErrorKind::Input, "metrics of an empty confusion matrix");
  const std::size_t k = cm.classes.size();

  Metrics m;
  double weight_sum = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t row = 0, col = 0;
    for (std::size_t j = 0; j < k; ++j) {
      row += cm.counts[c][j];
      col += cm.counts[j][c];
    }
    const auto diag = static_cast<double>(cm.counts[c][c]);
    const double p = col == 0 ? 0.0 : diag / static_cast<double>(col);
    const double r = row == 0 ? 0.0 : diag / static_cast<double>(row);
    const double f = p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);

    double weight;
    if (averaging == Averaging::Weighted) {
      weight = static_cast<double>(row);
    } else {
      weight = row + col > 0 ? 1.0 : 0.0;
    }
    m.precision += weight * p;
    m.recall += weight * r;
    m.f1 += weight * f;
    weight_sum += weight;
  }
  m.precision /= weight_sum;
  m.recall /= weight_sum;
  m.f1 /= weight_sum;
  m.accuracy = static_cast<double>(cm.trace()) / static_cast<double>(total);
  return m;
}

Metrics average_metrics(std::span<const Metrics> per_fold) {
  Metrics mean;
  if (per_fold.empty()) return mean;
  for (const auto& m : per_fold) {
    mean.precision += m.precision;
    mean.recall += m.recall;
    mean.f1 += m.f1;
    mean.accuracy += m.accuracy;
  }
  const auto n = static_cast<double>(per_fold.size());
  mean.precision /= n;
  mean.recall /= n;
  mean.f1 /= n;
  mean.accuracy /= n;
  return mean;
}

// ---- cross-validation -------------------------------------------------------

namespace {

struct FoldOutcome {
  FoldResult result;
  std::vector<std::string> flags;
  std::vector<std::string> warnings;
};

}  // namespace

void assert_no_leakage(const EnsembleModel& ensemble, std::span<const std::string> train_ids,
                       std::span<const std::string> test_ids, std::size_t fold) {
  std::vector<std::string> sorted_train(train_ids.begin(), train_ids.end());
  std::sort(sorted_train.begin(), sorted_train.end());
  for (const auto& member : ensemble.members) {
    const auto& fit_ids = member.featurizer.fit_ids();
    const bool subset = std::includes(sorted_train.begin(), sorted_train.end(), fit_ids.begin(), fit_ids.end());
    if (!subset || !member.featurizer.disjoint_from(test_ids)) {
      throw Error(ErrorKind::Leakage, "fold " + std::to_string(fold) + ": member '" + member.id +
                                          "' was fitted on documents outside the training folds");
    }
  }
}

namespace {

FoldOutcome evaluate_fold(std::size_t fold, std::span<const LabeledDocument> docs,
                          std::span<const TokenList> tokens, const std::vector<std::size_t>& fold_of,
                          const LabelScheme& scheme, const CvConfig& config) {
  FoldOutcome outcome;
  std::vector<TokenList> train_tokens;
  std::vector<std::string> train_ids, test_ids;
  std::vector<std::size_t> train_labels, test_index;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (fold_of[i] == fold) {
      test_ids.push_back(docs[i].id);
      test_index.push_back(i);
    } else {
      train_tokens.push_back(tokens[i]);
      train_ids.push_back(docs[i].id);
      train_labels.push_back(docs[i].label);
    }
  }

  const auto ensemble = train_ensemble(train_tokens, train_ids, train_labels, scheme, config.members,
                                       derive_seed(config.seed, "fold:" + std::to_string(fold)));

  assert_no_leakage(ensemble, train_ids, test_ids, fold);
  for (const auto& member : ensemble.members) {
    for (std::size_t c = 0; c < scheme.size(); ++c) {
      const auto& status = member.model.base.status[c];
      const std::string where = "fold " + std::to_string(fold) + " member " + member.id + " class " +
                                scheme.classes[c];
      if (status.degenerate) {
        outcome.flags.push_back(where + ": degenerate binary problem (class absent from training data)");
      } else if (!status.converged) {
        outcome.flags.push_back(where + ": not converged after " + std::to_string(status.iterations) +
                                " passes");
      }
    }
    for (const auto& w : member.model.warnings) {
      outcome.warnings.push_back("fold " + std::to_string(fold) + " member " + member.id + ": " + w);
    }
  }

  ConfusionMatrix cm(scheme.classes);
  std::vector<std::size_t> support(scheme.size(), 0);
  for (std::size_t i : test_index) {
    cm.add(docs[i].label, predict_tokens(ensemble, tokens[i]).class_index);
    ++support[docs[i].label];
  }

  auto& result = outcome.result;
  result.fold = fold;
  result.train_size = train_ids.size();
  result.test_size = test_ids.size();
  for (std::size_t c = 0; c < scheme.size(); ++c) {
    if (support[c] == 0) result.missing_classes.push_back(scheme.classes[c]);
  }
  result.macro = metrics(cm, Averaging::Macro);
  result.weighted = metrics(cm, Averaging::Weighted);
  result.confusion = std::move(cm);
  result.leakage_checked = true;
  return outcome;
}

}  // namespace

EvaluationReport run_cv(std::span<const LabeledDocument> docs, const LabelScheme& scheme,
                        const CvConfig& config) {
  if (config.members.empty()) throw Error(ErrorKind::Config, "cross-validation needs at least one member");
  std::map<std::string, std::string> labels;
  for (const auto& doc : docs) {
    if (doc.label >= scheme.size()) throw Error(ErrorKind::Label, "document '" + doc.id + "' has an out-of-scheme label");
    if (!labels.emplace(doc.id, scheme.classes[doc.label]).second) {
      throw Error(ErrorKind::Input, "duplicate document id '" + doc.id + "'");
    }
  }
  const FoldAssignment folds = stratified_folds(labels, config.k, config.seed);

  std::vector<std::size_t> fold_of(docs.size());
  std::vector<TokenList> tokens(docs.size());
  parallel_for(docs.size(), config.jobs, [&](std::size_t i) {
    fold_of[i] = folds.assignment.at(docs[i].id);
    tokens[i] = tokenize(docs[i].text);
  });

  std::vector<FoldOutcome> outcomes(config.k);
  parallel_for(config.k, config.jobs, [&](std::size_t f) {
    outcomes[f] = evaluate_fold(f, docs, tokens, fold_of, scheme, config);
  });

  EvaluationReport report;
  report.label = config.members.size() == 1 ? "single-svm-baseline" : "mean-probability-ensemble";
  report.task = scheme.task;
  report.classes = scheme.classes;
  for (const auto& m : config.members) report.members.push_back(m.id);
  report.k = config.k;
  report.seed = config.seed;
  report.confusion = ConfusionMatrix(scheme.classes);
  report.warnings = folds.warnings;

  std::vector<Metrics> macro, weighted;
  for (auto& outcome : outcomes) {
    report.confusion.merge(outcome.result.confusion);
    macro.push_back(outcome.result.macro);
    weighted.push_back(outcome.result.weighted);
    if (!outcome.result.missing_classes.empty()) {
      std::string missing;
      for (const auto& c : outcome.result.missing_classes) missing += (missing.empty() ? "" : ", ") + c;
      report.warnings.push_back("fold " + std::to_string(outcome.result.fold) +
                                " test set lacks classes: " + missing);
    }
    report.non_convergence_flags.insert(report.non_convergence_flags.end(), outcome.flags.begin(),
                                        outcome.flags.end());
    report.warnings.insert(report.warnings.end(), outcome.warnings.begin(), outcome.warnings.end());
    report.folds.push_back(std::move(outcome.result));
  }
  report.aggregate_macro = average_metrics(macro);
  report.aggregate_weighted = average_metrics(weighted);
  return report;
}

// ---- report formats ---------------------------------------------------------

nlohmann::json to_json(const Metrics& m) {
  return {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"accuracy", m.accuracy}};
}

nlohmann::json to_json(const ConfusionMatrix& cm) {
  return {{"classes", cm.classes}, {"counts", cm.counts}};
}

nlohmann::json to_json(const EvaluationReport& report) {
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& f : report.folds) {
    folds.push_back({{"fold", f.fold},
                     {"train_size", f.train_size},
                     {"test_size", f.test_size},
                     {"macro", to_json(f.macro)},
                     {"weighted", to_json(f.weighted)},
                     {"missing_classes", f.missing_classes},
                     {"leakage_checked", f.leakage_checked}});
  }
  return {{"label", report.label},
          {"task", to_string(report.task)},
          {"classes", report.classes},
          {"members", report.members},
          {"k", report.k},
          {"seed", report.seed},
          {"per_fold", folds},
          {"aggregate", {{"macro", to_json(report.aggregate_macro)},
                         {"weighted", to_json(report.aggregate_weighted)}}},
          {"confusion", to_json(report.confusion)},
          {"non_convergence_flags", report.non_convergence_flags},
          {"warnings", report.warnings}};
}

std::string format_report_table(const EvaluationReport& report, std::span<const Averaging> averaging) {
  std::ostringstream out;
  out << report.label << "  task=" << to_string(report.task) << "  k=" << report.k
      << "  seed=" << report.seed << "  members=";
  for (std::size_t i = 0; i < report.members.size(); ++i) out << (i ? "," : "") << report.members[i];
  out << "\n\n";
  out << std::fixed << std::setprecision(4);
  out << std::left << std::setw(10) << "averaging" << std::right << std::setw(11) << "precision"
      << std::setw(9) << "recall" << std::setw(9) << "f1" << std::setw(11) << "accuracy" << '\n';
  for (Averaging a : averaging) {
    const auto& m = report.aggregate(a);
    out << std::left << std::setw(10) << to_string(a) << std::right << std::setw(11) << m.precision
        << std::setw(9) << m.recall << std::setw(9) << m.f1 << std::setw(11) << m.accuracy << '\n';
  }
  out << "\nper fold\n";
  out << std::left << std::setw(6) << "fold" << std::right << std::setw(8) << "test";
  for (Averaging a : averaging) out << std::setw(12) << std::string("f1/") + to_string(a);
  out << std::setw(11) << "accuracy" << '\n';
  for (const auto& f : report.folds) {
    out << std::left << std::setw(6) << f.fold << std::right << std::setw(8) << f.test_size;
    for (Averaging a : averaging) out << std::setw(12) << (a == Averaging::Macro ? f.macro.f1 : f.weighted.f1);
    out << std::setw(11) << f.weighted.accuracy << '\n';
  }

  std::size_t width = 6;
  for (const auto& c : report.classes) width = std::max(width, c.size() + 2);
  out << "\nconfusion (rows = gold, columns = predicted)\n" << std::setw(static_cast<int>(width)) << "";
  for (std::size_t j = 0; j < report.classes.size(); ++j) out << std::setw(8) << j;
  out << '\n';
  for (std::size_t i = 0; i < report.classes.size(); ++i) {
    out << std::left << std::setw(static_cast<int>(width))
        << (std::to_string(i) + " " + report.classes[i]) << std::right;
    for (std::size_t v : report.confusion.counts[i]) out << std::setw(8) << v;
    out << '\n';
  }
  if (!report.non_convergence_flags.empty()) {
    out << "\nnon-convergence flags: " << report.non_convergence_flags.size() << '\n';
    for (const auto& flag : report.non_convergence_flags) out << "  " << flag << '\n';
  }
  return out.str();
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

}  // namespace

std::string format_confusion_csv(const ConfusionMatrix& cm) {
  std::string out = "gold\\predicted";
  for (const auto& c : cm.classes) out += "," + csv_field(c);
  out += '\n';
  for (std::size_t i = 0; i < cm.classes.size(); ++i) {
    out += csv_field(cm.classes[i]);
    for (std::size_t v : cm.counts[i]) out += "," + std::to_string(v);
    out += '\n';
  }
  return out;
}

}  // namespace juris
