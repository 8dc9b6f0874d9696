#include "juris/ensemble.hpp"

#include <algorithm>
#include <cmath>

#include "juris/error.hpp"
#include "juris/rng.hpp"

namespace juris {

nlohmann::json to_json(const MemberSpec& spec) {
  nlohmann::json j = to_json(spec.featurizer);
  const nlohmann::json params = to_json(spec.params);
  for (const auto& [key, value] : params.items()) {
    if (key != "seed") j[key] = value;
  }
  j["id"] = spec.id;
  j["probability"] = to_string(spec.probability);
  return j;
}

MemberSpec member_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorKind::Config, "ensemble member must be a JSON object");
  MemberSpec spec;
  try {
    spec.id = j.at("id").get<std::string>();
    spec.probability = parse_probability_mode(j.value("probability", std::string("platt")));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, std::string("invalid ensemble member: ") + e.what());
  }
  const bool safe_id = !spec.id.empty() && std::all_of(spec.id.begin(), spec.id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
  });
  if (!safe_id) throw Error(ErrorKind::Config, "member id '" + spec.id + "' must match [A-Za-z0-9_.-]+");
  spec.featurizer = featurizer_config_from_json(j);
  spec.params = train_params_from_json(j);
  return spec;
}

std::vector<MemberSpec> default_members() {
  MemberSpec unigram{"unigram-counts", {{1, 1}, 2, Weighting::Counts}, {}, ProbabilityMode::Platt};
  MemberSpec bigram = baseline_member();
  MemberSpec tfidf{"unigram-bigram-tfidf", {{1, 2}, 2, Weighting::TfIdf}, {}, ProbabilityMode::Platt};
  return {unigram, bigram, tfidf};
}

MemberSpec baseline_member() {
  return {"unigram-bigram-counts", {{1, 2}, 2, Weighting::Counts}, {}, ProbabilityMode::Platt};
}

void EnsembleModel::validate() const {
  if (members.empty()) throw Error(ErrorKind::State, "ensemble has no members");
  for (const auto& member : members) {
    if (!member.featurizer.fitted() || !member.model.trained()) {
      throw Error(ErrorKind::State, "ensemble member '" + member.id + "' is not trained");
    }
    if (member.model.base.classes != scheme.classes) {
      throw Error(ErrorKind::Integrity, "member '" + member.id + "' class order differs from the scheme");
    }
    if (member.model.base.dims != member.featurizer.dims()) {
      throw Error(ErrorKind::Integrity, "member '" + member.id + "' model and vocabulary sizes differ");
    }
  }
}

std::vector<double> mean_probability(std::span<const std::vector<double>> probs) {
  if (probs.empty()) throw Error(ErrorKind::Input, "mean of an empty probability list");
  const std::size_t k = probs.front().size();
  std::vector<double> fused(k, 0.0);
  for (const auto& p : probs) {
    if (p.size() != k) throw Error(ErrorKind::Input, "probability vectors differ in length");
    double sum = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      fused[c] += p[c];
      sum += p[c];
    }
    if (std::fabs(sum - 1.0) > 1e-6) throw Error(ErrorKind::Input, "probability vector does not sum to 1");
  }
  const auto m = static_cast<double>(probs.size());
  for (double& v : fused) v /= m;
  return fused;
}

std::size_t argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

Prediction predict_tokens(const EnsembleModel& ensemble, const TokenList& tokens) {
  ensemble.validate();
  Prediction prediction;
  prediction.per_member.reserve(ensemble.members.size());
  for (const auto& member : ensemble.members) {
    prediction.per_member.push_back(member.model.predict_proba(member.featurizer.transform(tokens)));
  }
  prediction.fused = mean_probability(prediction.per_member);
  prediction.class_index = argmax(prediction.fused);
  prediction.label = ensemble.scheme.classes[prediction.class_index];
  return prediction;
}

Prediction predict(const EnsembleModel& ensemble, std::string_view text) {
  return predict_tokens(ensemble, tokenize(text));
}

EnsembleModel train_ensemble(std::span<const TokenList> tokens, std::span<const std::string> ids,
                             std::span<const std::size_t> labels, const LabelScheme& scheme,
                             std::span<const MemberSpec> specs, std::uint64_t seed, unsigned jobs) {
  if (specs.empty()) throw Error(ErrorKind::Config, "ensemble needs at least one member");
  EnsembleModel ensemble;
  ensemble.scheme = scheme;
  for (const auto& spec : specs) {
    EnsembleMember member;
    member.id = spec.id;
    member.featurizer = Featurizer::fit(tokens, ids, spec.featurizer);

    std::vector<SparseVector> X;
    X.reserve(tokens.size());
    for (const auto& t : tokens) X.push_back(member.featurizer.transform(t));

    CalibratedTrainOptions options;
    options.params = spec.params;
    options.params.seed = derive_seed(seed, "member:" + spec.id);
    options.mode = spec.probability;
    options.jobs = jobs;
    member.model = train_calibrated(X, labels, scheme.classes, options);
    ensemble.members.push_back(std::move(member));
  }
  return ensemble;
}

}  // namespace juris
