#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "juris/calibration.hpp"
#include "juris/corpus.hpp"
#include "juris/features.hpp"

namespace juris {

/// How to build one ensemble member.
struct MemberSpec {
  std::string id;
  FeaturizerConfig featurizer;
  TrainParams params;
  ProbabilityMode probability = ProbabilityMode::Platt;
};

nlohmann::json to_json(const MemberSpec& spec);
/// Throws Error(Config) for invalid values or an id that is not [A-Za-z0-9_.-]+.
MemberSpec member_spec_from_json(const nlohmann::json& j);

/// unigram counts, unigram+bigram counts, unigram+bigram TF-IDF.
std::vector<MemberSpec> default_members();

/// Unigram+bigram counts, the single-SVM comparison configuration.
MemberSpec baseline_member();

struct EnsembleMember {
  std::string id;
  Featurizer featurizer;
  CalibratedModel model;
};

struct EnsembleModel {
  LabelScheme scheme;
  std::vector<EnsembleMember> members;

  /// Throws Error(State) for an empty or untrained ensemble and
  /// Error(Integrity) when a member's class order differs from the scheme.
  void validate() const;
};

/// Entry-wise mean. Throws Error(Input) for an empty list, mismatched
/// lengths, or a vector that does not sum to 1 within 1e-6.
std::vector<double> mean_probability(std::span<const std::vector<double>> probs);

/// Index of the largest entry; ties go to the lowest index.
std::size_t argmax(std::span<const double> values);

struct Prediction {
  std::size_t class_index = 0;
  std::string label;
  std::vector<double> fused;
  std::vector<std::vector<double>> per_member;
};

/// Each member vectorizes the already-masked text with its own featurizer;
/// the prediction is the argmax of the mean probability vector.
Prediction predict(const EnsembleModel& ensemble, std::string_view text);
Prediction predict_tokens(const EnsembleModel& ensemble, const TokenList& tokens);

/// Trains every member on the same documents. Member seeds derive from
/// `seed` and the member id, so a member trains identically alone or
/// alongside others.
EnsembleModel train_ensemble(std::span<const TokenList> tokens, std::span<const std::string> ids,
                             std::span<const std::size_t> labels, const LabelScheme& scheme,
                             std::span<const MemberSpec> specs, std::uint64_t seed, unsigned jobs = 1);

}  // namespace juris
