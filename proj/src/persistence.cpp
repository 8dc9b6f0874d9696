#include "juris/persistence.hpp"

#include <cstdio>

#include "juris/archive.hpp"
#include "juris/error.hpp"
#include "juris/rng.hpp"

namespace fs = std::filesystem;

namespace juris {

namespace {

constexpr const char* kModelFormat = "juris-model/1";
constexpr const char* kManifestFormat = "juris-ensemble/1";

nlohmann::json parse_json_file(const fs::path& path) {
  const std::string text = read_file(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what(), e.byte);
  }
}

}  // namespace

std::string hex64(std::uint64_t value) {
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(value));
  return buffer;
}

nlohmann::json member_to_json(const EnsembleMember& member) {
  const auto& model = member.model;
  nlohmann::json platt = nlohmann::json::array();
  for (const auto& p : model.platt) platt.push_back({{"A", p.A}, {"B", p.B}, {"degenerate", p.degenerate}});
  nlohmann::json status = nlohmann::json::array();
  for (const auto& s : model.base.status) {
    status.push_back({{"iterations", s.iterations}, {"converged", s.converged}, {"degenerate", s.degenerate}});
  }
  nlohmann::json idf = nullptr;
  if (const auto& weights = member.featurizer.idf()) {
    idf = {{"doc_count", weights->doc_count}, {"values", weights->idf}};
  }
  return {{"format", kModelFormat},
          {"member_id", member.id},
          {"classes", model.base.classes},
          {"dims", model.base.dims},
          {"vocabulary_hash", hex64(member.featurizer.vocabulary().hash())},
          {"train_params", to_json(model.base.params)},
          {"probability", to_string(model.mode)},
          {"weights", model.base.weights},
          {"bias", model.base.bias},
          {"platt", platt},
          {"status", status},
          {"idf", idf},
          {"warnings", model.warnings}};
}

EnsembleMember member_from_json(const nlohmann::json& j, std::string_view vocabulary_tsv,
                                const FeaturizerConfig& featurizer) {
  try {
    if (j.at("format") != kModelFormat) throw Error(ErrorKind::Integrity, "unsupported model format");
    EnsembleMember member;
    member.id = j.at("member_id").get<std::string>();

    // the stored hash covers the canonical TSV bytes, so check them before parsing
    if (hex64(fnv1a(vocabulary_tsv)) != j.at("vocabulary_hash").get<std::string>()) {
      throw Error(ErrorKind::Integrity, "member '" + member.id + "': vocabulary hash does not match the model");
    }
    Vocabulary vocab = Vocabulary::from_tsv(vocabulary_tsv, featurizer.ngrams, featurizer.min_df);

    std::optional<IdfWeights> idf;
    if (!j.at("idf").is_null()) {
      idf = IdfWeights{j["idf"].at("values").get<std::vector<double>>(),
                       j["idf"].at("doc_count").get<std::size_t>()};
    }
    member.featurizer = Featurizer(featurizer, std::move(vocab), std::move(idf));

    auto& model = member.model;
    model.mode = parse_probability_mode(j.at("probability").get<std::string>());
    model.base.classes = j.at("classes").get<std::vector<std::string>>();
    model.base.dims = j.at("dims").get<std::size_t>();
    model.base.params = train_params_from_json(j.at("train_params"));
    model.base.weights = j.at("weights").get<std::vector<std::vector<double>>>();
    model.base.bias = j.at("bias").get<std::vector<double>>();
    for (const auto& s : j.at("status")) {
      model.base.status.push_back({s.at("iterations").get<int>(), s.at("converged").get<bool>(),
                                   s.at("degenerate").get<bool>()});
    }
    for (const auto& p : j.at("platt")) {
      model.platt.push_back({p.at("A").get<double>(), p.at("B").get<double>(), p.at("degenerate").get<bool>()});
    }
    model.warnings = j.value("warnings", std::vector<std::string>{});

    const std::size_t k = model.base.classes.size();
    bool consistent = model.base.weights.size() == k && model.base.bias.size() == k &&
                      model.base.status.size() == k &&
                      (model.mode == ProbabilityMode::Softmax || model.platt.size() == k) &&
                      model.base.dims == member.featurizer.dims();
    for (const auto& row : model.base.weights) consistent = consistent && row.size() == model.base.dims;
    if (!consistent) throw Error(ErrorKind::Integrity, "member '" + member.id + "' has inconsistent array sizes");
    return member;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid model file: ") + e.what(), std::nullopt);
  }
}

void save_ensemble(const EnsembleModel& ensemble, const fs::path& dir, const nlohmann::json& extra) {
  ensemble.validate();
  fs::create_directories(dir);
  nlohmann::json members = nlohmann::json::array();
  for (const auto& member : ensemble.members) {
    const std::string model_file = "model_" + member.id + ".json";
    const std::string vocab_file = "vocab_" + member.id + ".tsv";
    write_file_atomic(dir / vocab_file, member.featurizer.vocabulary().to_tsv());
    write_file_atomic(dir / model_file, member_to_json(member).dump() + "\n");
    members.push_back({{"id", member.id},
                       {"featurizer", to_json(member.featurizer.config())},
                       {"model", model_file},
                       {"vocabulary", vocab_file},
                       {"vocabulary_hash", hex64(member.featurizer.vocabulary().hash())}});
  }
  nlohmann::json manifest = extra;
  manifest["format"] = kManifestFormat;
  manifest["scheme"] = to_json(ensemble.scheme);
  manifest["members"] = members;
  write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

EnsembleModel load_ensemble(const fs::path& manifest_path, nlohmann::json* manifest_out) {
  const nlohmann::json manifest = parse_json_file(manifest_path);
  const fs::path dir = manifest_path.parent_path();
  EnsembleModel ensemble;
  try {
    if (manifest.at("format") != kManifestFormat) throw Error(ErrorKind::Integrity, "unsupported manifest format");
    ensemble.scheme = scheme_from_json(manifest.at("scheme"));
    for (const auto& entry : manifest.at("members")) {
      const auto config = featurizer_config_from_json(entry.at("featurizer"));
      const std::string vocab_text = read_file(dir / entry.at("vocabulary").get<std::string>());
      const nlohmann::json model = parse_json_file(dir / entry.at("model").get<std::string>());
      if (model.value("vocabulary_hash", std::string()) != entry.at("vocabulary_hash").get<std::string>()) {
        throw Error(ErrorKind::Integrity, "manifest and model disagree on the vocabulary hash of member '" +
                                              entry.at("id").get<std::string>() + "'");
      }
      ensemble.members.push_back(member_from_json(model, vocab_text, config));
      if (ensemble.members.back().id != entry.at("id").get<std::string>()) {
        throw Error(ErrorKind::Integrity, "manifest member id does not match its model file");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(manifest_path.string() + ": invalid manifest: " + e.what(), std::nullopt);
  }
  ensemble.validate();
  if (manifest_out) *manifest_out = manifest;
  return ensemble;
}

}  // namespace juris
