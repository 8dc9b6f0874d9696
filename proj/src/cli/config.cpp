#include <set>

#include "juris/archive.hpp"
#include "juris/cli.hpp"
#include "juris/error.hpp"

namespace fs = std::filesystem;

namespace juris::cli {

namespace {

fs::path resolve(const fs::path& base, const std::string& value) {
  fs::path p(value);
  return p.is_absolute() ? p : base / p;
}

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw Error(ErrorKind::Config, "config must be a JSON object");
  ExperimentConfig config;
  try {
    if (j.contains("corpus")) {
      const auto& corpus = j["corpus"];
      if (corpus.contains("source")) config.corpus_source = resolve(base_dir, corpus["source"].get<std::string>());
      if (corpus.contains("schema_map")) {
        const auto& s = corpus["schema_map"];
        config.schema.id = s.value("id", config.schema.id);
        config.schema.description = s.value("description", config.schema.description);
        config.schema.law_area = s.value("law_area", config.schema.law_area);
        config.schema.ruling = s.value("ruling", config.schema.ruling);
        config.schema.date = s.value("date", config.schema.date);
      }
    }
    config.task = parse_task(j.at("task").get<std::string>());
    config.min_count = j.value("min_count", config.min_count);
    if (j.contains("masking") && j["masking"].contains("lexicon")) {
      config.lexicon = resolve(base_dir, j["masking"]["lexicon"].get<std::string>());
    }
    if (j.contains("members")) {
      if (!j["members"].is_array()) throw Error(ErrorKind::Config, "members must be an array");
      config.members.clear();
      for (const auto& m : j["members"]) config.members.push_back(member_spec_from_json(m));
    }
    if (j.contains("cv")) {
      const auto& cv = j["cv"];
      const auto k = cv.value("k", static_cast<long long>(config.k));
      if (k < 2) throw Error(ErrorKind::Config, "cv.k must be at least 2 (got " + std::to_string(k) + ")");
      config.k = static_cast<std::size_t>(k);
      config.seed = cv.value("seed", config.seed);
    }
    config.output_dir = resolve(base_dir, j.value("output_dir", std::string("out")));
    if (j.contains("averaging")) {
      config.averaging.clear();
      for (const auto& a : j["averaging"]) config.averaging.push_back(parse_averaging(a.get<std::string>()));
    }
    config.jobs = j.value("jobs", config.jobs);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, std::string("invalid config: ") + e.what());
  }

  if (config.members.empty()) throw Error(ErrorKind::Config, "members must not be empty");
  std::set<std::string> ids;
  for (const auto& m : config.members) {
    if (!ids.insert(m.id).second) throw Error(ErrorKind::Config, "duplicate member id '" + m.id + "'");
  }
  if (config.averaging.empty()) throw Error(ErrorKind::Config, "averaging must not be empty");
  if (config.lexicon && !fs::exists(*config.lexicon)) {
    throw Error(ErrorKind::Config, "lexicon file not found: " + config.lexicon->string());
  }
  return config;
}

ExperimentConfig load_config(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorKind::Config, "config file not found: " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Config, path.string() + ": " + e.what());
  }
  return config_from_json(j, path.parent_path());
}

MaskLexicon load_lexicon(const ExperimentConfig& config) {
  if (!config.lexicon) return default_ruling_lexicon();
  try {
    return parse_lexicon(read_file(*config.lexicon));
  } catch (const ParseError& e) {
    throw Error(ErrorKind::Config, config.lexicon->string() + ": " + e.what());
  }
}

}  // namespace juris::cli
