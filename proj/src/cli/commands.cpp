#include <algorithm>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include <CLI11.hpp>

#include "juris/archive.hpp"
#include "juris/cli.hpp"
#include "juris/error.hpp"
#include "juris/persistence.hpp"
#include "juris/rng.hpp"

namespace fs = std::filesystem;

namespace juris::cli {

namespace {

constexpr const char* kLexiconFile = "lexicon.tsv";

nlohmann::json read_json(const fs::path& path) {
  try {
    return nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what(), e.byte);
  }
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  write_file_atomic(path, j.dump(2) + "\n");
}

void require_file(const fs::path& path, const char* produced_by) {
  if (!fs::exists(path)) {
    throw Error(ErrorKind::Config,
                path.string() + " not found; run `juris " + std::string(produced_by) + "` first");
  }
}

std::vector<CaseDocument> read_ingested(const ExperimentConfig& config) {
  require_file(config.corpus_file(), "ingest");
  return read_corpus_jsonl(read_file(config.corpus_file()));
}

LabelScheme read_scheme(const ExperimentConfig& config) {
  require_file(config.scheme_file(), "mask");
  const LabelScheme scheme = scheme_from_json(read_json(config.scheme_file()));
  if (scheme.task != config.task) {
    throw Error(ErrorKind::Config, std::string("scheme.json was built for task ") + to_string(scheme.task) +
                                       " but the config asks for " + to_string(config.task));
  }
  return scheme;
}

}  // namespace

CorpusStats cmd_ingest(const ExperimentConfig& config) {
  if (config.corpus_source.empty()) throw Error(ErrorKind::Config, "corpus.source is required");
  if (!fs::exists(config.corpus_source)) {
    throw Error(ErrorKind::Config, "corpus source not found: " + config.corpus_source.string());
  }
  IngestResult result = ingest_corpus(config.corpus_source, config.schema);
  fs::create_directories(config.output_dir);
  write_file_atomic(config.corpus_file(), write_corpus_jsonl(result.documents));
  write_json(config.output_dir / "corpus_stats.json", to_json(result.stats));
  return result.stats;
}

MaskReport cmd_mask(const ExperimentConfig& config) {
  const auto documents = read_ingested(config);
  const LabelScheme scheme = build_label_scheme(documents, config.task, config.min_count);
  const MaskLexicon lexicon = load_lexicon(config);
  const TaskMasker masker(scheme, lexicon);

  MaskReport report;
  std::size_t excluded = 0;
  std::string lines;
  for (const auto& doc : documents) {
    const auto cls = assign_class(doc, scheme);
    if (!cls) {
      ++excluded;
      continue;
    }
    MaskResult masked = masker.apply(doc.description);
    ++report.documents_scanned;
    if (masked.tokens_removed > 0) ++report.documents_touched;
    report.tokens_removed += masked.tokens_removed;
    report.residual_hits += masker.residual_hits(masked.text);

    CaseDocument out = doc;
    out.description = std::move(masked.text);
    nlohmann::json j = to_json(out);
    j["label"] = scheme.classes[*cls];
    lines += j.dump() + "\n";
  }

  fs::create_directories(config.output_dir);
  write_file_atomic(config.masked_file(), lines);
  write_json(config.scheme_file(), to_json(scheme));
  nlohmann::json report_json = to_json(report);
  report_json["task"] = to_string(config.task);
  report_json["documents_excluded"] = excluded;
  write_json(config.output_dir / "mask_report.json", report_json);
  return report;
}

std::vector<LabeledDocument> read_masked_corpus(const fs::path& path, const LabelScheme& scheme) {
  std::vector<LabeledDocument> docs;
  std::istringstream in(read_file(path));
  std::string line;
  std::size_t offset = 0;
  while (std::getline(in, line)) {
    const std::size_t line_start = offset;
    offset += line.size() + 1;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      const std::string label = j.at("label").get<std::string>();
      const auto index = scheme.index_of(label);
      if (!index) throw Error(ErrorKind::Label, "label '" + label + "' is not in the scheme");
      docs.push_back({j.at("id").get<std::string>(), j.at("description").get<std::string>(), *index});
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string() + ": " + e.what(), line_start);
    }
  }
  if (docs.empty()) throw Error(ErrorKind::EmptyCorpus, path.string() + " holds no documents");
  return docs;
}

EvaluationReport cmd_evaluate(const ExperimentConfig& config) {
  const LabelScheme scheme = read_scheme(config);
  require_file(config.masked_file(), "mask");
  const auto docs = read_masked_corpus(config.masked_file(), scheme);
  CvConfig cv;
  cv.k = config.k;
  cv.seed = config.seed;
  cv.members = config.members;
  cv.jobs = config.jobs;
  EvaluationReport report = run_cv(docs, scheme, cv);
  write_json(config.output_dir / "report.json", to_json(report));
  write_file_atomic(config.output_dir / "report.txt", format_report_table(report, config.averaging));
  write_file_atomic(config.output_dir / "confusion.csv", format_confusion_csv(report.confusion));
  return report;
}

void cmd_train(const ExperimentConfig& config) {
  const LabelScheme scheme = read_scheme(config);
  require_file(config.masked_file(), "mask");
  const auto docs = read_masked_corpus(config.masked_file(), scheme);
  std::vector<TokenList> tokens;
  std::vector<std::string> ids;
  std::vector<std::size_t> labels;
  tokens.reserve(docs.size());
  for (const auto& d : docs) {
    tokens.push_back(tokenize(d.text));
    ids.push_back(d.id);
    labels.push_back(d.label);
  }
  const EnsembleModel ensemble = train_ensemble(tokens, ids, labels, scheme, config.members,
                                                derive_seed(config.seed, "train"), config.jobs);
  const fs::path dir = config.model_dir();
  fs::create_directories(dir);
  write_file_atomic(dir / kLexiconFile, format_lexicon(load_lexicon(config)));
  save_ensemble(ensemble, dir,
                {{"task", to_string(config.task)},
                 {"seed", config.seed},
                 {"training_documents", docs.size()},
                 {"masking", {{"lexicon", kLexiconFile}}}});
}

void cmd_predict(const fs::path& manifest_path, const fs::path& input, std::ostream& out, bool apply_mask) {
  if (!fs::exists(manifest_path)) throw Error(ErrorKind::Config, "manifest not found: " + manifest_path.string());
  if (!fs::exists(input)) throw Error(ErrorKind::Config, "input not found: " + input.string());
  nlohmann::json manifest;
  const EnsembleModel ensemble = load_ensemble(manifest_path, &manifest);

  std::optional<TaskMasker> masker;
  if (apply_mask) {
    MaskLexicon lexicon = default_ruling_lexicon();
    if (manifest.contains("masking")) {
      const fs::path lexicon_path =
          manifest_path.parent_path() / manifest["masking"].at("lexicon").get<std::string>();
      lexicon = parse_lexicon(read_file(lexicon_path));
    }
    masker.emplace(ensemble.scheme, lexicon);
  }

  std::istringstream in(read_file(input));
  std::string line;
  std::size_t index = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string text = masker ? masker->apply(line).text : line;
    const Prediction p = predict(ensemble, text);
    nlohmann::json probabilities = nlohmann::json::object();
    for (std::size_t c = 0; c < ensemble.scheme.size(); ++c) probabilities[ensemble.scheme.classes[c]] = p.fused[c];
    out << nlohmann::json{{"index", index}, {"prediction", p.label}, {"probabilities", probabilities}}.dump()
        << "\n";
    ++index;
  }
}

nlohmann::json cmd_audit_features(const fs::path& manifest_path, std::size_t top_n) {
  if (!fs::exists(manifest_path)) {
    throw Error(ErrorKind::State, "no trained model at " + manifest_path.string() + "; run `juris train` first");
  }
  const EnsembleModel ensemble = load_ensemble(manifest_path);
  nlohmann::json result = nlohmann::json::object();
  for (const auto& member : ensemble.members) {
    const auto& terms = member.featurizer.vocabulary().terms();
    nlohmann::json per_class = nlohmann::json::object();
    for (std::size_t c = 0; c < member.model.base.classes.size(); ++c) {
      const auto& w = member.model.base.weights[c];
      std::vector<std::size_t> order(w.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      const std::size_t n = std::min(top_n, order.size());
      std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n), order.end(),
                        [&](std::size_t a, std::size_t b) { return w[a] > w[b] || (w[a] == w[b] && a < b); });
      nlohmann::json top = nlohmann::json::array();
      for (std::size_t i = 0; i < n; ++i) top.push_back({{"term", terms[order[i]]}, {"weight", w[order[i]]}});
      per_class[member.model.base.classes[c]] = top;
    }
    result[member.id] = per_class;
  }
  return result;
}

namespace {

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Io:
    case ErrorKind::Leakage:
      return kUnexpected;
    default:
      return kValidation;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Classify court rulings with masked n-gram SVM ensembles", "juris"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> jobs;
  app.add_option("--config", config_path, "Experiment config (JSON)");
  app.add_option("--seed", seed, "Override the cross-validation seed");
  app.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  auto* ingest = app.add_subcommand("ingest", "Parse the corpus into corpus.jsonl");
  auto* mask = app.add_subcommand("mask", "Build the label scheme and mask label-revealing tokens");
  auto* evaluate = app.add_subcommand("evaluate", "Stratified cross-validation of the configured members");
  auto* train = app.add_subcommand("train", "Train on the full masked corpus and save the model");
  auto* predict_cmd = app.add_subcommand("predict", "Classify one description per input line");
  auto* audit = app.add_subcommand("audit-features", "List the strongest features per class");

  std::string manifest, input, output;
  bool no_mask = false;
  predict_cmd->add_option("--manifest", manifest, "Model manifest (defaults to <output_dir>/model/manifest.json)");
  predict_cmd->add_option("--input", input, "Text file, one description per line")->required();
  predict_cmd->add_option("--output", output, "JSONL output (stdout when omitted)");
  predict_cmd->add_flag("--no-mask", no_mask, "Classify the input text as-is");
  std::size_t top_n = 20;
  audit->add_option("--manifest", manifest, "Model manifest (defaults to <output_dir>/model/manifest.json)");
  audit->add_option("--top-n", top_n, "Terms per class")->check(CLI::NonNegativeNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  }

  try {
    auto load = [&] {
      if (config_path.empty()) throw Error(ErrorKind::Config, "--config is required");
      ExperimentConfig config = load_config(config_path);
      if (seed) config.seed = *seed;
      if (jobs) config.jobs = *jobs;
      return config;
    };
    auto manifest_path = [&]() -> fs::path {
      if (!manifest.empty()) return manifest;
      return load().model_dir() / "manifest.json";
    };

    if (ingest->parsed()) {
      const CorpusStats stats = cmd_ingest(load());
      out << "ingested " << stats.total_ingested << " documents, retained " << stats.retained() << " ("
          << stats.duplicates_removed << " duplicates, " << stats.incomplete_removed << " incomplete)\n";
    } else if (mask->parsed()) {
      const MaskReport report = cmd_mask(load());
      out << "masked " << report.documents_scanned << " documents, removed " << report.tokens_removed
          << " tokens, residual hits " << report.residual_hits << "\n";
      if (report.residual_hits > 0) {
        err << "error: " << report.residual_hits << " forbidden tokens remain after masking\n";
        return kMaskResidual;
      }
    } else if (evaluate->parsed()) {
      const ExperimentConfig config = load();
      const EvaluationReport report = cmd_evaluate(config);
      out << format_report_table(report, config.averaging);
      for (const auto& w : report.warnings) err << "warning: " << w << "\n";
      for (const auto& w : report.non_convergence_flags) err << "warning: " << w << "\n";
    } else if (train->parsed()) {
      const ExperimentConfig config = load();
      cmd_train(config);
      out << "model written to " << config.model_dir().string() << "\n";
    } else if (predict_cmd->parsed()) {
      const fs::path path = manifest_path();
      if (output.empty()) {
        cmd_predict(path, input, out, !no_mask);
      } else {
        std::ostringstream buffer;
        cmd_predict(path, input, buffer, !no_mask);
        write_file_atomic(output, buffer.str());
      }
    } else if (audit->parsed()) {
      const fs::path path = manifest_path();
      const nlohmann::json result = cmd_audit_features(path, top_n);
      if (!config_path.empty()) {
        const ExperimentConfig config = load();
        fs::create_directories(config.output_dir);
        write_json(config.output_dir / "audit_features.json", result);
      }
      out << result.dump(2) << "\n";
    }
    return kSuccess;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUnexpected;
  }
}

}  // namespace juris::cli
