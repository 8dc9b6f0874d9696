#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "juris/ensemble.hpp"

namespace juris {

std::string hex64(std::uint64_t value);

/// Self-describing JSON for one member: classes, dense weights, biases,
/// Platt parameters, training parameters, IDF weights and the hash of the
/// vocabulary it was trained against. Doubles round-trip exactly.
nlohmann::json member_to_json(const EnsembleMember& member);

/// Rebuilds a member from its model JSON and vocabulary text. Throws
/// Error(Integrity) when the vocabulary hash does not match the model.
EnsembleMember member_from_json(const nlohmann::json& model, std::string_view vocabulary_tsv,
                                const FeaturizerConfig& featurizer);

/// Writes manifest.json plus model_<id>.json and vocab_<id>.tsv per member
/// into `dir`. Keys of `extra` are merged into the manifest.
void save_ensemble(const EnsembleModel& ensemble, const std::filesystem::path& dir,
                   const nlohmann::json& extra = nlohmann::json::object());

/// Loads an ensemble from its manifest; `manifest_out` receives the raw
/// manifest. Throws Error(Integrity) on hash or class-order mismatches and
/// Error(Io)/ParseError for missing or malformed files.
EnsembleModel load_ensemble(const std::filesystem::path& manifest_path,
                            nlohmann::json* manifest_out = nullptr);

}  // namespace juris
