#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "juris/corpus.hpp"
#include "juris/evaluation.hpp"
#include "juris/rng.hpp"
#include "oracles.hpp"

namespace synthetic {

struct Fixture {
  juris::LabelScheme scheme;
  std::vector<juris::LabeledDocument> docs;
};

/// `classes` labels, each with its own keyword pool, over a shared noise
/// vocabulary. Every document mixes a few keywords of its class into noise.
Fixture separable_fixture(std::size_t classes = 5, std::size_t docs = 2000, std::uint64_t seed = 7);

/// Tiny dense binary problem: 2..12 points, 1..4 dims, both labels present.
oracle::QpProblem tiny_problem(juris::Rng& rng);

juris::SparseVector to_sparse(const std::vector<double>& dense);

/// Random mixture of noise words, digits, punctuation, accented and
/// upper-case label forms, and stray combining marks.
std::string random_text(juris::Rng& rng, const std::vector<std::string>& planted_forms);

/// Upper-cases, capitalizes or re-accents a folded form.
std::string disguise(juris::Rng& rng, const std::string& form);

/// Writes one XML file per document using the default schema names.
void write_xml_corpus(const std::filesystem::path& dir, const std::vector<juris::CaseDocument>& docs);
std::string to_xml(const juris::CaseDocument& doc);

/// Fresh empty directory under the system temp dir.
std::filesystem::path temp_dir(const std::string& name);

}  // namespace synthetic
