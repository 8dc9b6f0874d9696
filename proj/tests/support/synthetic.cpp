#include "synthetic.hpp"

#include <cctype>
#include <fstream>
#include <unistd.h>

namespace synthetic {

namespace {

std::string word(std::string prefix, std::size_t n) {
  do {
    prefix.push_back(static_cast<char>('a' + n % 26));
    n /= 26;
  } while (n > 0);
  return prefix;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

Fixture separable_fixture(std::size_t classes, std::size_t docs, std::uint64_t seed) {
  juris::Rng rng(seed);
  Fixture f;
  f.scheme.task = juris::Task::LawArea;
  f.scheme.min_count = 0;
  for (std::size_t c = 0; c < classes; ++c) f.scheme.classes.push_back(word("class", c));

  constexpr std::size_t kKeywords = 12;
  constexpr std::size_t kNoise = 400;
  for (std::size_t i = 0; i < docs; ++i) {
    const std::size_t label = rng.below(classes);
    const std::size_t length = 30 + rng.below(30);
    std::string text;
    for (std::size_t t = 0; t < length; ++t) {
      if (!text.empty()) text.push_back(' ');
      if (rng.uniform() < 0.15) {
        text += word("kw" + std::string(1, static_cast<char>('a' + label)) + "z", rng.below(kKeywords));
      } else {
        text += word("nz", rng.below(kNoise));
      }
    }
    f.docs.push_back({"doc" + std::to_string(i), std::move(text), label});
  }
  return f;
}

oracle::QpProblem tiny_problem(juris::Rng& rng) {
  oracle::QpProblem p;
  const std::size_t n = 2 + rng.below(11);
  const std::size_t d = 1 + rng.below(4);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x(d);
    for (auto& v : x) v = rng.uniform() < 0.2 ? 0.0 : 4.0 * rng.uniform() - 2.0;
    p.X.push_back(std::move(x));
    p.y.push_back(rng.uniform() < 0.5 ? 1 : -1);
  }
  p.y[0] = 1;
  p.y[1] = -1;
  return p;
}

juris::SparseVector to_sparse(const std::vector<double>& dense) {
  juris::SparseVector v;
  v.dims = dense.size();
  for (std::size_t k = 0; k < dense.size(); ++k) {
    if (dense[k] != 0.0) v.entries.push_back({static_cast<std::uint32_t>(k), dense[k]});
  }
  return v;
}

std::string disguise(juris::Rng& rng, const std::string& form) {
  std::string out = form;
  switch (rng.below(4)) {
    case 0:
      for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      break;
    case 1:
      out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
      break;
    case 2: {
      // precomposed accent on the first 'e'
      const auto pos = out.find('e');
      if (pos != std::string::npos) out.replace(pos, 1, "\xC3\xA9");
      break;
    }
    default: {
      // decomposed accent: e + U+0301
      const auto pos = out.rfind('e');
      if (pos != std::string::npos) out.insert(pos + 1, "\xCC\x81");
      break;
    }
  }
  return out;
}

std::string random_text(juris::Rng& rng, const std::vector<std::string>& planted_forms) {
  static const std::vector<std::string> noise = {
      "la", "cour", "arrêt", "attendu", "que", "l'appel", "société", "Mme", "M.", "article",
      "code", "civil", "ÉTAT", "délai", "jugement", "Paris", "x", "renvoyé", "casserole", "rejeton"};
  static const std::vector<std::string> punctuation = {",", ".", ";", " - ", "'", "(", ")", "\xE2\x80\x99", "\xC2\xA0"};
  std::string text;
  const std::size_t n = rng.below(40);
  for (std::size_t i = 0; i < n; ++i) {
    switch (rng.below(6)) {
      case 0:
        if (!planted_forms.empty()) text += disguise(rng, planted_forms[rng.below(planted_forms.size())]);
        break;
      case 1:
        text += std::to_string(rng.below(3000));
        break;
      case 2:
        text += punctuation[rng.below(punctuation.size())];
        break;
      case 3:
        text += "\xCC\x81";  // stray combining mark
        break;
      default:
        text += noise[rng.below(noise.size())];
    }
    text += rng.below(3) == 0 ? "  " : " ";
  }
  return text;
}

std::string to_xml(const juris::CaseDocument& doc) {
  std::string xml = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<case>\n";
  xml += "  <id>" + xml_escape(doc.id) + "</id>\n";
  if (doc.law_area_raw) xml += "  <law_area>" + xml_escape(*doc.law_area_raw) + "</law_area>\n";
  if (doc.ruling_raw) xml += "  <ruling>" + xml_escape(*doc.ruling_raw) + "</ruling>\n";
  if (doc.year) xml += "  <date>" + std::to_string(*doc.year) + "-03-14</date>\n";
  xml += "  <description>" + xml_escape(doc.description) + "</description>\n</case>\n";
  return xml;
}

void write_xml_corpus(const std::filesystem::path& dir, const std::vector<juris::CaseDocument>& docs) {
  std::filesystem::create_directories(dir);
  for (const auto& doc : docs) {
    std::ofstream out(dir / (doc.id + ".xml"), std::ios::binary);
    out << to_xml(doc);
  }
}

std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("juris-test-" + std::to_string(::getpid()) + "-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace synthetic
