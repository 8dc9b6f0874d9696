#include "juris/unicode.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <stdexcept>

namespace juris::unicode {
namespace {

// Decodes one code point at `pos`, advancing it. Returns -1 for an invalid
// sequence (pos still advances by at least one byte).
UChar32 next_code_point(std::string_view text, std::size_t& pos) {
  const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
  const auto length = static_cast<int32_t>(text.size());
  auto i = static_cast<int32_t>(pos);
  UChar32 c;
  U8_NEXT(bytes, i, length, c);
  pos = static_cast<std::size_t>(i);
  return c;
}

bool is_mark(UChar32 c) {
  const auto type = u_charType(c);
  return type == U_NON_SPACING_MARK || type == U_COMBINING_SPACING_MARK ||
         type == U_ENCLOSING_MARK;
}

bool is_ascii(std::string_view text) {
  return std::all_of(text.begin(), text.end(),
                     [](char c) { return static_cast<unsigned char>(c) < 0x80; });
}

const icu::Normalizer2& nfd() {
  UErrorCode status = U_ZERO_ERROR;
  const auto* instance = icu::Normalizer2::getNFDInstance(status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU NFD normalizer unavailable");
  return *instance;
}

const icu::Normalizer2& nfc() {
  UErrorCode status = U_ZERO_ERROR;
  const auto* instance = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU NFC normalizer unavailable");
  return *instance;
}

void append_utf8(std::string& out, UChar32 c) {
  char buffer[U8_MAX_LENGTH];
  int32_t n = 0;
  U8_APPEND_UNSAFE(reinterpret_cast<uint8_t*>(buffer), n, c);
  out.append(buffer, static_cast<std::size_t>(n));
}

}  // namespace

std::vector<WordSpan> find_words(std::string_view text) {
  std::vector<WordSpan> words;
  std::size_t pos = 0;
  bool in_word = false;
  WordSpan current;
  while (pos < text.size()) {
    const std::size_t start = pos;
    const UChar32 c = next_code_point(text, pos);
    const bool word_char = c >= 0 && (u_isalnum(c) || (in_word && is_mark(c)));
    if (word_char) {
      if (!in_word) {
        current.begin = start;
        in_word = true;
      }
      current.end = pos;
    } else if (in_word) {
      words.push_back(current);
      in_word = false;
    }
  }
  if (in_word) words.push_back(current);
  return words;
}

std::string lowercase(std::string_view text) {
  if (is_ascii(text)) {
    std::string out(text);
    for (char& c : out) {
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
  }
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t start = pos;
    const UChar32 c = next_code_point(text, pos);
    if (c < 0) {
      out.append(text.substr(start, pos - start));
    } else {
      append_utf8(out, u_tolower(c));
    }
  }
  return out;
}

std::string fold(std::string_view text) {
  std::string lowered = lowercase(text);
  if (is_ascii(lowered)) return lowered;

  UErrorCode status = U_ZERO_ERROR;
  icu::UnicodeString decomposed =
      nfd().normalize(icu::UnicodeString::fromUTF8(lowered), status);
  if (U_FAILURE(status)) return lowered;

  icu::UnicodeString stripped;
  for (int32_t i = 0; i < decomposed.length();) {
    const UChar32 c = decomposed.char32At(i);
    if (u_charType(c) != U_NON_SPACING_MARK) stripped.append(c);
    i += U16_LENGTH(c);
  }
  icu::UnicodeString composed = nfc().normalize(stripped, status);
  if (U_FAILURE(status)) return lowered;
  std::string out;
  composed.toUTF8String(out);
  return out;
}

std::string collapse_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t start = pos;
    const UChar32 c = next_code_point(text, pos);
    if (c >= 0 && u_isUWhiteSpace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.append(text.substr(start, pos - start));
  }
  return out;
}

std::string remove_decimal_digits(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t start = pos;
    const UChar32 c = next_code_point(text, pos);
    if (c >= 0 && u_charType(c) == U_DECIMAL_DIGIT_NUMBER) continue;
    out.append(text.substr(start, pos - start));
  }
  return out;
}

std::size_t count_decimal_digits(std::string_view text) {
  std::size_t count = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const UChar32 c = next_code_point(text, pos);
    if (c >= 0 && u_charType(c) == U_DECIMAL_DIGIT_NUMBER) ++count;
  }
  return count;
}

bool is_valid_utf8(std::string_view text) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (next_code_point(text, pos) < 0) return false;
  }
  return true;
}

}  // namespace juris::unicode
