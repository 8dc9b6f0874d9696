#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// UTF-8 text helpers shared by tokenization and masking. Invalid byte
// sequences are treated as single non-word characters and passed through.
namespace juris::unicode {

/// Byte range [begin, end) of one word inside a UTF-8 string.
struct WordSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// Maximal runs of letters and digits. Combining marks extend a run that has
/// already started, so decomposed accents stay inside their word. Apostrophes,
/// hyphens and underscores are separators.
std::vector<WordSpan> find_words(std::string_view text);

std::string lowercase(std::string_view text);

/// Lowercase, then drop combining marks after canonical decomposition:
/// "Irrecevabilité" -> "irrecevabilite".
std::string fold(std::string_view text);

/// Replaces every run of Unicode white space with one ASCII space and trims.
std::string collapse_whitespace(std::string_view text);

/// Removes every code point of general category Nd.
std::string remove_decimal_digits(std::string_view text);

std::size_t count_decimal_digits(std::string_view text);

bool is_valid_utf8(std::string_view text);

}  // namespace juris::unicode
