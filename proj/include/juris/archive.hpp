#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>

namespace juris {

/// Visits every `.xml` member of a corpus source in lexicographic name order.
/// The source may be a directory (searched recursively), a tar archive
/// (optionally gzip-compressed) or a zip archive using stored or deflated
/// entries. Member names are relative to the source root and use '/'.
///
/// Throws Error(Io) if the source is unreadable, ParseError if an archive
/// is corrupt.
void for_each_xml_source(
    const std::filesystem::path& source,
    const std::function<void(std::string_view name, std::string_view contents)>& visit);

std::string read_file(const std::filesystem::path& path);

/// Writes through a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace juris
