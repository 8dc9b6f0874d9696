#include "juris/archive.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <vector>

#include "juris/error.hpp"

namespace fs = std::filesystem;

namespace juris {
namespace {

bool has_xml_extension(std::string_view name) {
  if (name.size() < 4) return false;
  std::string ext(name.substr(name.size() - 4));
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".xml";
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

void visit_directory(const fs::path& root,
                     const std::function<void(std::string_view, std::string_view)>& visit) {
  std::vector<std::string> names;
  std::error_code ec;
  for (fs::recursive_directory_iterator it(root, ec), end; it != end; it.increment(ec)) {
    if (ec) break;
    if (it->is_regular_file() && has_xml_extension(it->path().filename().string())) {
      names.push_back(fs::relative(it->path(), root).generic_string());
    }
  }
  if (ec) throw Error(ErrorKind::Io, "cannot traverse " + root.string() + ": " + ec.message());
  std::sort(names.begin(), names.end());
  for (const auto& name : names) visit(name, read_file(root / name));
}

// ---- tar (plain or gzip) ----------------------------------------------------

struct GzCloser {
  void operator()(gzFile f) const { gzclose(f); }
};
using GzHandle = std::unique_ptr<gzFile_s, GzCloser>;

std::uint64_t parse_octal(const char* field, std::size_t width) {
  std::uint64_t value = 0;
  for (std::size_t i = 0; i < width; ++i) {
    const char c = field[i];
    if (c == '\0' || c == ' ') {
      if (value != 0) break;
      continue;
    }
    if (c < '0' || c > '7') throw ParseError("bad octal field in tar header", std::nullopt);
    value = value * 8 + static_cast<std::uint64_t>(c - '0');
  }
  return value;
}

std::string cstr_field(const char* field, std::size_t width) {
  return std::string(field, strnlen(field, width));
}

// Extracts the "path" record from a pax extended header, if any.
std::string pax_path(std::string_view records) {
  std::size_t pos = 0;
  while (pos < records.size()) {
    const auto space = records.find(' ', pos);
    if (space == std::string_view::npos) break;
    const auto length = std::stoul(std::string(records.substr(pos, space - pos)));
    if (length == 0 || pos + length > records.size()) break;
    auto record = records.substr(space + 1, length - (space - pos) - 2);
    if (record.starts_with("path=")) return std::string(record.substr(5));
    pos += length;
  }
  return {};
}

void visit_tar(const fs::path& path,
               const std::function<void(std::string_view, std::string_view)>& visit) {
  GzHandle file(gzopen(path.string().c_str(), "rb"));
  if (!file) throw Error(ErrorKind::Io, "cannot open archive " + path.string());

  auto read_exact = [&](char* buffer, std::size_t n) {
    std::size_t done = 0;
    while (done < n) {
      const int got = gzread(file.get(), buffer + done, static_cast<unsigned>(n - done));
      if (got <= 0) return done;
      done += static_cast<std::size_t>(got);
    }
    return done;
  };

  std::map<std::string, std::string> members;
  std::string pending_name;
  std::uint64_t offset = 0;
  char header[512];
  while (true) {
    const std::size_t got = read_exact(header, sizeof header);
    if (got == 0) break;
    if (got < sizeof header) throw ParseError("truncated tar header", offset);
    if (std::all_of(header, header + 512, [](char c) { return c == '\0'; })) break;

    const std::uint64_t size = parse_octal(header + 124, 12);
    const char type = header[156];
    const std::uint64_t padded = (size + 511) / 512 * 512;
    std::string data(padded, '\0');
    if (read_exact(data.data(), padded) < padded) throw ParseError("truncated tar member", offset);
    data.resize(size);
    offset += 512 + padded;

    if (type == 'L') {
      pending_name = cstr_field(data.data(), data.size());
      continue;
    }
    if (type == 'x') {
      pending_name = pax_path(data);
      continue;
    }
    std::string name = pending_name;
    pending_name.clear();
    if (name.empty()) {
      name = cstr_field(header, 100);
      const std::string prefix = cstr_field(header + 345, 155);
      if (std::string_view(header + 257, 5) == "ustar" && !prefix.empty()) {
        name = prefix + "/" + name;
      }
    }
    if ((type == '0' || type == '\0') && has_xml_extension(name)) {
      if (name.starts_with("./")) name.erase(0, 2);
      members[name] = std::move(data);
    }
  }
  for (const auto& [name, contents] : members) visit(name, contents);
}

// ---- zip --------------------------------------------------------------------

std::uint32_t le32(const std::string& b, std::size_t at) {
  if (at + 4 > b.size()) throw ParseError("truncated zip structure", at);
  return static_cast<std::uint32_t>(static_cast<unsigned char>(b[at])) |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 1])) << 8 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 2])) << 16 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 3])) << 24;
}

std::uint16_t le16(const std::string& b, std::size_t at) {
  if (at + 2 > b.size()) throw ParseError("truncated zip structure", at);
  return static_cast<std::uint16_t>(static_cast<unsigned char>(b[at]) |
                                    static_cast<unsigned char>(b[at + 1]) << 8);
}

std::string inflate_raw(std::string_view compressed, std::size_t expected, std::size_t offset) {
  std::string out(expected, '\0');
  z_stream stream{};
  if (inflateInit2(&stream, -MAX_WBITS) != Z_OK) throw ParseError("inflate init failed", offset);
  stream.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(compressed.data()));
  stream.avail_in = static_cast<uInt>(compressed.size());
  stream.next_out = reinterpret_cast<Bytef*>(out.data());
  stream.avail_out = static_cast<uInt>(out.size());
  const int rc = inflate(&stream, Z_FINISH);
  inflateEnd(&stream);
  if (rc != Z_STREAM_END || stream.total_out != expected) {
    throw ParseError("corrupt deflate stream in zip member", offset);
  }
  return out;
}

void visit_zip(const fs::path& path,
               const std::function<void(std::string_view, std::string_view)>& visit) {
  const std::string bytes = read_file(path);
  constexpr std::uint32_t kEndOfCentralDir = 0x06054b50;
  constexpr std::uint32_t kCentralEntry = 0x02014b50;
  constexpr std::uint32_t kLocalHeader = 0x04034b50;

  if (bytes.size() < 22) throw ParseError("zip archive too short", bytes.size());
  std::size_t eocd = std::string::npos;
  const std::size_t earliest = bytes.size() > 65557 ? bytes.size() - 65557 : 0;
  for (std::size_t at = bytes.size() - 22 + 1; at-- > earliest;) {
    if (le32(bytes, at) == kEndOfCentralDir) {
      eocd = at;
      break;
    }
  }
  if (eocd == std::string::npos) throw ParseError("zip end-of-central-directory not found", std::nullopt);

  const std::uint16_t entries = le16(bytes, eocd + 10);
  std::size_t at = le32(bytes, eocd + 16);
  std::map<std::string, std::string> members;
  for (std::uint16_t e = 0; e < entries; ++e) {
    if (le32(bytes, at) != kCentralEntry) throw ParseError("bad zip central directory entry", at);
    const std::uint16_t method = le16(bytes, at + 10);
    const std::uint32_t compressed_size = le32(bytes, at + 20);
    const std::uint32_t size = le32(bytes, at + 24);
    const std::uint16_t name_len = le16(bytes, at + 28);
    const std::uint16_t extra_len = le16(bytes, at + 30);
    const std::uint16_t comment_len = le16(bytes, at + 32);
    const std::uint32_t local = le32(bytes, at + 42);
    if (at + 46 + name_len > bytes.size()) throw ParseError("truncated zip entry name", at);
    std::string name = bytes.substr(at + 46, name_len);
    at += 46 + name_len + extra_len + comment_len;

    if (!has_xml_extension(name) || ends_with(name, "/")) continue;
    if (compressed_size == 0xffffffffu || size == 0xffffffffu) {
      throw ParseError("zip64 archives are not supported", local);
    }
    if (le32(bytes, local) != kLocalHeader) throw ParseError("bad zip local header", local);
    const std::size_t data = local + 30 + le16(bytes, local + 26) + le16(bytes, local + 28);
    if (data + compressed_size > bytes.size()) throw ParseError("truncated zip member", data);
    const std::string_view payload(bytes.data() + data, compressed_size);
    if (method == 0) {
      members[name] = std::string(payload);
    } else if (method == 8) {
      members[name] = inflate_raw(payload, size, data);
    } else {
      throw ParseError("unsupported zip compression method " + std::to_string(method), local);
    }
  }
  for (const auto& [name, contents] : members) visit(name, contents);
}

}  // namespace

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::Io, "read failed for " + path.string());
  return std::move(buffer).str();
}

void write_file_atomic(const fs::path& path, std::string_view contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(ErrorKind::Io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot move " + tmp.string() + " into place: " + ec.message());
}

void for_each_xml_source(
    const fs::path& source,
    const std::function<void(std::string_view, std::string_view)>& visit) {
  std::error_code ec;
  const auto status = fs::status(source, ec);
  if (ec || !fs::exists(status)) throw Error(ErrorKind::Io, "corpus source not found: " + source.string());
  if (fs::is_directory(status)) return visit_directory(source, visit);

  const std::string name = source.filename().string();
  if (ends_with(name, ".zip")) return visit_zip(source, visit);
  if (ends_with(name, ".tar") || ends_with(name, ".tar.gz") || ends_with(name, ".tgz")) {
    return visit_tar(source, visit);
  }
  if (has_xml_extension(name)) return visit(name, read_file(source));
  throw Error(ErrorKind::Io, "unsupported corpus source type: " + source.string());
}

}  // namespace juris
