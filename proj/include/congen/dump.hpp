#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <istream>
#include <memory>
#include <optional>
#include <string>

namespace congen {

struct RawDocument {
  std::uint64_t doc_id = 0;
  std::string title;
  std::string body;

  bool operator==(const RawDocument&) const = default;
};

/// Opens a file for reading, decompressing by extension (.bz2, .gz).
std::unique_ptr<std::istream> open_input(const std::filesystem::path& path);

/// Streaming reader over a MediaWiki pages-articles XML export. Yields
/// namespace-0, non-redirect pages in stream order; memory use is bounded by
/// the largest page, not the dump. Malformed XML raises ParseError carrying
/// the byte offset of the fault.
class DumpReader {
 public:
  explicit DumpReader(std::istream& in, std::size_t chunk_size = 1 << 16);
  ~DumpReader();
  DumpReader(const DumpReader&) = delete;
  DumpReader& operator=(const DumpReader&) = delete;

  std::optional<RawDocument> next();

  /// Pages seen so far, including skipped ones.
  std::uint64_t pages_seen() const;

  struct State;

 private:
  std::istream& in_;
  std::size_t chunk_size_;
  std::unique_ptr<State> state_;
};

}  // namespace congen
