#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>

#include <json.hpp>

namespace congen {

using Json = nlohmann::ordered_json;

/// Reads JSON-lines, skipping blank lines. Malformed lines raise ParseError
/// with the 1-based line number.
class JsonlReader {
 public:
  explicit JsonlReader(std::istream& in) : in_(in) {}

  std::optional<Json> next();
  std::uint64_t line() const { return line_; }

 private:
  std::istream& in_;
  std::uint64_t line_ = 0;
};

/// Serializes one record followed by LF. Invalid UTF-8 is replaced.
void write_json_line(std::ostream& out, const Json& j);

std::string dump_json(const Json& j, int indent = -1);

std::ifstream open_text(const std::filesystem::path& path);
std::ofstream create_text(const std::filesystem::path& path,
                          bool append = false);

}  // namespace congen
