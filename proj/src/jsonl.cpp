#include "congen/jsonl.hpp"

#include "congen/error.hpp"

namespace congen {

std::optional<Json> JsonlReader::next() {
  std::string buf;
  while (std::getline(in_, buf)) {
    ++line_;
    if (!buf.empty() && buf.back() == '\r') buf.pop_back();
    if (buf.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      return Json::parse(buf);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError("line " + std::to_string(line_) + ": malformed JSON (" +
                           e.what() + ")",
                       line_);
    }
  }
  return std::nullopt;
}

std::string dump_json(const Json& j, int indent) {
  return j.dump(indent, ' ', false, nlohmann::json::error_handler_t::replace);
}

void write_json_line(std::ostream& out, const Json& j) {
  out << dump_json(j) << '\n';
}

std::ifstream open_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

std::ofstream create_text(const std::filesystem::path& path, bool append) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, append ? std::ios::binary | std::ios::app
                                 : std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

}  // namespace congen
