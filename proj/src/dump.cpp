#include "congen/dump.hpp"

#include <expat.h>

#include <boost/iostreams/filter/bzip2.hpp>
#include <boost/iostreams/filter/gzip.hpp>
#include <boost/iostreams/filtering_stream.hpp>

#include <cstring>
#include <fstream>
#include <vector>

#include "congen/error.hpp"

namespace congen {
namespace {

namespace bio = boost::iostreams;

// Owns the underlying file so the filtering stream can outlive the caller.
class DecompressingStream : public bio::filtering_istream {
 public:
  explicit DecompressingStream(const std::filesystem::path& path)
      : file_(path, std::ios::binary) {
    if (!file_) throw Error("cannot open " + path.string());
    const auto ext = path.extension().string();
    if (ext == ".bz2") {
      push(bio::bzip2_decompressor());
    } else if (ext == ".gz") {
      push(bio::gzip_decompressor());
    }
    push(file_);
  }
  ~DecompressingStream() override { reset(); }

 private:
  std::ifstream file_;
};

enum class Field { kNone, kTitle, kNs, kId, kText };

bool is_redirect_text(const std::string& body) {
  std::size_t i = 0;
  while (i < body.size() && (body[i] == ' ' || body[i] == '\n')) ++i;
  static constexpr std::string_view kTag = "#redirect";
  if (body.size() - i < kTag.size()) return false;
  for (std::size_t k = 0; k < kTag.size(); ++k) {
    char c = body[i + k];
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
    if (c != kTag[k]) return false;
  }
  return true;
}

}  // namespace

struct DumpReader::State {
  XML_Parser parser = nullptr;
  std::deque<RawDocument> ready;
  std::vector<std::string> stack;
  Field field = Field::kNone;
  std::string buf;
  // Current page.
  RawDocument page;
  bool page_has_id = false;
  bool redirect = false;
  long long ns = -1;
  std::uint64_t pages_seen = 0;
  bool eof = false;

  bool in_page_direct_child() const {
    return stack.size() >= 2 && stack[stack.size() - 2] == "page";
  }

  static void on_start(void* ud, const XML_Char* name, const XML_Char**) {
    auto* s = static_cast<State*>(ud);
    std::string n(name);
    s->stack.push_back(n);
    if (n == "page") {
      s->page = RawDocument{};
      s->page_has_id = false;
      s->redirect = false;
      s->ns = -1;
      return;
    }
    s->buf.clear();
    if (n == "redirect" && s->in_page_direct_child()) {
      s->redirect = true;
    } else if (n == "title" && s->in_page_direct_child()) {
      s->field = Field::kTitle;
    } else if (n == "ns" && s->in_page_direct_child()) {
      s->field = Field::kNs;
    } else if (n == "id" && s->in_page_direct_child() && !s->page_has_id) {
      s->field = Field::kId;
    } else if (n == "text" && s->stack.size() >= 2 &&
               s->stack[s->stack.size() - 2] == "revision") {
      s->field = Field::kText;
    }
  }

  static void on_end(void* ud, const XML_Char* name) {
    auto* s = static_cast<State*>(ud);
    std::string_view n(name);
    switch (s->field) {
      case Field::kTitle:
        s->page.title = s->buf;
        break;
      case Field::kNs:
        s->ns = std::strtoll(s->buf.c_str(), nullptr, 10);
        break;
      case Field::kId:
        s->page.doc_id = std::strtoull(s->buf.c_str(), nullptr, 10);
        s->page_has_id = true;
        break;
      case Field::kText:
        s->page.body = s->buf;
        break;
      case Field::kNone:
        break;
    }
    s->field = Field::kNone;
    s->buf.clear();
    if (n == "page") {
      ++s->pages_seen;
      if (s->ns == 0 && !s->redirect && !is_redirect_text(s->page.body)) {
        s->ready.push_back(std::move(s->page));
      }
      s->page = RawDocument{};
    }
    if (!s->stack.empty()) s->stack.pop_back();
  }

  static void on_chars(void* ud, const XML_Char* text, int len) {
    auto* s = static_cast<State*>(ud);
    if (s->field != Field::kNone) s->buf.append(text, static_cast<std::size_t>(len));
  }
};

std::unique_ptr<std::istream> open_input(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error("input not found: " + path.string());
  }
  return std::make_unique<DecompressingStream>(path);
}

DumpReader::DumpReader(std::istream& in, std::size_t chunk_size)
    : in_(in), chunk_size_(chunk_size), state_(std::make_unique<State>()) {
  state_->parser = XML_ParserCreate("UTF-8");
  if (state_->parser == nullptr) throw Error("cannot create XML parser");
  XML_SetUserData(state_->parser, state_.get());
  XML_SetElementHandler(state_->parser, &State::on_start, &State::on_end);
  XML_SetCharacterDataHandler(state_->parser, &State::on_chars);
}

DumpReader::~DumpReader() {
  if (state_ && state_->parser) XML_ParserFree(state_->parser);
}

std::uint64_t DumpReader::pages_seen() const { return state_->pages_seen; }

std::optional<RawDocument> DumpReader::next() {
  std::vector<char> chunk(chunk_size_);
  while (state_->ready.empty() && !state_->eof) {
    in_.read(chunk.data(), static_cast<std::streamsize>(chunk.size()));
    const auto got = in_.gcount();
    const bool final = got == 0 || in_.eof();
    if (in_.bad()) throw Error("read error while parsing dump");
    if (XML_Parse(state_->parser, chunk.data(), static_cast<int>(got),
                  final ? 1 : 0) == XML_STATUS_ERROR) {
      const auto offset = XML_GetCurrentByteIndex(state_->parser);
      throw ParseError(
          std::string("malformed dump XML at byte ") + std::to_string(offset) +
              ": " + XML_ErrorString(XML_GetErrorCode(state_->parser)),
          XML_GetCurrentLineNumber(state_->parser), offset);
    }
    if (final) state_->eof = true;
  }
  if (state_->ready.empty()) return std::nullopt;
  RawDocument doc = std::move(state_->ready.front());
  state_->ready.pop_front();
  return doc;
}

}  // namespace congen
