#include "fdkit/toml.hpp"

#include <cctype>
#include <cmath>
#include <string>

#include "fdkit/csv.hpp"
#include "fdkit/error.hpp"

namespace fdkit::toml {
namespace {

using nlohmann::json;

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  json run() {
    json root = json::object();
    json* table = &root;
    while (true) {
      skip_ws_comments_newlines();
      if (eof()) break;
      if (peek() == '[') {
        table = header(root);
      } else {
        key_value(*table);
      }
      end_of_line();
    }
    return root;
  }

 private:
  std::string_view s_;
  std::size_t i_ = 0;
  int line_ = 1;

  bool eof() const { return i_ >= s_.size(); }
  char peek() const { return eof() ? '\0' : s_[i_]; }
  char get() {
    const char c = s_[i_++];
    if (c == '\n') ++line_;
    return c;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::kConfig, "config line " + std::to_string(line_) + ": " + msg);
  }

  void skip_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) get();
  }
  void skip_comment() {
    if (peek() == '#') {
      while (!eof() && peek() != '\n') get();
    }
  }
  void skip_ws_comments_newlines() {
    while (!eof()) {
      skip_ws();
      skip_comment();
      if (peek() == '\n' || peek() == '\r') {
        get();
      } else {
        break;
      }
    }
  }
  void end_of_line() {
    skip_ws();
    skip_comment();
    if (peek() == '\r') get();
    if (!eof() && peek() != '\n') fail("unexpected text after value");
  }

  std::string bare_or_quoted_key() {
    skip_ws();
    if (peek() == '"') return basic_string();
    if (peek() == '\'') return literal_string();
    std::string k;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-')) {
      k += get();
    }
    if (k.empty()) fail("expected a key");
    return k;
  }

  std::vector<std::string> dotted_key() {
    std::vector<std::string> parts{bare_or_quoted_key()};
    skip_ws();
    while (peek() == '.') {
      get();
      parts.push_back(bare_or_quoted_key());
      skip_ws();
    }
    return parts;
  }

  json* descend(json* t, const std::string& k) {
    json& next = (*t)[k];
    if (next.is_null()) next = json::object();
    if (next.is_array() && !next.empty() && next.back().is_object()) return &next.back();
    if (!next.is_object()) fail("key '" + k + "' is not a table");
    return &next;
  }

  json* header(json& root) {
    get();
    const bool array = peek() == '[';
    if (array) get();
    const auto parts = dotted_key();
    if (get() != ']' || (array && get() != ']')) fail("unterminated table header");
    json* t = &root;
    for (std::size_t k = 0; k + 1 < parts.size(); ++k) t = descend(t, parts[k]);
    json& leaf = (*t)[parts.back()];
    if (array) {
      if (leaf.is_null()) leaf = json::array();
      if (!leaf.is_array()) fail("'" + parts.back() + "' is not an array of tables");
      leaf.push_back(json::object());
      return &leaf.back();
    }
    if (leaf.is_null()) leaf = json::object();
    if (!leaf.is_object()) fail("'" + parts.back() + "' redefined as a table");
    return &leaf;
  }

  void key_value(json& table) {
    const auto parts = dotted_key();
    skip_ws();
    if (eof() || get() != '=') fail("expected '='");
    skip_ws();
    json* t = &table;
    for (std::size_t k = 0; k + 1 < parts.size(); ++k) t = descend(t, parts[k]);
    if (t->contains(parts.back())) fail("duplicate key '" + parts.back() + "'");
    (*t)[parts.back()] = value();
  }

  json value() {
    skip_ws();
    const char c = peek();
    if (c == '"') return basic_string();
    if (c == '\'') return literal_string();
    if (c == '[') return array();
    if (c == '{') return inline_table();
    return scalar();
  }

  std::string basic_string() {
    get();
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      const char c = get();
      if (c == '"') break;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (eof()) fail("unterminated escape");
      switch (const char e = get()) {
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        default: fail(std::string("unsupported escape \\") + e);
      }
    }
    return out;
  }

  std::string literal_string() {
    get();
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      const char c = get();
      if (c == '\'') break;
      out += c;
    }
    return out;
  }

  json array() {
    get();
    json arr = json::array();
    while (true) {
      skip_ws_comments_newlines();
      if (peek() == ']') {
        get();
        return arr;
      }
      arr.push_back(value());
      skip_ws_comments_newlines();
      if (peek() == ',') {
        get();
      } else if (peek() != ']') {
        fail("expected ',' or ']' in array");
      }
    }
  }

  json inline_table() {
    get();
    json t = json::object();
    skip_ws();
    if (peek() == '}') {
      get();
      return t;
    }
    while (true) {
      key_value(t);
      skip_ws();
      const char c = eof() ? '\0' : get();
      if (c == '}') return t;
      if (c != ',') fail("expected ',' or '}' in inline table");
    }
  }

  json scalar() {
    std::string tok;
    while (!eof() && peek() != ',' && peek() != ']' && peek() != '}' && peek() != '#' &&
           peek() != '\n' && peek() != '\r' && peek() != ' ' && peek() != '\t') {
      tok += get();
    }
    if (tok.empty()) fail("expected a value");
    if (tok == "true") return true;
    if (tok == "false") return false;
    if (tok == "inf" || tok == "+inf") return HUGE_VAL;
    if (tok == "-inf") return -HUGE_VAL;
    std::string digits;
    for (char c : tok) {
      if (c != '_') digits += c;
    }
    const bool integral = digits.find_first_of(".eE") == std::string::npos;
    if (integral) {
      try {
        std::size_t used = 0;
        const long long v = std::stoll(digits, &used, 10);
        if (used == digits.size()) return v;
      } catch (const std::exception&) {
      }
    }
    if (const auto d = csv::parse_double(digits)) return *d;
    fail("cannot parse value '" + tok + "'");
  }
};

}  // namespace

nlohmann::json parse(std::string_view text) { return Parser(text).run(); }

}  // namespace fdkit::toml
