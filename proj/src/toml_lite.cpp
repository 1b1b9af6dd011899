#include "rbessel/toml_lite.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "rbessel/errors.hpp"

namespace rbessel::io {

namespace {

using nlohmann::json;

class TomlParser {
 public:
  explicit TomlParser(std::string_view text) : s_(text) {}

  json parse() {
    json root = json::object();
    json* current = &root;
    while (true) {
      skip_blank_lines();
      if (eof()) break;
      if (peek() == '[') {
        current = parse_header(root);
      } else {
        const auto path = parse_key_path();
        skip_ws();
        expect('=');
        skip_ws();
        assign(*current, path, parse_value());
      }
      expect_line_end();
    }
    return root;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::set<std::string> defined_;  // explicit [table] headers

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line_); }

  bool eof() const { return pos_ >= s_.size(); }
  char peek(std::size_t ahead = 0) const { return pos_ + ahead < s_.size() ? s_[pos_ + ahead] : '\0'; }
  char get() {
    const char c = s_[pos_++];
    if (c == '\n') ++line_;
    return c;
  }

  void skip_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }
  void skip_comment() {
    if (peek() == '#')
      while (!eof() && peek() != '\n') ++pos_;
  }
  void skip_blank_lines() {
    while (!eof()) {
      skip_ws();
      skip_comment();
      if (peek() == '\n' || peek() == '\r') get();
      else break;
    }
  }
  // Whitespace, comments and newlines, as allowed inside arrays.
  void skip_ws_multiline() { skip_blank_lines(); }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    get();
  }
  void expect_line_end() {
    skip_ws();
    skip_comment();
    if (eof()) return;
    if (peek() == '\r') get();
    if (peek() != '\n') fail("unexpected trailing characters");
    get();
  }

  static bool bare_key_char(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' ||
           c == '-';
  }

  std::string parse_key() {
    if (peek() == '"') return parse_basic_string();
    if (peek() == '\'') return parse_literal_string();
    const std::size_t start = pos_;
    while (!eof() && bare_key_char(peek())) ++pos_;
    if (pos_ == start) fail("expected a key");
    return std::string(s_.substr(start, pos_ - start));
  }

  std::vector<std::string> parse_key_path() {
    std::vector<std::string> path{parse_key()};
    while (true) {
      skip_ws();
      if (peek() != '.') break;
      get();
      skip_ws();
      path.push_back(parse_key());
    }
    return path;
  }

  json* parse_header(json& root) {
    get();  // '['
    const bool array_table = peek() == '[';
    if (array_table) get();
    skip_ws();
    const auto path = parse_key_path();
    skip_ws();
    expect(']');
    if (array_table) expect(']');

    json* node = &root;
    std::string id;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) node = descend(*node, path[i], &id);
    const std::string& last = path.back();
    if (array_table) {
      json& arr = (*node)[last];
      if (arr.is_null()) arr = json::array();
      if (!arr.is_array()) fail("'" + last + "' is not an array of tables");
      arr.push_back(json::object());
      return &arr.back();
    }
    if (!defined_.insert(id + last).second) fail("table '" + last + "' defined twice");
    json& tbl = (*node)[last];
    if (tbl.is_null()) tbl = json::object();
    if (!tbl.is_object()) fail("'" + last + "' is not a table");
    return &tbl;
  }

  // `id`, when given, accumulates a path that distinguishes elements of
  // arrays of tables.
  json* descend(json& node, const std::string& key, std::string* id = nullptr) {
    json& child = node[key];
    if (child.is_null()) child = json::object();
    if (id) *id += key + (child.is_array() ? "#" + std::to_string(child.size()) : std::string()) + '.';
    if (child.is_array() && !child.empty() && child.back().is_object()) return &child.back();
    if (!child.is_object()) fail("'" + key + "' is not a table");
    return &child;
  }

  void assign(json& table, const std::vector<std::string>& path, json value) {
    json* node = &table;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) node = descend(*node, path[i]);
    if (node->contains(path.back())) fail("duplicate key '" + path.back() + "'");
    (*node)[path.back()] = std::move(value);
  }

  json parse_value() {
    const char c = peek();
    if (c == '"') {
      if (peek(1) == '"' && peek(2) == '"') fail("multi-line strings are not supported");
      return parse_basic_string();
    }
    if (c == '\'') return parse_literal_string();
    if (c == '[') return parse_array();
    if (c == '{') return parse_inline_table();
    return parse_scalar();
  }

  std::string parse_basic_string() {
    get();
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      char c = get();
      if (c == '"') break;
      if (c == '\\') {
        if (eof()) fail("unterminated escape");
        const char e = get();
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case 'r': out += '\r'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: fail(std::string("unsupported escape '\\") + e + "'");
        }
      } else {
        out += c;
      }
    }
    return out;
  }

  std::string parse_literal_string() {
    get();
    const std::size_t start = pos_;
    while (!eof() && peek() != '\'' && peek() != '\n') ++pos_;
    if (peek() != '\'') fail("unterminated string");
    std::string out(s_.substr(start, pos_ - start));
    get();
    return out;
  }

  json parse_array() {
    const std::size_t start_line = line_;
    get();
    json arr = json::array();
    while (true) {
      skip_ws_multiline();
      if (peek() == ']') {
        get();
        return arr;
      }
      if (eof()) throw ParseError("unterminated array", start_line);
      arr.push_back(parse_value());
      skip_ws_multiline();
      if (eof()) throw ParseError("unterminated array", start_line);
      if (peek() == ',') {
        get();
      } else if (peek() != ']') {
        fail("expected ',' or ']' in array");
      }
    }
  }

  json parse_inline_table() {
    get();
    json tbl = json::object();
    skip_ws();
    if (peek() == '}') {
      get();
      return tbl;
    }
    while (true) {
      skip_ws();
      const auto path = parse_key_path();
      skip_ws();
      expect('=');
      skip_ws();
      assign(tbl, path, parse_value());
      skip_ws();
      if (peek() == ',') {
        get();
        continue;
      }
      expect('}');
      return tbl;
    }
  }

  json parse_scalar() {
    const std::size_t start = pos_;
    while (!eof()) {
      const char c = peek();
      if (c == ',' || c == ']' || c == '}' || c == '#' || c == ' ' || c == '\t' || c == '\n' || c == '\r')
        break;
      ++pos_;
    }
    const std::string raw(s_.substr(start, pos_ - start));
    if (raw.empty()) fail("expected a value");
    if (raw == "true") return true;
    if (raw == "false") return false;

    std::string tok;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] == '_') {
        const bool ok = i > 0 && i + 1 < raw.size() && std::isdigit(static_cast<unsigned char>(raw[i - 1])) &&
                        std::isdigit(static_cast<unsigned char>(raw[i + 1]));
        if (!ok) fail("misplaced '_' in number '" + raw + "'");
        continue;
      }
      tok += raw[i];
    }
    std::string_view body = tok;
    const bool negative = !body.empty() && body.front() == '-';
    if (!body.empty() && (body.front() == '+' || body.front() == '-')) body.remove_prefix(1);
    if (body == "inf") return negative ? -std::numeric_limits<double>::infinity()
                                       : std::numeric_limits<double>::infinity();
    if (body == "nan") return std::numeric_limits<double>::quiet_NaN();

    const bool is_float = tok.find_first_of(".eE") != std::string::npos &&
                          tok.rfind("0x", 0) == std::string::npos;
    errno = 0;
    char* end = nullptr;
    if (is_float) {
      const double v = std::strtod(tok.c_str(), &end);
      if (end != tok.c_str() + tok.size() || errno == ERANGE) fail("invalid float '" + raw + "'");
      return v;
    }
    int base = 10;
    std::string digits = tok;
    if (body.rfind("0x", 0) == 0) {
      if (negative || tok.front() == '+') fail("signed hex integer '" + raw + "'");
      base = 16;
      digits = tok.substr(2);
    }
    if (digits.empty() || (base == 10 && digits.find_first_not_of("+-0123456789") != std::string::npos)) {
      fail("invalid value '" + raw + "'");
    }
    if (!negative) {
      const unsigned long long v = std::strtoull(digits.c_str(), &end, base);
      if (end != digits.c_str() + digits.size() || errno == ERANGE) fail("invalid integer '" + raw + "'");
      return v;
    }
    const long long v = std::strtoll(digits.c_str(), &end, base);
    if (end != digits.c_str() + digits.size() || errno == ERANGE) fail("invalid integer '" + raw + "'");
    return v;
  }
};

}  // namespace

nlohmann::json parse_toml(std::string_view text) { return TomlParser(text).parse(); }

}  // namespace rbessel::io
