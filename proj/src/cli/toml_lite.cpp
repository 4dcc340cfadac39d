#include "lfsys/cli/toml_lite.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace lfsys::cli {

const char* Value::kind_name() const {
  switch (kind) {
    case Kind::Number: return "number";
    case Kind::String: return "string";
    case Kind::Bool: return "boolean";
    case Kind::Array: return "array";
  }
  return "?";
}

namespace {

bool bare_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

class Parser {
 public:
  Parser(const std::string& text, const std::string& file) : s_(text), file_(file) {}

  Document run() {
    Document doc;
    doc.file = file_;
    Section* current = &doc.sections[""];
    current->line = 1;
    for (;;) {
      skip_blank();
      if (eof()) break;
      if (peek() == '\n') {
        advance();
        continue;
      }
      if (peek() == '[') {
        advance();
        const int line = line_;
        std::string name;
        skip_inline();
        while (!eof() && (bare_char(peek()) || peek() == '.')) name += advance();
        skip_inline();
        if (eof() || peek() != ']') error("expected ']' after section name");
        advance();
        if (name.empty() || name.front() == '.' || name.back() == '.' ||
            name.find("..") != std::string::npos)
          error("malformed section name '" + name + "'");
        if (doc.sections.count(name)) error("duplicate section [" + name + "]");
        current = &doc.sections[name];
        current->name = name;
        current->line = line;
        end_of_line();
        continue;
      }
      const int line = line_;
      std::string key;
      while (!eof() && bare_char(peek())) key += advance();
      if (key.empty()) error(std::string("unexpected character '") + peek() + "'");
      skip_inline();
      if (eof() || peek() != '=') error("expected '=' after key '" + key + "'");
      advance();
      skip_inline();
      Value v = value();
      if (current->entries.count(key)) error("duplicate key '" + key + "'");
      current->entries[key] = Entry{std::move(v), line};
      end_of_line();
    }
    return doc;
  }

 private:
  bool eof() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }
  char advance() {
    const char c = s_[pos_++];
    if (c == '\n') ++line_;
    return c;
  }
  [[noreturn]] void error(const std::string& what) const { throw ScenarioError(file_, line_, what); }

  void skip_inline() {
    while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) advance();
  }
  void skip_comment() {
    if (!eof() && peek() == '#')
      while (!eof() && peek() != '\n') advance();
  }
  void skip_blank() {
    skip_inline();
    skip_comment();
  }
  // Whitespace, comments and newlines inside arrays.
  void skip_all() {
    for (;;) {
      skip_blank();
      if (!eof() && peek() == '\n') {
        advance();
        continue;
      }
      return;
    }
  }
  void end_of_line() {
    skip_blank();
    if (eof()) return;
    if (peek() != '\n') error(std::string("unexpected '") + peek() + "' after value");
    advance();
  }

  Value value() {
    if (eof()) error("missing value");
    Value v;
    v.line = line_;
    const char c = peek();
    if (c == '"') {
      advance();
      v.kind = Value::Kind::String;
      for (;;) {
        if (eof() || peek() == '\n') error("unterminated string");
        char ch = advance();
        if (ch == '"') break;
        if (ch == '\\') {
          if (eof()) error("unterminated string");
          const char esc = advance();
          switch (esc) {
            case 'n': ch = '\n'; break;
            case 't': ch = '\t'; break;
            case '"': ch = '"'; break;
            case '\\': ch = '\\'; break;
            default: error(std::string("unknown escape '\\") + esc + "'");
          }
        }
        v.text += ch;
      }
      return v;
    }
    if (c == '[') {
      advance();
      v.kind = Value::Kind::Array;
      for (;;) {
        skip_all();
        if (eof()) throw ScenarioError(file_, v.line, "unterminated array");
        if (peek() == ']') {
          advance();
          return v;
        }
        v.items.push_back(value());
        skip_all();
        if (eof()) throw ScenarioError(file_, v.line, "unterminated array");
        if (peek() == ',') {
          advance();
          continue;
        }
        if (peek() != ']') error("expected ',' or ']' in array");
      }
    }
    std::string token;
    while (!eof() && (bare_char(peek()) || peek() == '.' || peek() == '+')) token += advance();
    if (token.empty()) error(std::string("unexpected character '") + c + "'");
    if (token == "true" || token == "false") {
      v.kind = Value::Kind::Bool;
      v.flag = token == "true";
      return v;
    }
    v.kind = Value::Kind::Number;
    std::string body = token;
    double sign = 1.0;
    if (!body.empty() && (body[0] == '+' || body[0] == '-')) {
      if (body[0] == '-') sign = -1.0;
      body.erase(0, 1);
    }
    if (body == "inf") {
      v.number = sign * std::numeric_limits<double>::infinity();
      return v;
    }
    if (body == "nan") error("nan is not a valid scenario value");
    const char* first = body.data();
    const char* last = body.data() + body.size();
    double x = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, x);
    if (ec != std::errc() || ptr != last || body.empty()) error("malformed value '" + token + "'");
    v.number = sign * x;
    v.integral = body.find_first_of(".eE") == std::string::npos;
    return v;
  }

  const std::string& s_;
  std::string file_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

}  // namespace

Document parse_toml(const std::string& text, const std::string& file) {
  return Parser(text, file).run();
}

Document parse_toml_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError(path, 0, "cannot open scenario file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_toml(ss.str(), path);
}

SectionReader::SectionReader(const Document& doc, const std::string& section)
    : doc_(&doc), name_(section) {
  auto it = doc.sections.find(section);
  if (it != doc.sections.end()) section_ = &it->second;
}

bool SectionReader::has(const std::string& key) const {
  return section_ && section_->entries.count(key) > 0;
}

void SectionReader::fail(const std::string& key, const std::string& what) const {
  int line = section_ ? section_->line : 0;
  if (has(key)) line = section_->entries.at(key).line;
  const std::string field = name_.empty() ? key : (key.empty() ? name_ : name_ + "." + key);
  throw ScenarioError(doc_->file, line, field + ": " + what);
}

const Entry& SectionReader::entry(const std::string& key) const {
  if (!has(key)) fail(key, "missing required key");
  used_.insert(key);
  return section_->entries.at(key);
}

const Value& SectionReader::raw(const std::string& key) const { return entry(key).value; }

namespace {

bool as_number(const Value& v, double& out) {
  if (v.kind == Value::Kind::Number) {
    out = v.number;
    return true;
  }
  if (v.kind == Value::Kind::String) {
    if (v.text == "inf" || v.text == "+inf") {
      out = std::numeric_limits<double>::infinity();
      return true;
    }
    if (v.text == "-inf") {
      out = -std::numeric_limits<double>::infinity();
      return true;
    }
  }
  return false;
}

}  // namespace

double SectionReader::number(const std::string& key) const {
  double x = 0.0;
  if (!as_number(raw(key), x)) fail(key, std::string("expected a number, got ") + raw(key).kind_name());
  return x;
}

double SectionReader::number(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

long long SectionReader::integer(const std::string& key) const {
  const Value& v = raw(key);
  if (v.kind != Value::Kind::Number || !v.integral) fail(key, "expected an integer");
  return static_cast<long long>(v.number);
}

long long SectionReader::integer(const std::string& key, long long fallback) const {
  return has(key) ? integer(key) : fallback;
}

std::string SectionReader::string(const std::string& key) const {
  const Value& v = raw(key);
  if (v.kind != Value::Kind::String) fail(key, std::string("expected a string, got ") + v.kind_name());
  return v.text;
}

std::string SectionReader::string(const std::string& key, const std::string& fallback) const {
  return has(key) ? string(key) : fallback;
}

bool SectionReader::boolean(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const Value& v = raw(key);
  if (v.kind != Value::Kind::Bool) fail(key, std::string("expected a boolean, got ") + v.kind_name());
  return v.flag;
}

std::vector<double> SectionReader::numbers(const std::string& key) const {
  const Value& v = raw(key);
  if (v.kind != Value::Kind::Array) fail(key, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& item : v.items) {
    double x = 0.0;
    if (!as_number(item, x)) fail(key, "expected an array of numbers");
    out.push_back(x);
  }
  return out;
}

std::vector<int> SectionReader::integers(const std::string& key) const {
  const Value& v = raw(key);
  if (v.kind != Value::Kind::Array) fail(key, "expected an array of integers");
  std::vector<int> out;
  for (const auto& item : v.items) {
    if (item.kind != Value::Kind::Number || !item.integral) fail(key, "expected an array of integers");
    out.push_back(static_cast<int>(item.number));
  }
  return out;
}

std::vector<std::vector<double>> SectionReader::rows(const std::string& key) const {
  const Value& v = raw(key);
  if (v.kind != Value::Kind::Array) fail(key, "expected an array of arrays");
  std::vector<std::vector<double>> out;
  for (const auto& row : v.items) {
    if (row.kind != Value::Kind::Array) fail(key, "expected an array of arrays");
    std::vector<double> r;
    for (const auto& item : row.items) {
      double x = 0.0;
      if (!as_number(item, x)) fail(key, "expected numeric entries");
      r.push_back(x);
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<std::string> SectionReader::strings(const std::string& key) const {
  const Value& v = raw(key);
  if (v.kind != Value::Kind::Array) fail(key, "expected an array of strings");
  std::vector<std::string> out;
  for (const auto& item : v.items) {
    if (item.kind != Value::Kind::String) fail(key, "expected an array of strings");
    out.push_back(item.text);
  }
  return out;
}

std::vector<std::string> SectionReader::keys() const {
  std::vector<std::string> out;
  if (!section_) return out;
  for (const auto& [k, e] : section_->entries) {
    (void)e;
    out.push_back(k);
  }
  return out;
}

void SectionReader::finish() const {
  if (!section_) return;
  for (const auto& [k, e] : section_->entries)
    if (!used_.count(k)) {
      const std::string field = name_.empty() ? k : name_ + "." + k;
      throw ScenarioError(doc_->file, e.line, "unknown key '" + field + "'");
    }
}

}  // namespace lfsys::cli
