#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "lfsys/core/errors.hpp"

// The TOML subset read by the scenario loader: [section] and [a.b] headers,
// key = value lines, # comments, and values that are numbers, "strings",
// booleans or (possibly nested, possibly multi-line) arrays.

namespace lfsys::cli {

/// Parse or validation error with a source location.
class ScenarioError : public InvalidInput {
 public:
  ScenarioError(const std::string& file, int line, const std::string& what)
      : InvalidInput(file + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct Value {
  enum class Kind { Number, String, Bool, Array };
  Kind kind = Kind::Number;
  double number = 0.0;
  bool integral = false;  // written without '.', 'e' or 'inf'/'nan'
  std::string text;
  bool flag = false;
  std::vector<Value> items;
  int line = 0;

  const char* kind_name() const;
};

struct Entry {
  Value value;
  int line = 0;
};

struct Section {
  std::string name;
  int line = 0;
  std::map<std::string, Entry> entries;
};

struct Document {
  std::string file;
  std::map<std::string, Section> sections;  // "" holds the top-level keys
};

Document parse_toml(const std::string& text, const std::string& file);
Document parse_toml_file(const std::string& path);

/// Typed access to one section that remembers which keys were read, so that
/// finish() can reject the rest.
class SectionReader {
 public:
  SectionReader(const Document& doc, const std::string& section);

  bool present() const { return section_ != nullptr; }
  bool has(const std::string& key) const;
  const std::string& name() const { return name_; }

  double number(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  long long integer(const std::string& key) const;
  long long integer(const std::string& key, long long fallback) const;
  std::string string(const std::string& key) const;
  std::string string(const std::string& key, const std::string& fallback) const;
  bool boolean(const std::string& key, bool fallback) const;
  std::vector<double> numbers(const std::string& key) const;
  std::vector<int> integers(const std::string& key) const;
  std::vector<std::vector<double>> rows(const std::string& key) const;
  std::vector<std::string> strings(const std::string& key) const;
  const Value& raw(const std::string& key) const;

  /// Every key of the section, for passes that accept arbitrary names.
  std::vector<std::string> keys() const;

  /// Error naming section.key at its line.
  [[noreturn]] void fail(const std::string& key, const std::string& what) const;
  /// Throws on the first key that was never read.
  void finish() const;

 private:
  const Entry& entry(const std::string& key) const;

  const Document* doc_;
  const Section* section_ = nullptr;
  std::string name_;
  mutable std::set<std::string> used_;
};

}  // namespace lfsys::cli
