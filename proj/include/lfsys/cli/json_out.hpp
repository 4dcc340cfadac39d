#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lfsys/core/linalg.hpp"

namespace lfsys::cli {

using Json = nlohmann::ordered_json;

/// %.17g; non-finite values as inf, -inf, nan.
std::string format_double(double x);

/// Serialises with every float at 17 significant digits. Non-finite floats
/// become the strings "inf", "-inf", "nan" so the output stays valid JSON.
std::string dump_json(const Json& j, int indent = 2);

Json to_json(const Vector& v);
Json to_json(const Matrix& m);  // array of rows
Json to_json(const std::vector<double>& v);

/// The output directory of one run. Every file is opened through here so the
/// manifest can list them in creation order.
class OutputDir {
 public:
  explicit OutputDir(std::string dir);

  const std::string& path() const { return dir_; }
  std::ofstream open(const std::string& name);
  void write_json(const std::string& name, const Json& j);
  const std::vector<std::string>& files() const { return files_; }

 private:
  std::string dir_;
  std::vector<std::string> files_;
};

/// Comma-separated row with doubles at 17 significant digits.
class CsvRow {
 public:
  CsvRow& operator<<(double x);
  CsvRow& operator<<(int x);
  CsvRow& operator<<(long long x);
  CsvRow& operator<<(std::size_t x);
  CsvRow& operator<<(const std::string& s);
  CsvRow& operator<<(const char* s) { return *this << std::string(s); }
  CsvRow& operator<<(bool b) { return *this << std::string(b ? "true" : "false"); }
  const std::string& str() const { return line_; }

 private:
  void sep();
  std::string line_;
  bool first_ = true;
};

std::ostream& operator<<(std::ostream& os, const CsvRow& row);

}  // namespace lfsys::cli
