#include "lfsys/cli/json_out.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "lfsys/core/errors.hpp"

namespace lfsys::cli {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

void emit(const Json& j, int indent, int depth, std::string& out) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += Json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        emit(it.value(), indent, depth + 1, out);
      }
      newline(depth);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool flat = true;
      for (const auto& v : j) flat = flat && !v.is_structured();
      out += '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += flat && indent >= 0 ? ", " : ",";
        first = false;
        if (!flat) newline(depth + 1);
        emit(v, indent, depth + 1, out);
      }
      if (!flat) newline(depth);
      out += ']';
      return;
    }
    case Json::value_t::number_float: {
      const double x = j.get<double>();
      out += std::isfinite(x) ? format_double(x) : "\"" + format_double(x) + "\"";
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump_json(const Json& j, int indent) {
  std::string out;
  emit(j, indent, 0, out);
  return out;
}

Json to_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json to_json(const Matrix& m) {
  Json a = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(to_json(Vector(m.row(r).transpose())));
  return a;
}

Json to_json(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(x);
  return a;
}

OutputDir::OutputDir(std::string dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw InvalidInput("cannot create output directory " + dir_ + ": " + ec.message());
}

std::ofstream OutputDir::open(const std::string& name) {
  std::ofstream f(std::filesystem::path(dir_) / name, std::ios::binary | std::ios::trunc);
  if (!f) throw InvalidInput("cannot write " + name + " in " + dir_);
  files_.push_back(name);
  return f;
}

void OutputDir::write_json(const std::string& name, const Json& j) {
  auto f = open(name);
  f << dump_json(j) << '\n';
}

void CsvRow::sep() {
  if (!first_) line_ += ',';
  first_ = false;
}

CsvRow& CsvRow::operator<<(double x) {
  sep();
  line_ += format_double(x);
  return *this;
}

CsvRow& CsvRow::operator<<(int x) {
  sep();
  line_ += std::to_string(x);
  return *this;
}

CsvRow& CsvRow::operator<<(long long x) {
  sep();
  line_ += std::to_string(x);
  return *this;
}

CsvRow& CsvRow::operator<<(std::size_t x) {
  sep();
  line_ += std::to_string(x);
  return *this;
}

CsvRow& CsvRow::operator<<(const std::string& s) {
  sep();
  line_ += s;
  return *this;
}

std::ostream& operator<<(std::ostream& os, const CsvRow& row) { return os << row.str() << '\n'; }

}  // namespace lfsys::cli
