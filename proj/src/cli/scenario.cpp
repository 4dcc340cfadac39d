#include "lfsys/cli/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "lfsys/core/operator.hpp"

namespace lfsys::cli {

const std::vector<std::string> kCommands = {"classify", "euler-portrait", "periodic", "simulate",
                                            "tori",     "lyapunov",       "density",  "thermostat",
                                            "geodesic", "sweep"};

namespace {

const std::set<std::string> kSections = {"",         "system",     "field",    "tolerances",
                                         "portrait", "periodic",   "simulate", "tori",
                                         "lyapunov", "density",    "thermostat", "geodesic",
                                         "sweep"};

Json value_json(const Value& v) {
  switch (v.kind) {
    case Value::Kind::Number:
      if (v.integral) return Json(static_cast<long long>(v.number));
      return Json(v.number);
    case Value::Kind::String: return Json(v.text);
    case Value::Kind::Bool: return Json(v.flag);
    case Value::Kind::Array: {
      Json a = Json::array();
      for (const auto& item : v.items) a.push_back(value_json(item));
      return a;
    }
  }
  return Json();
}

Json echo_document(const Document& doc) {
  Json out = Json::object();
  for (const auto& [name, section] : doc.sections) {
    Json obj = Json::object();
    for (const auto& [key, e] : section.entries) obj[key] = value_json(e.value);
    if (name.empty()) {
      for (auto it = obj.begin(); it != obj.end(); ++it) out[it.key()] = it.value();
    } else {
      out[name] = obj;
    }
  }
  return out;
}

Matrix matrix_of(const SectionReader& r, const std::string& key) {
  const auto rows = r.rows(key);
  if (rows.empty()) r.fail(key, "empty matrix");
  const std::size_t cols = rows.front().size();
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) r.fail(key, "rows of different length");
    for (std::size_t j = 0; j < cols; ++j) {
      if (!std::isfinite(rows[i][j])) r.fail(key, "non-finite entry");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

Matrix square_of(const SectionReader& r, const std::string& key, int n) {
  Matrix m = matrix_of(r, key);
  if (m.rows() != n || m.cols() != n)
    r.fail(key, "dimension " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                    " does not match n = " + std::to_string(n));
  return m;
}

Vector vector_of(const SectionReader& r, const std::string& key, int n) {
  const auto v = r.numbers(key);
  if (static_cast<int>(v.size()) != n)
    r.fail(key, "length " + std::to_string(v.size()) + " does not match n = " + std::to_string(n));
  Vector out(n);
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(v[static_cast<std::size_t>(i)])) r.fail(key, "non-finite entry");
    out[i] = v[static_cast<std::size_t>(i)];
  }
  return out;
}

double positive(const SectionReader& r, const std::string& key, double fallback) {
  const double x = r.number(key, fallback);
  if (!(x > 0.0) || !std::isfinite(x)) r.fail(key, "must be positive and finite");
  return x;
}

int positive_int(const SectionReader& r, const std::string& key, long long fallback) {
  const long long x = r.integer(key, fallback);
  if (x < 1 || x > 100'000'000) r.fail(key, "must be a positive integer");
  return static_cast<int>(x);
}

StateInput state_of(const SectionReader& r, int n) {
  StateInput s;
  if (r.has("w")) s.w = vector_of(r, "w", n);
  if (r.has("u")) s.u = r.number("u");
  if (r.has("xi")) s.xi = vector_of(r, "xi", n);
  if (r.has("eta")) s.eta = r.number("eta");
  if (s.xi.has_value() != s.eta.has_value())
    r.fail(s.xi ? "eta" : "xi", "xi and eta must be given together");
  if (s.u && !std::isfinite(*s.u)) r.fail("u", "non-finite");
  if (s.eta && !std::isfinite(*s.eta)) r.fail("eta", "non-finite");
  return s;
}

SeedInput seeds_of(const SectionReader& r, int n) {
  SeedInput s;
  if (r.has("seeds")) {
    const auto rows = r.rows("seeds");
    for (const auto& row : rows) {
      if (static_cast<int>(row.size()) != n)
        r.fail("seeds", "seed of length " + std::to_string(row.size()) + " does not match n = " +
                            std::to_string(n));
      Vector z(n);
      for (int i = 0; i < n; ++i) z[i] = row[static_cast<std::size_t>(i)];
      if (!(z.norm() < 1.0)) r.fail("seeds", "seeds must lie in the open unit ball");
      s.seeds.push_back(z);
    }
  }
  s.random = static_cast<int>(r.integer("random", 0));
  if (s.random < 0) r.fail("random", "must be non-negative");
  s.radius = r.number("radius", 0.9);
  if (!(s.radius > 0.0 && s.radius < 1.0)) r.fail("radius", "must lie in (0, 1)");
  if (s.seeds.empty() && s.random == 0) s.random = 1;
  return s;
}

EndLimit limit_of(const SectionReader& r, const std::string& key, const std::string& v) {
  if (v == "zero") return EndLimit::Zero;
  if (v == "positive") return EndLimit::Positive;
  if (v == "infinite") return EndLimit::Infinite;
  r.fail(key, "expected \"zero\", \"positive\" or \"infinite\", got \"" + v + "\"");
}

FieldSpec field_of(const SectionReader& r, const OperatorL& l) {
  const int n = l.dim();
  const std::string kind = r.string("kind", "adjoint");
  if (kind == "adjoint") return FieldSpec::linear(l.adjoint());
  if (kind == "linear") return FieldSpec::linear(square_of(r, "matrix", n));
  if (kind == "connection") return FieldSpec::connection(l, square_of(r, "C", n));
  if (kind == "thermostat") return FieldSpec::thermostat(l, positive(r, "k", 1.0));
  if (kind == "polynomial") {
    const long long degree = r.integer("degree");
    if (degree < 0 || degree > 8) r.fail("degree", "must lie in [0, 8]");
    PolynomialField p(n, static_cast<int>(degree));
    p.ball_restricted = r.boolean("ball_restricted", true);
    for (const auto& row : r.rows("terms")) {
      if (static_cast<int>(row.size()) != n + 2)
        r.fail("terms", "each term is [component, coefficient, e_1..e_n] (length " +
                            std::to_string(n + 2) + ")");
      const double comp = row[0];
      if (comp != std::floor(comp) || comp < 0 || comp >= n)
        r.fail("terms", "component index out of range");
      std::vector<int> e;
      for (int i = 0; i < n; ++i) {
        const double x = row[static_cast<std::size_t>(i + 2)];
        if (x != std::floor(x) || x < 0) r.fail("terms", "exponents must be non-negative integers");
        e.push_back(static_cast<int>(x));
      }
      int total = 0;
      for (int x : e) total += x;
      if (total > degree) r.fail("terms", "term of total degree above 'degree'");
      if (!std::isfinite(row[1])) r.fail("terms", "non-finite coefficient");
      p.add_coefficient(static_cast<int>(comp), e, row[1]);
    }
    return FieldSpec::polynomial(std::move(p));
  }
  r.fail("kind", "unknown field kind \"" + kind + "\"");
}

MetricSpec metric_of(const SectionReader& r) {
  MetricSpec m;
  m.a = r.number("a", 0.0);
  m.b = r.number("b", std::numeric_limits<double>::infinity());
  if (r.has("tau") == r.has("table_x")) r.fail("tau", "give exactly one of tau or table_x");
  if (r.has("tau")) {
    for (double t : r.numbers("tau")) m.alphas.emplace_back(PowerLaw{t});
  } else {
    const auto x = r.numbers("table_x");
    const auto ys = r.rows("table_alpha");
    const auto la = r.strings("limit_a");
    const auto lb = r.strings("limit_b");
    if (la.size() != ys.size()) r.fail("limit_a", "one limit per row of table_alpha");
    if (lb.size() != ys.size()) r.fail("limit_b", "one limit per row of table_alpha");
    for (std::size_t j = 0; j < ys.size(); ++j) {
      if (ys[j].size() != x.size()) r.fail("table_alpha", "rows must match table_x in length");
      try {
        m.alphas.emplace_back(Tabulated(x, ys[j], limit_of(r, "limit_a", la[j]),
                                        limit_of(r, "limit_b", lb[j])));
      } catch (const ScenarioError&) {
        throw;
      } catch (const std::exception& e) {
        r.fail("table_alpha", e.what());
      }
    }
  }
  try {
    m.validate();
  } catch (const InvalidInput& e) {
    r.fail("a", e.what());
  }
  return m;
}

}  // namespace

PhaseState resolve_state(const StateInput& in, int n, Rng& rng) {
  PhaseState p;
  p.group.w = in.w.value_or(Vector::Zero(n));
  p.group.u = in.u.value_or(0.0);
  if (in.xi) {
    p.algebra.xi = *in.xi;
    p.algebra.eta = *in.eta;
  } else {
    const Vector s = rng.on_sphere(n + 1);
    p.algebra.xi = s.head(n);
    p.algebra.eta = s[n];
  }
  return p;
}

Scenario parse_scenario(const Document& doc, const std::vector<std::string>& tol_overrides,
                        const std::string& command) {
  Scenario sc;
  sc.file = doc.file;
  sc.echo = echo_document(doc);

  for (const auto& [name, section] : doc.sections)
    if (!kSections.count(name))
      throw ScenarioError(doc.file, section.line, "unknown section [" + name + "]");

  SectionReader top(doc, "");
  sc.command = top.string("command", "");
  if (!command.empty()) sc.command = command;
  if (sc.command == "euler-classify") sc.command = "classify";
  if (!sc.command.empty() &&
      std::find(kCommands.begin(), kCommands.end(), sc.command) == kCommands.end())
    throw ScenarioError(doc.file, 0, "command: unknown command \"" + sc.command + "\"");
  const long long seed = top.integer("seed", 1);
  if (seed < 0) top.fail("seed", "must be non-negative");
  sc.seed = static_cast<std::uint64_t>(seed);
  sc.threads = positive_int(top, "threads", 1);
  top.finish();

  SectionReader tol(doc, "tolerances");
  for (const auto& key : tol.keys()) {
    const double v = tol.number(key);
    if (!(v >= 0.0) || std::isnan(v)) tol.fail(key, "must be non-negative");
    if (!sc.tol.set(key, v)) tol.fail(key, "unknown tolerance");
  }
  for (const auto& a : tol_overrides) {
    const auto eq = a.find('=');
    if (eq == std::string::npos)
      throw ScenarioError("--tol-override", 0, "expected key=value, got \"" + a + "\"");
    const std::string key = a.substr(0, eq);
    const std::string text = a.substr(eq + 1);
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
    } catch (const std::exception&) {
      throw ScenarioError("--tol-override", 0, key + ": malformed number \"" + text + "\"");
    }
    if (!(v >= 0.0)) throw ScenarioError("--tol-override", 0, key + ": must be non-negative");
    if (!sc.tol.set(key, v)) throw ScenarioError("--tol-override", 0, key + ": unknown tolerance");
  }

  SectionReader sys(doc, "system");
  if (sys.present()) {
    OperatorL l;
    if (sys.has("L") == sys.has("automorphism"))
      sys.fail("L", "give exactly one of L or automorphism");
    if (sys.has("L")) {
      Matrix m = matrix_of(sys, "L");
      if (m.rows() != m.cols()) sys.fail("L", "must be square");
      l = OperatorL(m);
    } else {
      Matrix a = matrix_of(sys, "automorphism");
      try {
        l = mat_log_automorphism(a);
      } catch (const Error& e) {
        sys.fail("automorphism", e.what());
      }
    }
    sc.n = l.dim();
    Lattice lattice = Lattice::integer(sc.n);
    if (sys.has("lattice")) {
      Matrix b = square_of(sys, "lattice", sc.n);
      if (std::abs(b.determinant()) < 1e-12) sys.fail("lattice", "basis is singular");
      lattice = Lattice(b);
    }
    const bool compactify = sys.boolean("compactify", false);
    sys.finish();

    SectionReader fr(doc, "field");
    FieldSpec f = field_of(fr, l);
    fr.finish();
    if (f.dim() != sc.n) fr.fail("kind", "field dimension does not match n");
    try {
      sc.system = SystemSpec::make(l, f, lattice, compactify, sc.tol);
    } catch (const InvalidInput& e) {
      std::string what = e.what();
      if (what.rfind("system: ", 0) == 0) what.erase(0, 8);
      sys.fail(compactify ? "compactify" : "L", what);
    }
  } else {
    SectionReader fr(doc, "field");
    if (fr.present()) fr.fail("", "a [field] needs a [system]");
  }

  const int n = sc.n;
  const auto need_system = [&](const SectionReader& r) {
    if (!sc.system) r.fail("", "needs a [system] section");
  };

  if (SectionReader r(doc, "portrait"); r.present() || sc.command == "euler-portrait") {
    PortraitBlock b;
    b.resolution = positive_int(r, "resolution", 101);
    b.s_max = positive(r, "s_max", 50.0);
    r.finish();
    sc.portrait = b;
  }
  if (SectionReader r(doc, "periodic"); r.present() || sc.command == "periodic") {
    need_system(r);
    PeriodicBlock b;
    b.seeds = seeds_of(r, n);
    b.s_max = positive(r, "s_max", 50.0);
    b.write_samples = r.boolean("write_samples", true);
    r.finish();
    sc.periodic = b;
  }
  if (SectionReader r(doc, "simulate"); r.present() || sc.command == "simulate") {
    need_system(r);
    SimulateBlock b;
    b.state = state_of(r, n);
    b.t = r.number("t", 10.0);
    if (!std::isfinite(b.t)) r.fail("t", "must be finite");
    b.samples = static_cast<int>(r.integer("samples", 0));
    if (b.samples < 0) r.fail("samples", "must be non-negative");
    b.reversibility = r.boolean("reversibility", true);
    r.finish();
    sc.simulate = b;
  }
  if (SectionReader r(doc, "tori"); r.present() || sc.command == "tori") {
    need_system(r);
    ToriBlock b;
    b.seeds = seeds_of(r, n);
    b.s_max = positive(r, "s_max", 50.0);
    b.a = r.number("a", 0.0);
    r.finish();
    sc.tori = b;
  }
  if (SectionReader r(doc, "lyapunov"); r.present() || sc.command == "lyapunov") {
    need_system(r);
    LyapunovBlock b;
    const std::string start = r.string("start", "suspension");
    if (start == "suspension") {
      b.start = LyapunovBlock::Start::Suspension;
    } else if (start == "state") {
      b.start = LyapunovBlock::Start::State;
      b.state = state_of(r, n);
    } else if (start == "orbit") {
      b.start = LyapunovBlock::Start::Orbit;
      b.orbit_seed = vector_of(r, "orbit_seed", n);
      b.s_max = positive(r, "s_max", 50.0);
    } else {
      r.fail("start", "expected \"suspension\", \"state\" or \"orbit\"");
    }
    b.t_start = r.number("t_start", 10.0);
    b.t_end = r.number("t_end", 100.0);
    if (!(b.t_start >= 0.0 && b.t_end > b.t_start && std::isfinite(b.t_end)))
      r.fail("t_end", "window must satisfy 0 <= t_start < t_end < inf");
    b.renormalize_every = positive(r, "renormalize_every", 1.0);
    r.finish();
    sc.lyapunov = b;
  }
  if (SectionReader r(doc, "density"); r.present() || sc.command == "density") {
    need_system(r);
    DensityBlock b;
    b.r_max = positive_int(r, "r_max", 4);
    b.grid = positive_int(r, "grid", 41);
    b.min_abs = r.number("min_abs", 0.1);
    if (r.has("u")) b.u = r.numbers("u");
    b.smoothed = r.boolean("smoothed", true);
    r.finish();
    sc.density = b;
  }
  if (SectionReader r(doc, "thermostat"); r.present() || sc.command == "thermostat") {
    need_system(r);
    ThermostatBlock b;
    if (r.has("k") && r.raw("k").kind == Value::Kind::Number)
      b.k = {r.number("k")};
    else
      b.k = r.numbers("k");
    for (double k : b.k)
      if (!(k > 0.0) || !std::isfinite(k)) r.fail("k", "every k must be positive and finite");
    b.t = positive(r, "t", 100.0);
    if (r.has("xi") != r.has("eta")) r.fail("xi", "xi and eta must be given together");
    if (r.has("xi")) {
      b.xi = vector_of(r, "xi", n);
      b.eta = r.number("eta");
    }
    b.orbits = r.boolean("orbits", true);
    if (r.has("bisect")) {
      const auto v = r.numbers("bisect");
      if (v.size() != 2 || !(v[0] > 0.0 && v[1] > v[0])) r.fail("bisect", "expected [k_lo, k_hi] with 0 < k_lo < k_hi");
      b.bisect = std::make_pair(v[0], v[1]);
    }
    b.width = positive(r, "width", 1e-3);
    b.samples = positive_int(r, "samples", 16);
    r.finish();
    sc.thermostat = b;
  }
  if (SectionReader r(doc, "geodesic"); r.present() || sc.command == "geodesic") {
    GeodesicBlock b;
    b.metric = metric_of(r);
    const int m = b.metric.dim();
    b.state.x = r.has("x") ? vector_of(r, "x", m) : Vector(Vector::Zero(m));
    b.state.x0 = r.number("x0");
    if (!(b.state.x0 > b.metric.a && b.state.x0 < b.metric.b)) r.fail("x0", "must lie in (a, b)");
    b.state.p = vector_of(r, "p", m);
    b.state.p0 = r.number("p0", 0.0);
    b.t = positive(r, "t", 100.0);
    b.samples = static_cast<int>(r.integer("samples", 0));
    if (b.samples < 0) r.fail("samples", "must be non-negative");
    b.compact_check = r.boolean("compact_check", true);
    r.finish();
    if (!sc.system) sc.n = m;
    sc.geodesic = b;
  }
  if (SectionReader r(doc, "sweep"); r.present() || sc.command == "sweep") {
    SweepBlock b;
    const std::string kind = r.string("kind", "thermostat-k");
    if (kind == "thermostat-k") {
      need_system(r);
      b.kind = SweepBlock::Kind::ThermostatK;
      b.k_min = positive(r, "k_min", 0.1);
      b.k_max = positive(r, "k_max", 4.0);
      if (!(b.k_max > b.k_min)) r.fail("k_max", "must exceed k_min");
    } else if (kind == "geodesic-momenta") {
      if (!sc.geodesic) r.fail("kind", "geodesic-momenta needs a [geodesic] section");
      b.kind = SweepBlock::Kind::GeodesicMomenta;
      b.p_min = r.number("p_min", -2.0);
      b.p_max = r.number("p_max", 2.0);
      if (!(b.p_max > b.p_min)) r.fail("p_max", "must exceed p_min");
      b.h = positive(r, "h", 2.0);
    } else {
      r.fail("kind", "expected \"thermostat-k\" or \"geodesic-momenta\"");
    }
    b.count = positive_int(r, "count", 50);
    r.finish();
    sc.sweep = b;
  }
  if (sc.command.empty() == false && sc.command != "geodesic" && sc.command != "sweep" &&
      !sc.system)
    throw ScenarioError(doc.file, 0, "system: command \"" + sc.command + "\" needs a [system] section");
  return sc;
}

Scenario parse_scenario_file(const std::string& path, const std::vector<std::string>& tol_overrides,
                             const std::string& command) {
  return parse_scenario(parse_toml_file(path), tol_overrides, command);
}

}  // namespace lfsys::cli
