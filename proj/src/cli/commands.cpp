#include "lfsys/cli/commands.hpp"

#include <cmath>
#include <filesystem>

#include "lfsys/compact/compact.hpp"
#include "lfsys/compact/density.hpp"
#include "lfsys/compact/lyapunov.hpp"
#include "lfsys/core/parallel.hpp"
#include "lfsys/euler/euler.hpp"
#include "lfsys/flow/torus.hpp"
#include "lfsys/models/thermostat.hpp"
#include "lfsys/simd/kernels.hpp"

#ifndef LFSYS_VERSION
#define LFSYS_VERSION "0.0.0"
#endif

namespace lfsys::cli {

namespace {

constexpr int kSeedAttemptsPerOrbit = 1000;

Json complex_json(const std::vector<Complex>& z) {
  Json a = Json::array();
  for (const auto& c : z) a.push_back(Json::array({c.real(), c.imag()}));
  return a;
}

Json int_json(const std::vector<int>& v) {
  Json a = Json::array();
  for (int x : v) a.push_back(x);
  return a;
}

Json state_json(const PhaseState& p) {
  Json j = Json::object();
  j["w"] = to_json(p.group.w);
  j["u"] = p.group.u;
  j["xi"] = to_json(p.algebra.xi);
  j["eta"] = p.algebra.eta;
  return j;
}

Json escape_json(const EscapeResult& e) {
  Json j = Json::object();
  j["verdict"] = verdict_name(e.verdict);
  j["s_minus"] = e.s_minus;
  j["s_plus"] = e.s_plus;
  j["exit_minus"] = to_json(e.exit_minus);
  j["exit_plus"] = to_json(e.exit_plus);
  j["transversality_minus"] = e.transversality_minus;
  j["transversality_plus"] = e.transversality_plus;
  j["grazes"] = e.grazes;
  j["certified"] = e.certified;
  j["diagnostic"] = e.diagnostic;
  return j;
}

Json orbit_json(const PeriodicOrbit& o) {
  Json j = Json::object();
  j["t0"] = o.t0;
  j["period"] = o.period;
  j["s_minus"] = o.s_minus;
  j["s_plus"] = o.s_plus;
  j["closure_defect"] = o.closure_defect;
  j["symmetry_defect"] = o.symmetry_defect;
  j["arrival_defect"] = o.arrival_defect;
  const AlgebraPoint v = o.start();
  j["start"] = Json::object({{"xi", to_json(v.xi)}, {"eta", v.eta}});
  return j;
}

/// Writes the report whether or not fn completes; a failed run leaves it
/// marked incomplete and rethrows.
template <class Fn>
void with_report(OutputDir& out, const std::string& name, Json& report, Fn&& fn) {
  try {
    fn();
  } catch (...) {
    report["complete"] = false;
    out.write_json(name, report);
    throw;
  }
  report["complete"] = true;
  out.write_json(name, report);
}

/// Listed seeds first, then `random` escaping points from the stream.
std::vector<Vector> collect_seeds(const SeedInput& in, const FieldSpec& f, double s_max,
                                  const Tolerances& tol, Rng& rng) {
  std::vector<Vector> seeds = in.seeds;
  int found = 0;
  for (int attempt = 0; found < in.random; ++attempt) {
    if (attempt >= kSeedAttemptsPerOrbit * in.random)
      throw ConstructionFailure("found only " + std::to_string(found) + " of " +
                                std::to_string(in.random) + " escaping seeds");
    Vector z = rng.in_ball(f.dim(), in.radius);
    if (detect_escape(z, f, s_max, tol).verdict == Verdict::Escaping) {
      seeds.push_back(z);
      ++found;
    }
  }
  return seeds;
}

void write_jsonl_state(std::ostream& os, double t, const PhaseState& p) {
  Json j = Json::object();
  j["t"] = t;
  j["w"] = to_json(p.group.w);
  j["u"] = p.group.u;
  j["xi"] = to_json(p.algebra.xi);
  j["eta"] = p.algebra.eta;
  os << dump_json(j, -1) << '\n';
}

std::vector<double> sample_times(const ode::Trajectory& tr, int samples) {
  if (samples <= 0) return tr.times();
  std::vector<double> t(static_cast<std::size_t>(samples) + 1);
  const double a = tr.t_first();
  const double b = tr.t_last();
  for (int i = 0; i <= samples; ++i) t[static_cast<std::size_t>(i)] = a + (b - a) * i / samples;
  t.back() = b;
  return t;
}

// --- commands --------------------------------------------------------------

void cmd_classify(const Scenario& sc, OutputDir& out) {
  const SystemSpec& sys = *sc.system;
  Json j = Json::object();
  j["n"] = sc.n;
  j["L"] = to_json(sys.L.matrix());
  j["L_eigenvalues"] = complex_json(sys.L.eigenvalues());
  j["r_min"] = sys.L.r_min();
  j["r_max"] = sys.L.r_max();
  j["trace_L"] = sys.L.trace();
  j["unimodular"] = sys.L.unimodular(sc.tol.algebraic);
  const AutomorphismCheck ac = check_automorphism(sys.L, sys.lattice, sc.tol.automorphism_rounding);
  Json auto_j = Json::object({{"ok", ac.ok}, {"defect", ac.defect}, {"det", ac.det}});
  if (ac.ok) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < ac.a.rows(); ++r) {
      Json row = Json::array();
      for (Eigen::Index c = 0; c < ac.a.cols(); ++c) row.push_back(ac.a(r, c));
      rows.push_back(row);
    }
    auto_j["matrix"] = rows;
  }
  j["automorphism"] = auto_j;
  j["compactified"] = sys.compactified;
  j["field_kind"] = sys.F.kind_name();

  if (auto m = sys.F.linear_matrix()) {
    j["F"] = to_json(*m);
    const SpectrumClass cls = classify_linear_field(*m, sc.tol.eigen_zero);
    j["spectrum_tag"] = spectrum_tag_name(cls.tag);
    j["F_eigenvalues"] = complex_json(cls.eigenvalues);
    j["resonance"] = int_json(cls.resonance);
    j["divergence"] = Json::object({{"constant", true}, {"value", m->trace()}});
    const auto q = conserved_quadratic(*m, sc.tol.algebraic);
    j["conserved_quadratic"] = q ? to_json(*q) : Json();
  } else {
    const auto& poly = std::get<PolynomialField>(sys.F.variant());
    Json d = Json::object({{"constant", poly.constant_divergence()}});
    if (poly.constant_divergence()) d["value"] = poly.divergence(Vector::Zero(sc.n));
    j["divergence"] = d;
  }
  if (const auto* th = std::get_if<ThermostatField>(&sys.F.variant()))
    j["thermostat_regime"] = regime_name(thermostat_regime(sys.L, th->k));

  const RegimeTable t = thermostat_regimes(sys.L);
  Json rt = Json::object();
  rt["r_min"] = t.r_min;
  rt["r_max"] = t.r_max;
  rt["integrable_k"] = t.integrable ? Json::array({t.integrable->first, t.integrable->second}) : Json();
  rt["attractor_k"] = Json::array({t.attractor.first, t.attractor.second});
  rt["boundary_k"] = t.boundary ? Json(*t.boundary) : Json();
  rt["attractor_note"] = t.attractor_note;
  j["thermostat_regimes"] = rt;
  out.write_json("classify.json", j);
}

void cmd_portrait(const Scenario& sc, OutputDir& out) {
  const PortraitBlock& b = *sc.portrait;
  const SystemSpec& sys = *sc.system;
  const EscapeMap map = sample_escaping_set(sys.F, b.resolution, b.s_max, sc.tol, sc.threads);
  {
    auto f = out.open("portrait.csv");
    CsvRow head;
    head << "index";
    for (int d = 0; d < sc.n; ++d) head << "zeta_" + std::to_string(d + 1);
    head << "inside" << "verdict" << "s_minus" << "s_plus" << "grazes" << "certified";
    f << head;
    for (std::size_t i = 0; i < map.cells.size(); ++i) {
      const EscapeCell& c = map.cells[i];
      CsvRow row;
      row << i;
      for (int d = 0; d < sc.n; ++d) row << c.center[d];
      row << c.inside;
      if (c.inside) {
        row << verdict_name(c.result.verdict) << c.result.s_minus << c.result.s_plus
            << c.result.grazes << c.result.certified;
      } else {
        row << "" << "" << "" << "" << "";
      }
      f << row;
    }
  }
  Json j = Json::object();
  j["resolution"] = map.resolution;
  j["s_max"] = b.s_max;
  j["cells"] = map.cells.size();
  j["inside"] = map.inside;
  j["escaping"] = map.escaping;
  j["bounded"] = map.bounded;
  j["undetermined"] = map.undetermined;
  j["escaping_fraction"] = map.escaping_fraction();
  j["bounded_fraction"] = map.bounded_fraction();
  j["undetermined_fraction"] = map.undetermined_fraction();
  out.write_json("portrait.json", j);
}

void cmd_periodic(const Scenario& sc, OutputDir& out) {
  const PeriodicBlock& b = *sc.periodic;
  const SystemSpec& sys = *sc.system;
  Rng rng(sc.seed);
  Json report = Json::object({{"orbits", Json::array()}});
  with_report(out, "periodic.json", report, [&] {
    const auto seeds = collect_seeds(b.seeds, sys.F, b.s_max, sc.tol, rng);
    std::vector<EscapeResult> esc(seeds.size());
    std::vector<std::optional<PeriodicOrbit>> orbits(seeds.size());
    parallel_for(seeds.size(), sc.threads, [&](std::size_t i) {
      esc[i] = detect_escape(seeds[i], sys.F, b.s_max, sc.tol);
      if (esc[i].verdict == Verdict::Escaping) orbits[i] = build_periodic_orbit(esc[i], sys.F, sc.tol);
    });
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      Json o = Json::object();
      o["seed"] = to_json(seeds[i]);
      o["escape"] = escape_json(esc[i]);
      o["orbit"] = orbits[i] ? orbit_json(*orbits[i]) : Json();
      report["orbits"].push_back(o);
      if (orbits[i] && b.write_samples) {
        auto f = out.open("orbit_" + std::to_string(i) + ".csv");
        CsvRow head;
        head << "t";
        for (int d = 0; d < sc.n; ++d) head << "xi_" + std::to_string(d + 1);
        head << "eta" << "u";
        f << head;
        const auto& tr = orbits[i]->samples;
        for (std::size_t k = 0; k < tr.size(); ++k) {
          CsvRow row;
          row << tr.times()[k];
          for (Eigen::Index d = 0; d < tr.states()[k].size(); ++d) row << tr.states()[k][d];
          f << row;
        }
      }
    }
  });
}

void cmd_simulate(const Scenario& sc, OutputDir& out) {
  const SimulateBlock& b = *sc.simulate;
  const SystemSpec& sys = *sc.system;
  const int n = sc.n;
  Rng rng(sc.seed);
  const PhaseState p0 = resolve_state(b.state, n, rng);
  Json report = Json::object();
  report["start"] = state_json(p0);
  report["t"] = b.t;
  with_report(out, "simulate.json", report, [&] {
    const ode::Trajectory tr = flow_trajectory(p0, sys, b.t, sc.tol);
    const auto lin = sys.F.linear_matrix();
    const double s0 = p0.algebra.norm_squared();
    const Vector phi0 = lin ? first_integrals(p0, *lin) : Vector();
    double sphere = 0.0, phi_drift = 0.0;
    for (const auto& y : tr.states()) {
      const PhaseState p = unpack(y, n);
      sphere = std::max(sphere, std::abs(p.algebra.norm_squared() - s0));
      if (lin) phi_drift = std::max(phi_drift, (first_integrals(p, *lin) - phi0).norm());
    }
    {
      auto f = out.open("trajectory.jsonl");
      for (double t : sample_times(tr, b.samples)) write_jsonl_state(f, t, unpack(tr.at(t), n));
    }
    const PhaseState end = unpack(b.t >= 0.0 ? tr.back() : tr.front(), n);
    report["end"] = state_json(end);
    if (sys.compactified) report["end_reduced"] = state_json(reduce_mod(end, sys));
    report["steps"] = tr.size() - 1;
    report["sphere_drift"] = sphere;
    report["first_integral_drift"] = lin ? Json(phi_drift) : Json();
    if (b.reversibility) report["reversibility_defect"] = reversibility_defect(p0, sys, b.t, sc.tol);
  });
}

void cmd_tori(const Scenario& sc, OutputDir& out) {
  const ToriBlock& b = *sc.tori;
  const SystemSpec& sys = *sc.system;
  Rng rng(sc.seed);
  Json report = Json::object({{"a", b.a}, {"tori", Json::array()}});
  with_report(out, "tori.json", report, [&] {
    const auto seeds = collect_seeds(b.seeds, sys.F, b.s_max, sc.tol, rng);
    std::vector<Json> rows(seeds.size());
    parallel_for(seeds.size(), sc.threads, [&](std::size_t i) {
      Json j = Json::object({{"seed", to_json(seeds[i])}});
      const EscapeResult esc = detect_escape(seeds[i], sys.F, b.s_max, sc.tol);
      j["verdict"] = verdict_name(esc.verdict);
      if (esc.verdict == Verdict::Escaping) {
        const PeriodicOrbit orbit = build_periodic_orbit(esc, sys.F, sc.tol);
        const InvariantTorus t = build_invariant_torus(orbit, b.a, sys, sc.tol, sc.seed + i);
        const RotationVector rv = rotation_vector(t, sc.tol.rotation_resonance);
        j["period"] = t.period;
        j["orbit_closure_defect"] = orbit.closure_defect;
        j["translation"] = to_json(t.translation);
        j["translation_coords"] = to_json(t.translation_coords);
        j["quadrature_error"] = t.quadrature_error;
        j["quadrature_nodes"] = t.quadrature_nodes;
        Json pts = Json::array();
        for (const auto& w : t.base_points) pts.push_back(to_json(w));
        j["base_points"] = pts;
        j["verify_defect"] = t.verify_defect;
        j["translation_spread"] = t.translation_spread;
        j["u_range"] = Json::array({t.u_min, t.u_max});
        j["frequencies"] = to_json(rv.frequencies);
        Json res = Json::array();
        for (const auto& k : rv.resonances) res.push_back(int_json(k));
        j["resonances"] = res;
      }
      rows[i] = std::move(j);
    });
    for (auto& r : rows) report["tori"].push_back(std::move(r));
  });
}

void cmd_lyapunov(const Scenario& sc, OutputDir& out) {
  const LyapunovBlock& b = *sc.lyapunov;
  const SystemSpec& sys = *sc.system;
  const int n = sc.n;
  Rng rng(sc.seed);
  Json report = Json::object();
  with_report(out, "lyapunov.json", report, [&] {
    PhaseState p0;
    switch (b.start) {
      case LyapunovBlock::Start::Suspension:
        p0 = PhaseState::make(Vector::Zero(n), 0.0, Vector::Zero(n), 1.0);
        report["start_kind"] = "suspension";
        break;
      case LyapunovBlock::Start::State:
        p0 = resolve_state(b.state, n, rng);
        report["start_kind"] = "state";
        break;
      case LyapunovBlock::Start::Orbit: {
        const EscapeResult esc = detect_escape(b.orbit_seed, sys.F, b.s_max, sc.tol);
        if (esc.verdict != Verdict::Escaping)
          throw ConstructionFailure("lyapunov.orbit_seed is not escaping (" +
                                    std::string(verdict_name(esc.verdict)) + ")");
        const PeriodicOrbit orbit = build_periodic_orbit(esc, sys.F, sc.tol);
        const AlgebraPoint v = orbit.start();
        p0 = PhaseState::make(Vector::Zero(n), 0.0, v.xi, v.eta);
        report["start_kind"] = "orbit";
        report["orbit"] = orbit_json(orbit);
        break;
      }
    }
    report["start"] = state_json(p0);
    LyapunovOptions opt;
    opt.t_start = b.t_start;
    opt.t_end = b.t_end;
    opt.renormalize_every = b.renormalize_every;
    const LyapunovReport r = lyapunov_exponents(p0, sys, opt, sc.tol);
    report["t_start"] = r.t_start;
    report["t_end"] = r.t_end;
    report["eta_average"] = r.eta_average;
    report["eta_first_half"] = r.eta_first_half;
    report["eta_second_half"] = r.eta_second_half;
    report["converged"] = r.converged;
    report["status"] = r.converged ? "converged" : "inconclusive";
    report["exponents_formula"] = to_json(r.exponents_formula);
    report["exponents_tangent"] = to_json(r.exponents_tangent);
    report["max_discrepancy"] = r.max_discrepancy;
  });
}

void cmd_density(const Scenario& sc, OutputDir& out) {
  const DensityBlock& b = *sc.density;
  const SystemSpec& sys = *sc.system;
  const int n = sc.n;
  Json report = Json::object();
  with_report(out, "density.json", report, [&] {
    const std::vector<Vector> grid = density_grid(n, b.grid, b.min_abs);
    report["grid_points"] = grid.size();
    Json inv = Json::object();
    try {
      Json vals = Json::array();
      for (double u : b.u) vals.push_back(Json::array({u, invariant_density(sys.F, u)}));
      inv["supported"] = true;
      inv["values"] = vals;
      const DivergenceInfo d = sys.F.divergence(Vector::Zero(n));
      inv["divergence"] = d.value;
      inv["exp_linear_residual"] = density_residual(ExpLinearDensity{d.value}, sys.F, grid);
    } catch (const Unsupported& e) {
      inv["supported"] = false;
      inv["reason"] = e.what();
    }
    report["invariant_density"] = inv;

    const auto lin = sys.F.linear_matrix();
    if (!lin) {
      report["resonances"] = Json();
      report["resonance_note"] = "F is not linear";
      return;
    }
    Eigen::EigenSolver<Matrix> es(*lin);
    std::vector<double> lambda;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      if (std::abs(es.eigenvalues()[i].imag()) > sc.tol.eigen_zero) {
        report["resonances"] = Json();
        report["resonance_note"] = "F has non-real eigenvalues";
        return;
      }
      lambda.push_back(es.eigenvalues()[i].real());
    }
    Matrix basis = es.eigenvectors().real();
    const bool diagonal = (*lin - Matrix(lin->diagonal().asDiagonal())).cwiseAbs().maxCoeff() <= 0.0;
    if (diagonal) {
      for (int i = 0; i < n; ++i) lambda[static_cast<std::size_t>(i)] = (*lin)(i, i);
      basis = Matrix::Identity(n, n);
    }
    report["lambda"] = to_json(lambda);
    report["diagonal"] = diagonal;
    const auto res = resonance_search(lambda, b.r_max, sc.tol.resonance_rel);
    std::vector<double> residual(res.size()), smoothed(res.size(), std::nan(""));
    parallel_for(res.size(), sc.threads, [&](std::size_t i) {
      const DensitySpec rho = diagonal ? DensitySpec(MonomialDensity{res[i].r, std::nullopt})
                                       : DensitySpec(MonomialDensity{res[i].r, basis});
      residual[i] = density_residual(rho, sys.F, grid);
      if (diagonal && b.smoothed)
        smoothed[i] = density_residual(SmoothedMonomialDensity{res[i].r}, sys.F, grid);
    });
    Json list = Json::array();
    auto f = out.open("resonances.csv");
    CsvRow head;
    for (int d = 0; d < n; ++d) head << "r_" + std::to_string(d + 1);
    head << "even" << "monomial_residual" << "smoothed_residual";
    f << head;
    for (std::size_t i = 0; i < res.size(); ++i) {
      list.push_back(Json::object({{"r", int_json(res[i].r)},
                                   {"even", res[i].even},
                                   {"monomial_residual", residual[i]},
                                   {"smoothed_residual", smoothed[i]}}));
      CsvRow row;
      for (int r : res[i].r) row << r;
      row << res[i].even << residual[i] << smoothed[i];
      f << row;
    }
    report["r_max"] = b.r_max;
    report["resonances"] = list;
  });
}

void cmd_thermostat(const Scenario& sc, OutputDir& out) {
  const ThermostatBlock& b = *sc.thermostat;
  const OperatorL& l = sc.system->L;
  const int n = sc.n;
  Rng rng(sc.seed);
  StateInput in;
  if (b.xi) {
    in.xi = b.xi;
    in.eta = b.eta;
  }
  const PhaseState p0 = resolve_state(in, n, rng);
  const std::uint64_t orbit_seed = sc.seed;

  Json report = Json::object();
  const RegimeTable t = thermostat_regimes(l);
  report["r_min"] = t.r_min;
  report["r_max"] = t.r_max;
  report["integrable_k"] = t.integrable ? Json::array({t.integrable->first, t.integrable->second}) : Json();
  report["attractor_k"] = Json::array({t.attractor.first, t.attractor.second});
  report["boundary_k"] = t.boundary ? Json(*t.boundary) : Json();
  report["attractor_note"] = t.attractor_note;
  report["start"] = state_json(p0);
  report["t"] = b.t;
  report["runs"] = Json::array();

  with_report(out, "thermostat.json", report, [&] {
    std::vector<Json> runs(b.k.size());
    parallel_for(b.k.size(), sc.threads, [&](std::size_t i) {
      const ThermostatSpec spec{l, b.k[i]};
      const ThermostatRun run = thermostat_simulate(spec, p0, b.t, sc.tol);
      Json j = Json::object();
      j["k"] = spec.k;
      j["regime"] = regime_name(run.regime);
      j["rescaled"] = run.rescaled;
      j["energy_drift"] = run.energy_drift;
      j["distance_to_suspension"] = run.distance_to_suspension;
      j["converged_to_suspension"] = run.converged_to_suspension;
      j["escape"] = run.escape ? escape_json(*run.escape) : Json();
      if (l.is_diagonal()) {
        const WeylExponents w = weyl_exponents(l, spec.k);
        j["weyl"] = Json::object({{"tau", to_json(w.tau)},
                                  {"integrable", w.integrable},
                                  {"nonpositive_curvature", w.nonpositive_curvature}});
      }
      if (run.regime == Regime::Integrable && b.orbits) {
        const FieldSpec f = spec.field();
        std::optional<EscapeResult> esc;
        std::string source = "start";
        if (run.escape && run.escape->verdict == Verdict::Escaping) {
          esc = run.escape;
        } else {
          Rng seeds(orbit_seed + i);
          source = "seed";
          for (int a = 0; a < kSeedAttemptsPerOrbit && !esc; ++a) {
            const EscapeResult e = detect_escape(seeds.in_ball(n, 0.9), f, sc.tol.horizon, sc.tol);
            if (e.verdict == Verdict::Escaping) esc = e;
          }
          if (!esc) throw ConstructionFailure("no escaping seed for k = " + format_double(spec.k));
        }
        const PeriodicOrbit orbit = build_periodic_orbit(*esc, f, sc.tol);
        const SystemSpec sys = SystemSpec::make(l, f, sc.system->lattice, false, sc.tol);
        const InvariantTorus torus = build_invariant_torus(orbit, 0.0, sys, sc.tol, orbit_seed + i);
        j["orbit_source"] = source;
        j["orbit"] = orbit_json(orbit);
        j["torus"] = Json::object({{"translation", to_json(torus.translation)},
                                   {"verify_defect", torus.verify_defect},
                                   {"translation_spread", torus.translation_spread},
                                   {"quadrature_error", torus.quadrature_error}});
      }
      runs[i] = std::move(j);
    });
    for (auto& r : runs) report["runs"].push_back(std::move(r));

    auto f = out.open("thermostat.csv");
    f << (CsvRow() << "k" << "regime" << "energy_drift" << "distance_to_suspension"
                   << "converged_to_suspension" << "orbit_closure_defect" << "torus_verify_defect");
    for (const auto& r : report["runs"]) {
      CsvRow row;
      row << r["k"].get<double>() << r["regime"].get<std::string>() << r["energy_drift"].get<double>()
          << r["distance_to_suspension"].get<double>() << r["converged_to_suspension"].get<bool>();
      if (r.contains("orbit")) {
        row << r["orbit"]["closure_defect"].get<double>() << r["torus"]["verify_defect"].get<double>();
      } else {
        row << "" << "";
      }
      f << row;
    }

    if (b.bisect) {
      const auto [lo, hi] = bisect_threshold(l, b.bisect->first, b.bisect->second, b.width,
                                             b.samples, sc.seed, sc.tol);
      report["bisection"] = Json::object({{"k_lo", lo},
                                          {"k_hi", hi},
                                          {"width", b.width},
                                          {"samples", b.samples},
                                          {"midpoint", 0.5 * (lo + hi)},
                                          {"k_star_from_spectrum",
                                           t.r_max > 0.0 ? Json(1.0 / t.r_max) : Json()}});
    }
  });
}

Json compact_json(const CompactLevel& c) {
  Json j = Json::object();
  j["compact"] = c.compact;
  j["empty"] = c.empty;
  if (c.compact) {
    j["x0_interval"] = Json::array({c.lo, c.hi});
    Json pairs = Json::array();
    for (const auto& [i, l] : c.pairs) pairs.push_back(Json::array({i, l}));
    j["pairs"] = pairs;
  } else {
    j["side"] = c.side;
  }
  return j;
}

void cmd_geodesic(const Scenario& sc, OutputDir& out) {
  const GeodesicBlock& b = *sc.geodesic;
  const int m = b.metric.dim();
  Json report = Json::object();
  with_report(out, "geodesic.json", report, [&] {
    const double h = hamiltonian(b.state, b.metric);
    report["H"] = h;
    const GeodesicRun run = geodesic_simulate(b.state, b.metric, b.t,
                                              ode::Tolerance{sc.tol.ode_abs, sc.tol.ode_rel},
                                              b.samples > 0);
    report["t"] = b.t;
    report["h_drift"] = run.h_drift;
    report["p_drift"] = run.p_drift;
    report["x0_range"] = Json::array({run.x0_min, run.x0_max});
    report["exit_time"] = run.exit_time ? Json(*run.exit_time) : Json();
    report["exit_side"] = run.exit_time ? Json(run.exit_side) : Json();
    if (b.compact_check) {
      const CompactLevel c = check_compact_level(b.metric, b.state.p, h);
      Json cj = compact_json(c);
      if (c.compact && !c.empty) {
        const double pad = 1e-6;
        cj["contained"] = run.x0_min >= c.lo - pad && run.x0_max <= c.hi + pad;
      }
      report["level"] = cj;
    }
    if (b.samples > 0) {
      auto f = out.open("geodesic.jsonl");
      for (double t : sample_times(run.trajectory, b.samples)) {
        const GeodesicState s = unpack_geodesic(run.trajectory.at(t), m);
        Json j = Json::object({{"t", t},
                               {"x", to_json(s.x)},
                               {"x0", s.x0},
                               {"p", to_json(s.p)},
                               {"p0", s.p0}});
        f << dump_json(j, -1) << '\n';
      }
    }
  });
}

void cmd_sweep(const Scenario& sc, OutputDir& out) {
  const SweepBlock& b = *sc.sweep;
  const std::size_t count = static_cast<std::size_t>(b.count);
  if (b.kind == SweepBlock::Kind::ThermostatK) {
    const OperatorL& l = sc.system->L;
    std::vector<double> ks(count);
    for (std::size_t i = 0; i < count; ++i)
      ks[i] = count == 1 ? b.k_min : b.k_min + (b.k_max - b.k_min) * double(i) / double(count - 1);
    std::vector<Regime> regimes(count);
    std::vector<SpectrumTag> tags(count);
    parallel_for(count, sc.threads, [&](std::size_t i) {
      regimes[i] = thermostat_regime(l, ks[i]);
      tags[i] = classify_linear_field(*FieldSpec::thermostat(l, ks[i]).linear_matrix(),
                                      sc.tol.eigen_zero).tag;
    });
    auto f = out.open("sweep.csv");
    f << (CsvRow() << "k" << "regime" << "spectrum_tag" << "consistent");
    std::size_t consistent = 0;
    for (std::size_t i = 0; i < count; ++i) {
      const bool ok = (tags[i] == SpectrumTag::MixedRealParts) == (regimes[i] == Regime::Integrable);
      consistent += ok;
      f << (CsvRow() << ks[i] << regime_name(regimes[i]) << spectrum_tag_name(tags[i]) << ok);
    }
    out.write_json("sweep.json", Json::object({{"kind", "thermostat-k"},
                                               {"count", count},
                                               {"consistent", consistent}}));
    return;
  }
  const GeodesicBlock& g = *sc.geodesic;
  const int m = g.metric.dim();
  if (m > 3) throw Unsupported("sweep.kind: geodesic-momenta grids support n <= 3");
  std::size_t total = 1;
  for (int d = 0; d < m; ++d) total *= count;
  const auto p_at = [&](std::size_t idx) {
    Vector p(m);
    for (int d = 0; d < m; ++d) {
      const std::size_t k = idx % count;
      idx /= count;
      p[d] = count == 1 ? b.p_min : b.p_min + (b.p_max - b.p_min) * double(k) / double(count - 1);
    }
    return p;
  };
  std::vector<CompactLevel> levels(total);
  parallel_for(total, sc.threads, [&](std::size_t i) {
    levels[i] = check_compact_level(g.metric, p_at(i), b.h);
  });
  auto f = out.open("sweep.csv");
  CsvRow head;
  for (int d = 0; d < m; ++d) head << "p_" + std::to_string(d + 1);
  head << "compact" << "empty" << "side" << "x0_lo" << "x0_hi";
  f << head;
  std::size_t compact = 0;
  for (std::size_t i = 0; i < total; ++i) {
    const Vector p = p_at(i);
    const CompactLevel& c = levels[i];
    compact += c.compact;
    CsvRow row;
    for (int d = 0; d < m; ++d) row << p[d];
    row << c.compact << c.empty << c.side;
    if (c.compact && !c.empty) {
      row << c.lo << c.hi;
    } else {
      row << "" << "";
    }
    f << row;
  }
  out.write_json("sweep.json", Json::object({{"kind", "geodesic-momenta"},
                                             {"h", b.h},
                                             {"points", total},
                                             {"compact", compact}}));
}

}  // namespace

void run_command(const Scenario& sc, OutputDir& out, std::ostream& log) {
  log << "lfsys " << sc.command << " (n = " << sc.n << ", seed = " << sc.seed << ")\n";
  if (sc.command == "classify") return cmd_classify(sc, out);
  if (sc.command == "euler-portrait") return cmd_portrait(sc, out);
  if (sc.command == "periodic") return cmd_periodic(sc, out);
  if (sc.command == "simulate") return cmd_simulate(sc, out);
  if (sc.command == "tori") return cmd_tori(sc, out);
  if (sc.command == "lyapunov") return cmd_lyapunov(sc, out);
  if (sc.command == "density") return cmd_density(sc, out);
  if (sc.command == "thermostat") return cmd_thermostat(sc, out);
  if (sc.command == "geodesic") return cmd_geodesic(sc, out);
  if (sc.command == "sweep") return cmd_sweep(sc, out);
  throw InvalidInput("command: none given (set command in the scenario or on the command line)");
}

RunResult run(const RunRequest& req, std::ostream& log) {
  RunResult result;
  Json manifest = Json::object();
  manifest["tool"] = "lfsys";
  manifest["version"] = LFSYS_VERSION;
  manifest["scenario_file"] = std::filesystem::path(req.scenario_path).filename().string();

  std::optional<OutputDir> out;
  try {
    out.emplace(req.out_dir);
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    result.exit_code = kExitValidation;
    result.error = e.what();
    return result;
  }

  std::optional<Scenario> sc;
  try {
    sc = parse_scenario_file(req.scenario_path, req.tol_overrides, req.command);
    if (req.threads) {
      if (*req.threads < 1) throw InvalidInput("--threads: must be positive");
      sc->threads = *req.threads;
    }
    if (sc->command.empty()) throw InvalidInput("command: none given");
    run_command(*sc, *out, log);
  } catch (const InvalidInput& e) {
    result.exit_code = kExitValidation;
    result.error = e.what();
  } catch (const Unsupported& e) {
    result.exit_code = kExitValidation;
    result.error = e.what();
  } catch (const Error& e) {
    result.exit_code = kExitNumerical;
    result.error = e.what();
  } catch (const std::exception& e) {
    result.exit_code = kExitNumerical;
    result.error = std::string("unexpected: ") + e.what();
  }
  if (!result.error.empty()) log << "error: " << result.error << '\n';

  manifest["command"] = sc ? Json(sc->command) : Json(req.command);
  manifest["scenario"] = sc ? sc->echo : Json();
  manifest["n"] = sc ? Json(sc->n) : Json();
  manifest["seed"] = sc ? Json(sc->seed) : Json();
  manifest["threads"] = sc ? Json(sc->threads) : Json();
  manifest["rng"] = "mt19937_64, double = (next >> 11) * 2^-53";
  manifest["isa"] = simd::isa_name(simd::active_isa());
  Json tol = Json::object();
  for (const auto& [k, v] : (sc ? sc->tol : Tolerances{}).as_map()) tol[k] = v;
  manifest["tolerances"] = tol;
  manifest["outputs"] = out->files();
  manifest["partial"] = result.exit_code != kExitOk && !out->files().empty();
  manifest["exit_code"] = result.exit_code;
  manifest["error"] = result.error.empty() ? Json() : Json(result.error);
  try {
    out->write_json("manifest.json", manifest);
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    if (result.exit_code == kExitOk) result.exit_code = kExitValidation;
  }
  result.files = out->files();
  return result;
}

}  // namespace lfsys::cli
