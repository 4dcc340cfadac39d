#include "lfsys/core/tolerances.hpp"

namespace lfsys {

namespace {

template <class Fn>
void for_each_field(Tolerances& t, Fn&& fn) {
  fn("algebraic", t.algebraic);
  fn("ode_check", t.ode_check);
  fn("ode_abs", t.ode_abs);
  fn("ode_rel", t.ode_rel);
  fn("event", t.event);
  fn("field_slack", t.field_slack);
  fn("transversality_margin", t.transversality_margin);
  fn("bounded_margin", t.bounded_margin);
  fn("horizon", t.horizon);
  fn("eigen_zero", t.eigen_zero);
  fn("automorphism_rounding", t.automorphism_rounding);
  fn("torus_verify", t.torus_verify);
  fn("orbit_arrival", t.orbit_arrival);
  fn("attractor_distance", t.attractor_distance);
  fn("attractor_time", t.attractor_time);
  fn("resonance_rel", t.resonance_rel);
  fn("rotation_resonance", t.rotation_resonance);
  fn("eta_convergence", t.eta_convergence);
}

}  // namespace

bool Tolerances::set(const std::string& key, double value) {
  bool found = false;
  for_each_field(*this, [&](const char* name, double& field) {
    if (key == name) {
      field = value;
      found = true;
    }
  });
  return found;
}

std::map<std::string, double> Tolerances::as_map() const {
  std::map<std::string, double> out;
  Tolerances copy = *this;
  for_each_field(copy, [&](const char* name, double& field) { out[name] = field; });
  return out;
}

}  // namespace lfsys
