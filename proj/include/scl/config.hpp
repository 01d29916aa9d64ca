#pragma once

#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include <json.hpp>

#include "scl/coefficient.hpp"
#include "scl/error.hpp"

namespace scl {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Interface matching convention across the circle r = rz.
/// UnitNormal: metric-unit normal derivatives agree (weights sqrt(a±)).
/// Flux: the variational condition of the sign-changing bilinear form
/// (weights a±); the only convention the 2-D FEM assembles.
enum class Transmission { unit_normal, flux };

inline const char* transmission_name(Transmission t) {
  return t == Transmission::unit_normal ? "unit_normal" : "flux";
}

struct Tolerances {
  double quad_abs = 1e-10;         // volume/length quadrature
  double ode_rel = 1e-10;          // radial integrator, per step
  double ode_abs = 1e-13;
  double root_rel = 1e-9;          // eigenvalue bisection, relative to max(1,|lambda|)
  double eig_residual = 1e-8;      // ||K x - lambda M x|| certificate
  int dense_cap = 6000;            // largest pencil handled by the dense path
  double tube_delta_factor = 0.15; // classification tube half-width, in units of rz
  double interface_mass_threshold = 0.5;
};

/// Two-phase disk: coefficient a_plus on the inner disk {r < rz}, a_minus on
/// the annulus {rz < r < ry}, Dirichlet on the outer circle r = ry.
struct TwoPhaseDiskConfig {
  double rz = 1.0;
  double ry = 2.0;
  RadialCoefficient a_plus = RadialCoefficient::constant(2.0);
  RadialCoefficient a_minus = RadialCoefficient::constant(1.0);
  Transmission transmission = Transmission::unit_normal;
  Tolerances tol;

  double a_plus_z() const { return a_plus(rz); }
  double a_minus_z() const { return a_minus(rz); }
};

namespace detail {

inline RadialCoefficient coefficient_from_json(const nlohmann::json& j) {
  if (j.contains("constant")) return RadialCoefficient::constant(j.at("constant").get<double>());
  if (j.contains("polynomial"))
    return RadialCoefficient::polynomial(j.at("polynomial").get<std::vector<double>>());
  if (j.contains("sampled")) {
    const auto& s = j.at("sampled");
    return RadialCoefficient::sampled(s.at("r").get<std::vector<double>>(),
                                      s.at("values").get<std::vector<double>>());
  }
  raise(errc::config_invalid, "coefficient must be one of constant/polynomial/sampled");
}

inline nlohmann::json coefficient_to_json(const RadialCoefficient& c) {
  nlohmann::json j;
  if (const auto* k = std::get_if<RadialCoefficient::Constant>(&c.repr())) {
    j["constant"] = k->value;
  } else if (const auto* p = std::get_if<RadialCoefficient::Polynomial>(&c.repr())) {
    j["polynomial"] = p->coeffs;
  } else {
    const auto& s = std::get<RadialCoefficient::Sampled>(c.repr());
    j["sampled"] = {{"r", s.r}, {"values", s.v}};
  }
  return j;
}

}  // namespace detail

inline TwoPhaseDiskConfig config_from_json(const nlohmann::json& j) {
  TwoPhaseDiskConfig cfg;
  try {
    const auto& g = j.at("geometry");
    cfg.rz = g.at("rz").get<double>();
    cfg.ry = g.at("ry").get<double>();
    const auto& c = j.at("coefficients");
    cfg.a_plus = detail::coefficient_from_json(c.at("a_plus"));
    cfg.a_minus = detail::coefficient_from_json(c.at("a_minus"));
    if (j.contains("transmission")) {
      std::string t = j.at("transmission").get<std::string>();
      if (t == "unit_normal")
        cfg.transmission = Transmission::unit_normal;
      else if (t == "flux")
        cfg.transmission = Transmission::flux;
      else
        raise(errc::config_invalid, "transmission must be unit_normal or flux, got " + t);
    }
    if (j.contains("tolerances")) {
      const auto& t = j.at("tolerances");
      auto get = [&](const char* key, double& field) {
        if (t.contains(key)) field = t.at(key).get<double>();
      };
      get("quad_abs", cfg.tol.quad_abs);
      get("ode_rel", cfg.tol.ode_rel);
      get("ode_abs", cfg.tol.ode_abs);
      get("root_rel", cfg.tol.root_rel);
      get("eig_residual", cfg.tol.eig_residual);
      get("tube_delta_factor", cfg.tol.tube_delta_factor);
      get("interface_mass_threshold", cfg.tol.interface_mass_threshold);
      if (t.contains("dense_cap")) cfg.tol.dense_cap = t.at("dense_cap").get<int>();
    }
  } catch (const nlohmann::json::exception& e) {
    raise(errc::config_invalid, std::string("malformed config: ") + e.what());
  }
  return cfg;
}

inline nlohmann::json config_to_json(const TwoPhaseDiskConfig& cfg) {
  nlohmann::json j;
  j["geometry"] = {{"rz", cfg.rz}, {"ry", cfg.ry}};
  j["coefficients"] = {{"a_plus", detail::coefficient_to_json(cfg.a_plus)},
                       {"a_minus", detail::coefficient_to_json(cfg.a_minus)}};
  j["transmission"] = transmission_name(cfg.transmission);
  j["tolerances"] = {{"quad_abs", cfg.tol.quad_abs},
                     {"ode_rel", cfg.tol.ode_rel},
                     {"ode_abs", cfg.tol.ode_abs},
                     {"root_rel", cfg.tol.root_rel},
                     {"eig_residual", cfg.tol.eig_residual},
                     {"dense_cap", cfg.tol.dense_cap},
                     {"tube_delta_factor", cfg.tol.tube_delta_factor},
                     {"interface_mass_threshold", cfg.tol.interface_mass_threshold}};
  return j;
}

inline TwoPhaseDiskConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(errc::config_invalid, "cannot open config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    raise(errc::config_invalid, std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json(j);
}

/// The reference configuration used throughout the test suite:
/// rz = 1, ry = 2, a+ = 2, a- = 1.
inline TwoPhaseDiskConfig reference_config(Transmission t = Transmission::unit_normal) {
  TwoPhaseDiskConfig cfg;
  cfg.transmission = t;
  return cfg;
}

}  // namespace scl
