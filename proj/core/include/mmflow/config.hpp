#pragma once

namespace mmflow {

/// Every tolerance used by a verifier. Defaults are the pinned values; a
/// JSON file with any subset of these keys overrides them.
struct Config {
  // Discretisation tolerance a*dt + b/N + floor for curve verifiers.
  double tol_a = 1.0;
  double tol_b = 1.0;
  double tol_floor = 1e-9;
  // Geodesic tolerance geo_c / N.
  double geo_c = 1.0;

  double duality_gap = 1e-9;
  double slackness = 1e-8;
  double mass = 1e-12;
  double marginal = 1e-10;
  double identity = 1e-10;      // algebraic identities (parallelogram, D+ = D-)
  double exact = 1e-9;          // inequalities that hold exactly up to rounding
  double horver = 1e-8;
  double lip_slack = 1e-12;
  double hj_floor = 1e-12;
  double c_concave = 1e-9;
  double max_principle = 1e-13;  // relative to max rho0
  double young = 1e-12;

  int dpm_max_k = 40;
  int slope_iterations = 500;
  long max_paths = 1000000;

  double tol(double dt, double resolution) const { return tol_a * dt + tol_b / resolution + tol_floor; }
  double tol_geo(double resolution) const { return geo_c / resolution; }
};

}  // namespace mmflow
