#include "mmflow/heatflow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "mmflow/error.hpp"
#include "mmflow/generators.hpp"

namespace mmflow {

Field laplacian(const Space& space, const Field& f) {
  Field out = Field::Zero(space.size());
  for (const Edge& e : space.edges()) {
    const double flux = e.weight * (f[e.b] - f[e.a]);
    out[e.a] += flux;
    out[e.b] -= flux;
  }
  return out.cwiseQuotient(space.measure());
}

double dirichlet_energy(const Space& space, const Field& f) {
  double e = 0.0;
  for (const Edge& edge : space.edges()) {
    const double d = f[edge.b] - f[edge.a];
    e += edge.weight * d * d;
  }
  return 0.5 * e;
}

HeatTrajectory run_heat_flow(const Space& space, const Field& rho0, double horizon, double dt) {
  const int n = space.size();
  if (rho0.size() != n) throw Error(ErrorKind::kBadInitial, "initial density size does not match space");
  if (!rho0.allFinite() || rho0.minCoeff() < 0.0)
    throw Error(ErrorKind::kBadInitial, "initial density must be finite and nonnegative");
  if (std::abs(rho0.dot(space.measure()) - 1.0) > 1e-12)
    throw Error(ErrorKind::kBadInitial, "initial density must have unit mass");
  if (!(horizon > 0.0) || !(dt > 0.0)) throw Error(ErrorKind::kBadInput, "T and dt must be positive");
  const int steps = std::max(1, static_cast<int>(std::lround(horizon / dt)));
  const double h = horizon / steps;

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int x = 0; x < n; ++x) a(x, x) = space.mass(x);
  for (const Edge& e : space.edges()) {
    a(e.a, e.a) += h * e.weight;
    a(e.b, e.b) += h * e.weight;
    a(e.a, e.b) -= h * e.weight;
    a(e.b, e.a) -= h * e.weight;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) throw Error(ErrorKind::kSolverFailure, "implicit Euler matrix not definite");

  HeatTrajectory tr;
  Field rho = rho0;
  for (int k = 0; k <= steps; ++k) {
    if (k > 0) {
      rho = llt.solve(Field(space.measure().cwiseProduct(rho)));
      if (!rho.allFinite()) throw Error(ErrorKind::kSolverFailure, "implicit Euler step produced non-finite values");
    }
    tr.times.push_back(k == steps ? horizon : k * h);
    tr.laplacians.push_back(laplacian(space, rho));
    tr.energies.push_back(dirichlet_energy(space, rho));
    tr.densities.push_back(rho);
  }
  return tr;
}

CurveSample heat_curve(const Space& space, const HeatTrajectory& traj, int stride) {
  const int steps = static_cast<int>(traj.times.size()) - 1;
  if (stride < 1 || steps % stride != 0) throw Error(ErrorKind::kBadInput, "stride must divide the step count");
  std::vector<Field> dens;
  for (int k = 0; k <= steps; k += stride) dens.push_back(traj.densities[k]);
  return make_curve(space, uniform_times(steps / stride), dens);
}

VerificationReport verify_heat_invariants(const Space& space, const HeatTrajectory& traj, const Config& config) {
  VerificationReport rep;
  rep.suite = "heat";
  const int steps = static_cast<int>(traj.times.size()) - 1;
  const Field& m = space.measure();
  const Field& rho0 = traj.densities.front();
  const double mass0 = rho0.dot(m);
  const double hi = rho0.maxCoeff();
  const double lo = rho0.minCoeff();

  double mass = 0.0;
  double maxpr = 0.0;
  double monotone = -std::numeric_limits<double>::infinity();
  double identity = 0.0;
  double dissipated = 0.0;
  double convexity = -std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(0);
  for (int k = 0; k <= steps; ++k) {
    const Field& rho = traj.densities[k];
    mass = std::max(mass, std::abs(rho.dot(m) - mass0));
    maxpr = std::max({maxpr, rho.maxCoeff() - hi, lo - rho.minCoeff()});
    if (k > 0) {
      const double h = traj.times[k] - traj.times[k - 1];
      const Field& lap = traj.laplacians[k];
      const double l2 = lap.cwiseProduct(lap).dot(m);
      dissipated += h * l2;
      const double drop = traj.energies[k - 1] - traj.energies[k];
      monotone = std::max(monotone, -drop);
      const double expect = h * l2 + h * h * dirichlet_energy(space, lap);
      identity = std::max(identity, std::abs(drop - expect) / std::max(1.0, traj.energies[0]));
    }
    // Tangent-line inequality of the convex energy at rho.
    for (int s = 0; s < 2; ++s) {
      Field f(space.size());
      for (int x = 0; x < space.size(); ++x) f[x] = 2.0 * unit_double(rng) - 1.0;
      for (double eps : {-1.0, -1e-3, 1e-3, 1.0}) {
        const double lhs = eps * f.cwiseProduct(traj.laplacians[k]).dot(m);
        const double rhs = dirichlet_energy(space, rho - eps * f) - traj.energies[k];
        convexity = std::max(convexity, lhs - rhs);
      }
    }
  }
  rep.add("heat.mass", "mass conservation", mass, 0.0, config.mass);
  rep.add("heat.max_principle", "weak maximum principle", maxpr, 0.0, config.max_principle * hi);
  rep.add("heat.energy_monotone", "energy decreases along the flow", monotone, 0.0,
          config.exact * std::max(1.0, traj.energies[0]));
  rep.add("heat.dissipation_identity", "implicit Euler energy identity", identity, 0.0, config.exact);
  rep.add("heat.dissipation", "dissipation bounded by initial energy", dissipated, traj.energies[0],
          config.exact * std::max(1.0, traj.energies[0]));
  rep.add("heat.subdifferential", "energy tangent-line inequality", convexity, 0.0, config.exact);
  return rep;
}

HeatContinuity verify_heat_continuity(const Space& space, const HeatTrajectory& traj, CalculusKind kind,
                                      const std::vector<Field>& battery) {
  if (kind != CalculusKind::kQuadratic)
    throw Error(ErrorKind::kBadInput, "heat continuity is defined for the quadratic calculus");
  if (traj.densities.front().minCoeff() <= 0.0)
    throw Error(ErrorKind::kBadInitial, "initial density must be bounded below by a positive constant");
  const Field& m = space.measure();
  const int steps = static_cast<int>(traj.times.size()) - 1;
  HeatContinuity out;
  for (const Field& f : battery) {
    std::vector<double> mean(steps + 1);
    for (int k = 0; k <= steps; ++k) mean[k] = f.cwiseProduct(traj.densities[k]).dot(m);
    for (int k = 0; k <= steps; ++k) {
      const Field& rho = traj.densities[k];
      // -int D+-f(grad rho) dm, equal for the quadratic calculus.
      const Dpm d = dpm(space, kind, f, rho);
      const double upper = -d.minus.dot(m);
      const double lower = -d.plus.dot(m);
      const double pairing = f.cwiseProduct(traj.laplacians[k]).dot(m);

      double chain = 0.0;
      const Field logr = rho.array().log().matrix();
      for (const Edge& e : space.edges())
        chain -= e.weight * (f[e.b] - f[e.a]) * (logr[e.b] - logr[e.a]) * 0.5 * (rho[e.a] + rho[e.b]);
      out.chain_form = std::max(out.chain_form, std::abs(chain - pairing));

      if (k > 0) {
        const double back = (mean[k] - mean[k - 1]) / (traj.times[k] - traj.times[k - 1]);
        out.one_sided = std::max(out.one_sided, std::abs(back - pairing));
      }
      if (k > 0 && k < steps) {
        const double central = (mean[k + 1] - mean[k - 1]) / (traj.times[k + 1] - traj.times[k - 1]);
        out.central = std::max(out.central, std::abs(central - pairing));
        out.sandwich = std::max({out.sandwich, lower - central, central - upper});
      }
    }
  }
  return out;
}

WeakC1 verify_weak_c1(const Space& space, const std::vector<double>& times, const std::vector<Field>& densities,
                      const std::vector<Field>& battery) {
  WeakC1 out;
  const Field& m = space.measure();
  for (const Field& f : battery) {
    std::vector<double> mean;
    for (const Field& rho : densities) mean.push_back(f.cwiseProduct(rho).dot(m));
    for (std::size_t k = 1; k + 1 < mean.size(); ++k) {
      const double h0 = times[k] - times[k - 1];
      const double h1 = times[k + 1] - times[k];
      const double second = 2.0 * ((mean[k + 1] - mean[k]) / h1 - (mean[k] - mean[k - 1]) / h0) / (h0 + h1);
      out.modulus = std::max(out.modulus, std::abs(second));
    }
  }
  return out;
}

}  // namespace mmflow
