#include "netdyn/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "netdyn/errors.hpp"

namespace netdyn {

std::size_t IntegratorConfig::steps() const {
  if (!(h > 0.0) || !std::isfinite(h)) throw Error("step size must be positive");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw Error("end time must be positive");
  if (h > t_end) throw Error("step size exceeds the end time");
  return static_cast<std::size_t>(std::llround(t_end / h));
}

namespace {

// out = x + c * k, block by block
void axpy(const TotalPoint& x, double c, const TangentTotalPoint& k, TotalPoint& out) {
  auto kb = k.blocks().begin();
  auto ob = out.blocks().begin();
  for (const auto& [a, xv] : x.blocks()) {
    const auto& kv = (kb++)->second;
    auto& ov = (ob++)->second;
    for (std::size_t i = 0; i < xv.size(); ++i) ov[i] = xv[i] + c * kv[i];
  }
}

// Matching NaNs count as agreement; any other non-finite difference is infinite.
double entry_residual(double u, double v) {
  if (u == v || (std::isnan(u) && std::isnan(v))) return 0.0;
  const double d = std::abs(u - v);
  return std::isnan(d) ? std::numeric_limits<double>::infinity() : d;
}

}  // namespace

TotalPoint rk4_step(const InterconnectedField& field, const TotalPoint& x, double h) {
  check_shape(field.network(), x);
  const double half = h / 2;
  auto k1 = BlockVector::zeros(field.network());
  auto k2 = k1, k3 = k1, k4 = k1, tmp = k1;

  field.evaluate_into(x, k1);
  axpy(x, half, k1, tmp);
  field.evaluate_into(tmp, k2);
  axpy(x, half, k2, tmp);
  field.evaluate_into(tmp, k3);
  axpy(x, h, k3, tmp);
  field.evaluate_into(tmp, k4);

  TotalPoint next = x;
  for (const auto& [a, xv] : x.blocks()) {
    const auto &v1 = k1[a], &v2 = k2[a], &v3 = k3[a], &v4 = k4[a];
    auto& nv = next[a];
    for (std::size_t i = 0; i < xv.size(); ++i) {
      nv[i] = xv[i] + (h / 6) * (v1[i] + 2 * v2[i] + 2 * v3[i] + v4[i]);
    }
  }
  return next;
}

Trajectory rk4_integrate(const InterconnectedField& field, const TotalPoint& x0,
                         const IntegratorConfig& cfg) {
  check_shape(field.network(), x0);
  const std::size_t n = cfg.steps();
  if (!x0.is_finite()) throw IntegrationError(0, "initial condition is not finite");

  Trajectory traj;
  traj.times.reserve(n + 1);
  traj.states.reserve(n + 1);
  traj.times.push_back(0.0);
  traj.states.push_back(x0);
  for (std::size_t k = 1; k <= n; ++k) {
    auto next = rk4_step(field, traj.states.back(), cfg.h);
    if (!next.is_finite()) throw IntegrationError(k, "state is not finite");
    traj.times.push_back(static_cast<double>(k) * cfg.h);
    traj.states.push_back(std::move(next));
  }
  return traj;
}

ConjugacyReport check_vectorfield_conjugacy(const GraphMorphism& phi,
                                            const FibrationWitness& witness,
                                            const NetworkOfManifolds& net,
                                            const NetworkOfManifolds& net_prime,
                                            const ControlFamily& w_prime, std::size_t samples,
                                            std::uint64_t seed) {
  const auto pulled = pullback_family(phi, witness, net, net_prime, w_prime);
  const auto field = interconnect(net, pulled);
  const auto field_prime = interconnect(net_prime, w_prime);

  ConjugacyReport report;
  report.samples = samples;
  report.seed = seed;
  for (const auto& a : net.graph.nodes()) report.residual_per_node[a] = 0.0;

  SplitMix64 rng(seed);
  for (std::size_t s = 0; s < samples; ++s) {
    const auto x_prime = random_point(net_prime, rng);
    const auto lhs = field(pullback_point(phi, x_prime));
    const auto rhs = pullback_tangent(phi, field_prime(x_prime));
    for (const auto& [a, u] : lhs.blocks()) {
      const auto& v = rhs[a];
      double r = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) r = std::max(r, entry_residual(u[i], v[i]));
      auto& slot = report.residual_per_node[a];
      slot = std::max(slot, r);
      report.max_residual = std::max(report.max_residual, r);
    }
  }
  return report;
}

SemiconjugacyReport check_trajectory_semiconjugacy(const GraphMorphism& phi,
                                                   const FibrationWitness& witness,
                                                   const NetworkOfManifolds& net,
                                                   const NetworkOfManifolds& net_prime,
                                                   const ControlFamily& w_prime,
                                                   const TotalPoint& x0_prime,
                                                   const IntegratorConfig& cfg) {
  const auto pulled = pullback_family(phi, witness, net, net_prime, w_prime);
  const auto field = interconnect(net, pulled);
  const auto field_prime = interconnect(net_prime, w_prime);
  check_shape(net_prime, x0_prime);

  const std::size_t n = cfg.steps();
  SemiconjugacyReport report;
  report.steps = n;

  TotalPoint x = x0_prime;
  TotalPoint y = pullback_point(phi, x0_prime);
  for (std::size_t k = 1; k <= n; ++k) {
    x = rk4_step(field_prime, x, cfg.h);
    y = rk4_step(field, y, cfg.h);
    if (!x.is_finite() || !y.is_finite()) throw IntegrationError(k, "state is not finite");
    const double dev = max_abs_difference(pullback_point(phi, x), y);
    if (dev > report.max_deviation) {
      report.max_deviation = dev;
      report.time_of_max = static_cast<double>(k) * cfg.h;
    }
  }
  return report;
}

InvarianceReport check_polydiagonal_invariance(const GraphMorphism& q,
                                               const NetworkOfManifolds& net,
                                               const ControlFamily& w, const TotalPoint& x0,
                                               const IntegratorConfig& cfg) {
  const auto field = interconnect(net, w);
  check_shape(net, x0);

  InvarianceReport report;
  report.steps = cfg.steps();
  report.initial_deviation = polydiagonal_membership(q, x0, 0.0).max_deviation;
  report.started_on_polydiagonal = report.initial_deviation == 0.0;
  report.max_deviation = report.initial_deviation;

  TotalPoint x = x0;
  for (std::size_t k = 1; k <= report.steps; ++k) {
    x = rk4_step(field, x, cfg.h);
    if (!x.is_finite()) throw IntegrationError(k, "state is not finite");
    report.max_deviation =
        std::max(report.max_deviation, polydiagonal_membership(q, x, 0.0).max_deviation);
  }
  return report;
}

}  // namespace netdyn
