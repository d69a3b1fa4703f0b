#pragma once

// Fixed-step integration of interconnected fields and the numerical checks
// that a fibration induces a map of dynamical systems.

#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include "netdyn/graph.hpp"
#include "netdyn/network.hpp"
#include "netdyn/open_system.hpp"
#include "netdyn/random.hpp"

namespace netdyn {

struct IntegratorConfig {
  double h = 1e-3;
  double t_end = 1.0;

  /// round(t_end / h). Throws Error if h <= 0 or h > t_end.
  std::size_t steps() const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<TotalPoint> states;
};

/// One classical RK4 step, evaluated block by block.
TotalPoint rk4_step(const InterconnectedField& field, const TotalPoint& x, double h);

/// Throws IntegrationError naming the first step whose state is not finite.
Trajectory rk4_integrate(const InterconnectedField& field, const TotalPoint& x0,
                         const IntegratorConfig& cfg);

struct ConjugacyReport {
  std::size_t samples = 0;
  double max_residual = 0.0;
  std::map<NodeId, double> residual_per_node;
  std::uint64_t seed = 0;
};

inline constexpr std::size_t kDefaultConjugacySamples = 100;

/// Residual of J(phi* w') o P phi  vs  D P phi o J'(w') at random codomain
/// points, per domain node in the infinity norm.
ConjugacyReport check_vectorfield_conjugacy(const GraphMorphism& phi,
                                            const FibrationWitness& witness,
                                            const NetworkOfManifolds& net,
                                            const NetworkOfManifolds& net_prime,
                                            const ControlFamily& w_prime,
                                            std::size_t samples = kDefaultConjugacySamples,
                                            std::uint64_t seed = kDefaultSeed);

struct SemiconjugacyReport {
  std::size_t steps = 0;
  double max_deviation = 0.0;
  double time_of_max = 0.0;
};

/// Integrates x'(t) under J'(w') from x0' and y(t) under J(phi* w') from
/// P phi(x0'), and reports max_t |P phi(x'(t)) - y(t)|.
SemiconjugacyReport check_trajectory_semiconjugacy(const GraphMorphism& phi,
                                                   const FibrationWitness& witness,
                                                   const NetworkOfManifolds& net,
                                                   const NetworkOfManifolds& net_prime,
                                                   const ControlFamily& w_prime,
                                                   const TotalPoint& x0_prime,
                                                   const IntegratorConfig& cfg);

struct InvarianceReport {
  std::size_t steps = 0;
  double initial_deviation = 0.0;
  double max_deviation = 0.0;
  bool started_on_polydiagonal = false;
};

/// Integrates J(w) from x0 and reports the largest distance of the state from
/// Delta_q over time. Starting off Delta_q is allowed and simply reported.
InvarianceReport check_polydiagonal_invariance(const GraphMorphism& q,
                                               const NetworkOfManifolds& net,
                                               const ControlFamily& w, const TotalPoint& x0,
                                               const IntegratorConfig& cfg);

}  // namespace netdyn
