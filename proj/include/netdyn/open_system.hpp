#pragma once

// Open systems F: M x U -> TM attached to nodes, families of them over a
// network, the interconnection map that wires a family into one vector field
// on the total phase space, and the pullback of families along fibrations.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "netdyn/expr.hpp"
#include "netdyn/graph.hpp"
#include "netdyn/network.hpp"
#include "netdyn/random.hpp"

namespace netdyn {

/// One output expression per coordinate of the node's own state.
struct OpenSystem {
  SystemSignature signature;
  std::vector<ExprPtr> body;
  // Source text of each body line; empty once the body has been rewritten.
  std::vector<std::string> source_text;

  /// Parses each body line. Throws SyntaxError.
  static OpenSystem from_text(SystemSignature sig, const std::vector<std::string>& lines);

  Violations validate() const;
  Vector evaluate(std::span<const double> self, std::span<const Vector> inputs) const;
  void evaluate_into(std::span<const double> self, std::span<const Vector> inputs,
                     std::span<double> out) const;
};

/// The system at one node plus its slot binding: slot s of the body reads the
/// source of slot_edges[s]. A freshly loaded family binds slots in canonical
/// order; pullbacks reuse bodies and only rewrite this table.
struct NodeSystem {
  OpenSystem system;
  std::vector<EdgeId> slot_edges;
};

using ControlFamily = std::map<NodeId, NodeSystem>;

/// Family whose slots follow the canonical in-edge order of each node.
ControlFamily canonical_family(const NetworkOfManifolds& net, std::map<NodeId, OpenSystem> systems);

/// Signature the input tree of `a` induces: (dims(a); dims of each slot source
/// in the order of `slot_edges`).
SystemSignature induced_signature(const NetworkOfManifolds& net, const NodeId& a,
                                  std::span<const EdgeId> slot_edges,
                                  ParameterValues params = {});

/// Every violation of the family against the network's input trees.
Violations validate_family(const NetworkOfManifolds& net, const ControlFamily& w);

/// Vector field obtained by feeding every input slot the current state of the
/// slot's source node.
class InterconnectedField {
 public:
  InterconnectedField(NetworkOfManifolds net, ControlFamily family);

  TangentTotalPoint operator()(const TotalPoint& x) const;

  /// out must already be shaped like x.
  void evaluate_into(const TotalPoint& x, TangentTotalPoint& out) const;

  /// Component at one node.
  Vector component(const TotalPoint& x, const NodeId& a) const;

  const NetworkOfManifolds& network() const noexcept { return net_; }
  const ControlFamily& family() const noexcept { return family_; }

 private:
  NetworkOfManifolds net_;
  ControlFamily family_;
  std::vector<std::vector<NodeId>> sources_;  // per node in family order, per slot
};

/// Throws SignatureMismatchError naming the node and slot.
InterconnectedField interconnect(const NetworkOfManifolds& net, const ControlFamily& w);

/// phi* w'. Each domain node a gets the system of phi(a) unchanged, with slot
/// s bound to the lift beta_a of the codomain edge bound to slot s at phi(a).
/// Throws NotFibrationError if the witness does not fit phi and
/// SignatureMismatchError if dims disagree or w' does not fit its network.
ControlFamily pullback_family(const GraphMorphism& phi, const FibrationWitness& witness,
                              const NetworkOfManifolds& dom, const NetworkOfManifolds& cod,
                              const ControlFamily& w_prime);

/// Multiplies every body expression by `factor` (a literal).
ControlFamily scale_family(const ControlFamily& w, double factor);

inline constexpr std::size_t kDefaultConsistencySamples = 64;
inline constexpr double kDefaultConsistencyTol = 1e-9;

struct ConsistencyReport {
  bool consistent = true;
  std::optional<std::pair<NodeId, NodeId>> offending_pair;
  std::optional<std::size_t> offending_sample;
  double max_deviation = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
};

/// Does w agree with q*(w') for some w' on the base? For every pair a, b with
/// q(a) = q(b), both systems are evaluated on the same self state and on the
/// same value per base in-edge (routed through beta_a and beta_b).
ConsistencyReport family_is_pullback_consistent(
    const GraphMorphism& q, const FibrationWitness& witness, const NetworkOfManifolds& net,
    const ControlFamily& w, std::size_t samples = kDefaultConsistencySamples,
    std::uint64_t seed = kDefaultSeed, double tol = kDefaultConsistencyTol);

/// Bodies rewritten so that slot s reads the s-th canonical in-edge. Used when
/// writing families to files.
ControlFamily canonicalize_slots(const NetworkOfManifolds& net, const ControlFamily& w);

}  // namespace netdyn
