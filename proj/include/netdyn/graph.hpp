#pragma once

// Finite directed multigraphs, graph morphisms, fibrations and input trees.
//
// Nodes and edges are identified by strings. Parallel edges and loops are
// always allowed. Wherever an order over edges is needed (input slots,
// witnesses, error reporting) the lexicographic order of EdgeId is used.

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace netdyn {

using NodeId = std::string;
using EdgeId = std::string;

struct Edge {
  NodeId src;
  NodeId tgt;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// A problem found by one of the report-style validators. `subject` is the
/// id of the offending node or edge.
struct Violation {
  std::string subject;
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

using Violations = std::vector<Violation>;

/// G = (nodes, edges, src, tgt). Construction does not validate; use
/// validate_graph() to check that every endpoint names an existing node.
class DirectedMultigraph {
 public:
  DirectedMultigraph() = default;
  DirectedMultigraph(std::set<NodeId> nodes, std::map<EdgeId, Edge> edges);

  DirectedMultigraph& add_node(NodeId id);
  DirectedMultigraph& add_edge(EdgeId id, NodeId src, NodeId tgt);

  const std::set<NodeId>& nodes() const noexcept { return nodes_; }
  const std::map<EdgeId, Edge>& edges() const noexcept { return edges_; }

  bool has_node(const NodeId& a) const { return nodes_.count(a) != 0; }
  bool has_edge(const EdgeId& e) const { return edges_.count(e) != 0; }

  /// Throws UnknownNodeError (the edge variant) for ids outside the edge set.
  const NodeId& src(const EdgeId& e) const;
  const NodeId& tgt(const EdgeId& e) const;

  /// In-edges of `a`, sorted by EdgeId. Throws UnknownNodeError.
  std::vector<EdgeId> in_edges(const NodeId& a) const;

  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  friend bool operator==(const DirectedMultigraph&, const DirectedMultigraph&) = default;

 private:
  const Edge& edge(const EdgeId& e) const;

  std::set<NodeId> nodes_;
  std::map<EdgeId, Edge> edges_;
};

Violations validate_graph(const DirectedMultigraph& g);

/// A map of graphs phi: G -> G'. The maps are plain tables; validate_morphism()
/// checks totality and commutation with src/tgt.
struct GraphMorphism {
  DirectedMultigraph domain;
  DirectedMultigraph codomain;
  std::map<NodeId, NodeId> node_map;
  std::map<EdgeId, EdgeId> edge_map;

  const NodeId& node(const NodeId& a) const;
  const EdgeId& edge(const EdgeId& e) const;

  bool is_surjective_on_nodes() const;
  bool is_injective_on_nodes() const;

  friend bool operator==(const GraphMorphism&, const GraphMorphism&) = default;
};

GraphMorphism identity_morphism(const DirectedMultigraph& g);

/// Returns commutation violations (and endpoints outside the codomain).
/// Throws MissingMappingError if node_map or edge_map is not total on the
/// domain.
Violations validate_morphism(const GraphMorphism& phi);

/// psi after phi. Throws DomainMismatchError unless codomain(phi) == domain(psi).
GraphMorphism compose(const GraphMorphism& psi, const GraphMorphism& phi);

/// For every domain node a, the lift bijection from the in-edges of phi(a)
/// to the in-edges of a: lifts.at(a).at(e') is the unique e with tgt(e) = a
/// and phi(e) = e'.
struct FibrationWitness {
  std::map<NodeId, std::map<EdgeId, EdgeId>> lifts;

  const EdgeId& lift(const NodeId& a, const EdgeId& codomain_edge) const;

  friend bool operator==(const FibrationWitness&, const FibrationWitness&) = default;
};

/// First (a, e') pair, in lexicographic order, whose lift is not unique.
struct FibrationFailure {
  NodeId node;
  EdgeId codomain_edge;
  std::size_t lift_count = 0;

  friend bool operator==(const FibrationFailure&, const FibrationFailure&) = default;
};

class FibrationResult {
 public:
  explicit FibrationResult(FibrationWitness w) : witness_(std::move(w)) {}
  explicit FibrationResult(FibrationFailure f) : failure_(std::move(f)) {}

  explicit operator bool() const noexcept { return witness_.has_value(); }
  bool is_fibration() const noexcept { return witness_.has_value(); }

  /// Throws NotFibrationError when the check failed.
  const FibrationWitness& witness() const;
  const FibrationFailure& failure() const;

 private:
  std::optional<FibrationWitness> witness_;
  std::optional<FibrationFailure> failure_;
};

/// Throws InvalidMorphismError if phi fails validate_morphism().
FibrationResult is_fibration(const GraphMorphism& phi);

/// Checks that `w` is a lift family for `phi`. Returns violations.
Violations validate_witness(const GraphMorphism& phi, const FibrationWitness& w);

/// I(a): the root plus one leaf per in-edge. Parallel edges stay distinct.
struct InputTree {
  NodeId root;
  std::vector<EdgeId> leaves;      // canonical slot order
  std::vector<NodeId> attachment;  // attachment[i] = src(leaves[i])

  std::size_t size() const noexcept { return leaves.size(); }
};

InputTree input_tree(const DirectedMultigraph& g, const NodeId& a);

/// The bijection I(a) -> I(phi(a)) on leaves, gamma -> phi(gamma), keyed by
/// domain leaf. Throws NotFibrationError if the witness disagrees with phi or
/// the restriction is not bijective, UnknownNodeError for unknown a.
std::map<EdgeId, EdgeId> induced_input_map(const GraphMorphism& phi, const FibrationWitness& w,
                                           const NodeId& a);

}  // namespace netdyn
