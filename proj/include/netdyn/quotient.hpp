#pragma once

// Minimal fibration bases: the coarsest balanced partition of a network, the
// quotient network it induces, and pushforward of control families that are
// constant along the fibers.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <variant>
#include <vector>

#include "netdyn/graph.hpp"
#include "netdyn/network.hpp"
#include "netdyn/open_system.hpp"

namespace netdyn {

/// Blocks are kept sorted: members ascending, blocks by smallest member.
class NodePartition {
 public:
  NodePartition() = default;

  /// Throws InvalidPartitionError for empty, overlapping or non-covering blocks.
  NodePartition(const std::set<NodeId>& nodes, std::vector<std::vector<NodeId>> blocks);

  static NodePartition discrete(const std::set<NodeId>& nodes);

  const std::vector<std::vector<NodeId>>& blocks() const noexcept { return blocks_; }
  std::size_t block_of(const NodeId& a) const;
  const NodeId& representative(std::size_t block) const { return blocks_.at(block).front(); }
  std::size_t size() const noexcept { return blocks_.size(); }

  /// True if every block of *this lies inside a block of `coarser`.
  bool refines(const NodePartition& coarser) const;

  friend bool operator==(const NodePartition& a, const NodePartition& b) {
    return a.blocks_ == b.blocks_;
  }

 private:
  std::vector<std::vector<NodeId>> blocks_;
  std::map<NodeId, std::size_t> index_;
};

/// Coarsest partition refining both equal-dimension classes and `initial`
/// whose quotient map is a fibration. Iteratively recolors each node by its
/// color and the multiset of colors of its in-edge sources.
NodePartition coarsest_balanced_partition(const NetworkOfManifolds& net,
                                          const std::optional<NodePartition>& initial = {});

struct QuotientResult {
  NetworkOfManifolds base;
  GraphMorphism projection;
  FibrationWitness witness;
  NodePartition partition;
};

/// Two nodes of one block whose in-edge source multisets differ.
struct NotBalanced {
  NodeId representative;
  NodeId node;
};

using QuotientOutcome = std::variant<QuotientResult, NotBalanced>;

/// Base nodes are the block representatives; base edges are the in-edges of
/// each representative with sources sent to their blocks. Throws
/// DimsNotConstantError if a block mixes dimensions.
QuotientOutcome quotient_network(const NetworkOfManifolds& net, const NodePartition& partition);

struct InconsistentFamily {
  ConsistencyReport report;
};

using PushforwardOutcome = std::variant<ControlFamily, InconsistentFamily>;

/// Family on the base whose pullback along the projection reproduces w.
/// Checked numerically with family_is_pullback_consistent.
PushforwardOutcome pushforward_family(const QuotientResult& qr, const NetworkOfManifolds& net,
                                      const ControlFamily& w,
                                      std::size_t samples = kDefaultConsistencySamples,
                                      std::uint64_t seed = kDefaultSeed,
                                      double tol = kDefaultConsistencyTol);

}  // namespace netdyn
