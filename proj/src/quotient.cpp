#include "netdyn/quotient.hpp"

#include <algorithm>

#include "netdyn/errors.hpp"

namespace netdyn {

NodePartition::NodePartition(const std::set<NodeId>& nodes,
                             std::vector<std::vector<NodeId>> blocks) {
  for (auto& block : blocks) {
    if (block.empty()) throw InvalidPartitionError("partition has an empty block");
    std::sort(block.begin(), block.end());
  }
  std::sort(blocks.begin(), blocks.end(),
            [](const auto& x, const auto& y) { return x.front() < y.front(); });
  blocks_ = std::move(blocks);
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    for (const auto& a : blocks_[i]) {
      if (!nodes.count(a)) throw InvalidPartitionError("partition names unknown node '" + a + "'");
      if (!index_.emplace(a, i).second) {
        throw InvalidPartitionError("node '" + a + "' appears in more than one block");
      }
    }
  }
  if (index_.size() != nodes.size()) {
    for (const auto& a : nodes) {
      if (!index_.count(a)) throw InvalidPartitionError("node '" + a + "' is in no block");
    }
  }
}

NodePartition NodePartition::discrete(const std::set<NodeId>& nodes) {
  std::vector<std::vector<NodeId>> blocks;
  for (const auto& a : nodes) blocks.push_back({a});
  return NodePartition(nodes, std::move(blocks));
}

std::size_t NodePartition::block_of(const NodeId& a) const {
  auto it = index_.find(a);
  if (it == index_.end()) throw UnknownNodeError("node '" + a + "' is not partitioned");
  return it->second;
}

bool NodePartition::refines(const NodePartition& coarser) const {
  for (const auto& block : blocks_) {
    const auto target = coarser.block_of(block.front());
    for (const auto& a : block) {
      if (coarser.block_of(a) != target) return false;
    }
  }
  return true;
}

NodePartition coarsest_balanced_partition(const NetworkOfManifolds& net,
                                          const std::optional<NodePartition>& initial) {
  const auto& g = net.graph;
  const std::vector<NodeId> nodes(g.nodes().begin(), g.nodes().end());
  if (initial) {
    // Re-validates coverage against this graph.
    NodePartition(g.nodes(), initial->blocks());
  }

  std::map<NodeId, std::size_t> position;
  for (std::size_t i = 0; i < nodes.size(); ++i) position.emplace(nodes[i], i);

  std::vector<std::vector<std::size_t>> sources(nodes.size());
  for (const auto& [e, edge] : g.edges()) {
    sources[position.at(edge.tgt)].push_back(position.at(edge.src));
  }

  auto renumber = [](const auto& keys) {
    std::map<std::decay_t<decltype(keys.front())>, std::size_t> ids;
    for (const auto& k : keys) ids.emplace(k, 0);
    std::size_t next = 0;
    for (auto& [_, id] : ids) id = next++;
    std::vector<std::size_t> colors;
    colors.reserve(keys.size());
    for (const auto& k : keys) colors.push_back(ids.at(k));
    return std::pair{colors, ids.size()};
  };

  std::vector<std::pair<std::size_t, std::size_t>> seed_keys;
  for (const auto& a : nodes) {
    seed_keys.emplace_back(net.dim(a), initial ? initial->block_of(a) : 0);
  }
  auto [colors, count] = renumber(seed_keys);

  // Each round refines the previous one, so an unchanged color count means a
  // fixed point. At most |nodes| rounds.
  for (std::size_t round = 0; round < nodes.size(); ++round) {
    std::vector<std::pair<std::size_t, std::vector<std::size_t>>> keys;
    keys.reserve(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      std::vector<std::size_t> in_colors;
      for (auto s : sources[i]) in_colors.push_back(colors[s]);
      std::sort(in_colors.begin(), in_colors.end());
      keys.emplace_back(colors[i], std::move(in_colors));
    }
    auto [next, next_count] = renumber(keys);
    colors = std::move(next);
    if (next_count == count) break;
    count = next_count;
  }

  std::vector<std::vector<NodeId>> blocks(count);
  for (std::size_t i = 0; i < nodes.size(); ++i) blocks[colors[i]].push_back(nodes[i]);
  return NodePartition(g.nodes(), std::move(blocks));
}

namespace {

// In-edges of `a` grouped by the block of their source, each group sorted.
std::map<std::size_t, std::vector<EdgeId>> in_edges_by_source_block(const DirectedMultigraph& g,
                                                                   const NodePartition& p,
                                                                   const NodeId& a) {
  std::map<std::size_t, std::vector<EdgeId>> out;
  for (const auto& e : g.in_edges(a)) out[p.block_of(g.src(e))].push_back(e);
  return out;
}

bool same_shape(const std::map<std::size_t, std::vector<EdgeId>>& x,
                const std::map<std::size_t, std::vector<EdgeId>>& y) {
  if (x.size() != y.size()) return false;
  for (auto i = x.begin(), j = y.begin(); i != x.end(); ++i, ++j) {
    if (i->first != j->first || i->second.size() != j->second.size()) return false;
  }
  return true;
}

}  // namespace

QuotientOutcome quotient_network(const NetworkOfManifolds& net, const NodePartition& partition) {
  const auto& g = net.graph;
  NodePartition checked(g.nodes(), partition.blocks());

  for (const auto& block : checked.blocks()) {
    for (const auto& a : block) {
      if (net.dim(a) != net.dim(block.front())) {
        throw DimsNotConstantError("block of '" + block.front() + "' mixes dimensions (node '" +
                                   a + "')");
      }
    }
  }

  QuotientResult qr;
  qr.partition = checked;
  qr.projection.domain = g;

  DirectedMultigraph base;
  for (std::size_t b = 0; b < checked.size(); ++b) {
    const auto& rep = checked.representative(b);
    base.add_node(rep);
    qr.base.dims.emplace(rep, net.dim(rep));
  }

  for (std::size_t b = 0; b < checked.size(); ++b) {
    const auto& block = checked.blocks()[b];
    const auto& rep = block.front();
    const auto rep_groups = in_edges_by_source_block(g, checked, rep);
    for (const auto& e : g.in_edges(rep)) {
      base.add_edge(e, checked.representative(checked.block_of(g.src(e))), rep);
    }
    for (const auto& a : block) {
      const auto groups = in_edges_by_source_block(g, checked, a);
      if (!same_shape(groups, rep_groups)) return NotBalanced{rep, a};
      qr.projection.node_map.emplace(a, rep);
      auto& lifts = qr.witness.lifts[a];
      // Pair the sorted groups position by position: the smallest consistent
      // bijection.
      for (const auto& [src_block, edges] : groups) {
        const auto& rep_edges = rep_groups.at(src_block);
        for (std::size_t i = 0; i < edges.size(); ++i) {
          qr.projection.edge_map.emplace(edges[i], rep_edges[i]);
          lifts.emplace(rep_edges[i], edges[i]);
        }
      }
    }
  }

  qr.base.graph = base;
  qr.projection.codomain = std::move(base);
  return qr;
}

PushforwardOutcome pushforward_family(const QuotientResult& qr, const NetworkOfManifolds& net,
                                      const ControlFamily& w, std::size_t samples,
                                      std::uint64_t seed, double tol) {
  auto report =
      family_is_pullback_consistent(qr.projection, qr.witness, net, w, samples, seed, tol);
  if (!report.consistent) return InconsistentFamily{std::move(report)};

  ControlFamily base;
  for (std::size_t b = 0; b < qr.partition.size(); ++b) {
    const auto& rep = qr.partition.representative(b);
    const auto& ns = w.at(rep);
    NodeSystem pushed{ns.system, {}};
    for (const auto& e : ns.slot_edges) pushed.slot_edges.push_back(qr.projection.edge(e));
    base.emplace(rep, std::move(pushed));
  }
  return base;
}

}  // namespace netdyn
