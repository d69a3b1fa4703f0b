#include "netdyn/graph.hpp"

#include <algorithm>

#include "netdyn/errors.hpp"

namespace netdyn {

DirectedMultigraph::DirectedMultigraph(std::set<NodeId> nodes, std::map<EdgeId, Edge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {}

DirectedMultigraph& DirectedMultigraph::add_node(NodeId id) {
  nodes_.insert(std::move(id));
  return *this;
}

DirectedMultigraph& DirectedMultigraph::add_edge(EdgeId id, NodeId src, NodeId tgt) {
  edges_.insert_or_assign(std::move(id), Edge{std::move(src), std::move(tgt)});
  return *this;
}

const Edge& DirectedMultigraph::edge(const EdgeId& e) const {
  auto it = edges_.find(e);
  if (it == edges_.end()) throw UnknownNodeError("unknown edge '" + e + "'");
  return it->second;
}

const NodeId& DirectedMultigraph::src(const EdgeId& e) const { return edge(e).src; }

const NodeId& DirectedMultigraph::tgt(const EdgeId& e) const { return edge(e).tgt; }

std::vector<EdgeId> DirectedMultigraph::in_edges(const NodeId& a) const {
  if (!has_node(a)) throw UnknownNodeError("unknown node '" + a + "'");
  std::vector<EdgeId> out;
  // edges_ is ordered by id, so the result is already in slot order
  for (const auto& [id, e] : edges_) {
    if (e.tgt == a) out.push_back(id);
  }
  return out;
}

Violations validate_graph(const DirectedMultigraph& g) {
  Violations out;
  for (const auto& a : g.nodes()) {
    if (a.empty()) out.push_back({a, "node id is empty"});
  }
  for (const auto& [id, e] : g.edges()) {
    if (id.empty()) out.push_back({id, "edge id is empty"});
    if (!g.has_node(e.src)) out.push_back({id, "source '" + e.src + "' is not a node"});
    if (!g.has_node(e.tgt)) out.push_back({id, "target '" + e.tgt + "' is not a node"});
  }
  return out;
}

const NodeId& GraphMorphism::node(const NodeId& a) const {
  auto it = node_map.find(a);
  if (it == node_map.end()) throw MissingMappingError("node '" + a + "' has no image");
  return it->second;
}

const EdgeId& GraphMorphism::edge(const EdgeId& e) const {
  auto it = edge_map.find(e);
  if (it == edge_map.end()) throw MissingMappingError("edge '" + e + "' has no image");
  return it->second;
}

bool GraphMorphism::is_surjective_on_nodes() const {
  std::set<NodeId> image;
  for (const auto& [a, b] : node_map) image.insert(b);
  return std::includes(image.begin(), image.end(), codomain.nodes().begin(),
                       codomain.nodes().end());
}

bool GraphMorphism::is_injective_on_nodes() const {
  std::set<NodeId> image;
  for (const auto& [a, b] : node_map) {
    if (!image.insert(b).second) return false;
  }
  return true;
}

GraphMorphism identity_morphism(const DirectedMultigraph& g) {
  GraphMorphism id{g, g, {}, {}};
  for (const auto& a : g.nodes()) id.node_map.emplace(a, a);
  for (const auto& [e, _] : g.edges()) id.edge_map.emplace(e, e);
  return id;
}

Violations validate_morphism(const GraphMorphism& phi) {
  for (const auto& a : phi.domain.nodes()) phi.node(a);
  for (const auto& [e, _] : phi.domain.edges()) phi.edge(e);

  Violations out;
  for (const auto& [a, b] : phi.node_map) {
    if (!phi.domain.has_node(a)) out.push_back({a, "mapped node is not in the domain"});
    if (!phi.codomain.has_node(b)) out.push_back({a, "image '" + b + "' is not a codomain node"});
  }
  for (const auto& [e, f] : phi.edge_map) {
    if (!phi.domain.has_edge(e)) {
      out.push_back({e, "mapped edge is not in the domain"});
      continue;
    }
    if (!phi.codomain.has_edge(f)) {
      out.push_back({e, "image '" + f + "' is not a codomain edge"});
      continue;
    }
    const auto& d = phi.domain.edges().at(e);
    const auto& c = phi.codomain.edges().at(f);
    auto src_image = phi.node_map.find(d.src);
    auto tgt_image = phi.node_map.find(d.tgt);
    if (src_image == phi.node_map.end() || src_image->second != c.src) {
      out.push_back({e, "source does not commute: phi(src) != src(phi(" + e + ")) = '" + c.src +
                            "'"});
    }
    if (tgt_image == phi.node_map.end() || tgt_image->second != c.tgt) {
      out.push_back({e, "target does not commute: phi(tgt) != tgt(phi(" + e + ")) = '" + c.tgt +
                            "'"});
    }
  }
  return out;
}

GraphMorphism compose(const GraphMorphism& psi, const GraphMorphism& phi) {
  if (!(phi.codomain == psi.domain)) {
    throw DomainMismatchError("compose: codomain of the first map is not the domain of the second");
  }
  GraphMorphism out{phi.domain, psi.codomain, {}, {}};
  for (const auto& [a, b] : phi.node_map) out.node_map.emplace(a, psi.node(b));
  for (const auto& [e, f] : phi.edge_map) out.edge_map.emplace(e, psi.edge(f));
  return out;
}

const EdgeId& FibrationWitness::lift(const NodeId& a, const EdgeId& codomain_edge) const {
  auto node = lifts.find(a);
  if (node == lifts.end()) throw UnknownNodeError("witness has no entry for node '" + a + "'");
  auto it = node->second.find(codomain_edge);
  if (it == node->second.end()) {
    throw NotFibrationError("witness has no lift of '" + codomain_edge + "' at node '" + a + "'");
  }
  return it->second;
}

const FibrationWitness& FibrationResult::witness() const {
  if (!witness_) {
    throw NotFibrationError("not a fibration: edge '" + failure_->codomain_edge + "' has " +
                            std::to_string(failure_->lift_count) + " lifts at node '" +
                            failure_->node + "'");
  }
  return *witness_;
}

const FibrationFailure& FibrationResult::failure() const {
  if (!failure_) throw Error("fibration check succeeded; there is no failure");
  return *failure_;
}

FibrationResult is_fibration(const GraphMorphism& phi) {
  auto violations = validate_morphism(phi);
  if (!violations.empty()) {
    throw InvalidMorphismError("invalid morphism at '" + violations.front().subject +
                               "': " + violations.front().message);
  }

  // Bucket domain edges by (target, image edge).
  std::map<NodeId, std::map<EdgeId, std::vector<EdgeId>>> candidates;
  for (const auto& [e, edge] : phi.domain.edges()) {
    candidates[edge.tgt][phi.edge(e)].push_back(e);
  }

  FibrationWitness w;
  for (const auto& a : phi.domain.nodes()) {
    auto& lifts = w.lifts[a];
    const auto& by_image = candidates[a];
    for (const auto& image_edge : phi.codomain.in_edges(phi.node(a))) {
      auto it = by_image.find(image_edge);
      std::size_t count = it == by_image.end() ? 0 : it->second.size();
      if (count != 1) return FibrationResult(FibrationFailure{a, image_edge, count});
      lifts.emplace(image_edge, it->second.front());
    }
  }
  return FibrationResult(std::move(w));
}

Violations validate_witness(const GraphMorphism& phi, const FibrationWitness& w) {
  Violations out;
  for (const auto& a : phi.domain.nodes()) {
    auto entry = w.lifts.find(a);
    if (entry == w.lifts.end()) {
      out.push_back({a, "no lift table"});
      continue;
    }
    const auto image_in = phi.codomain.in_edges(phi.node(a));
    const auto own_in = phi.domain.in_edges(a);
    if (entry->second.size() != image_in.size()) {
      out.push_back({a, "lift table size differs from the in-degree of the image"});
    }
    std::set<EdgeId> used;
    for (const auto& e_prime : image_in) {
      auto it = entry->second.find(e_prime);
      if (it == entry->second.end()) {
        out.push_back({a, "no lift of '" + e_prime + "'"});
        continue;
      }
      const auto& e = it->second;
      if (!phi.domain.has_edge(e) || phi.domain.tgt(e) != a) {
        out.push_back({a, "lift '" + e + "' does not end at the node"});
      } else if (phi.edge(e) != e_prime) {
        out.push_back({a, "lift '" + e + "' does not map to '" + e_prime + "'"});
      }
      used.insert(e);
    }
    if (used.size() != own_in.size()) {
      out.push_back({a, "lifts are not a bijection onto the in-edges"});
    }
  }
  return out;
}

InputTree input_tree(const DirectedMultigraph& g, const NodeId& a) {
  InputTree tree{a, g.in_edges(a), {}};
  tree.attachment.reserve(tree.leaves.size());
  for (const auto& e : tree.leaves) tree.attachment.push_back(g.src(e));
  return tree;
}

std::map<EdgeId, EdgeId> induced_input_map(const GraphMorphism& phi, const FibrationWitness& w,
                                           const NodeId& a) {
  const auto leaves = input_tree(phi.domain, a).leaves;
  const auto image_leaves = input_tree(phi.codomain, phi.node(a)).leaves;
  if (leaves.size() != image_leaves.size()) {
    throw NotFibrationError("input trees of '" + a + "' and its image differ in size");
  }
  std::map<EdgeId, EdgeId> out;
  std::set<EdgeId> hit;
  for (const auto& leaf : leaves) {
    const auto& image = phi.edge(leaf);
    if (!hit.insert(image).second) {
      throw NotFibrationError("two leaves of I(" + a + ") map to '" + image + "'");
    }
    if (w.lift(a, image) != leaf) {
      throw NotFibrationError("witness disagrees with the morphism at leaf '" + leaf + "'");
    }
    out.emplace(leaf, image);
  }
  return out;
}

}  // namespace netdyn
