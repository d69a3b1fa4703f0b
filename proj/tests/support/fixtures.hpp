#pragma once

// Small graphs whose fibrations and fields can be checked by hand, and the
// ten-node driving network. Edge ids spell out the edge so slot orders are
// readable.

#include <string>

#include "netdyn/graph.hpp"
#include "netdyn/network.hpp"
#include "netdyn/open_system.hpp"

namespace netdyn::testing {

// a ⇉ b with edges alpha, beta
inline DirectedMultigraph two_parallel() {
  DirectedMultigraph g;
  g.add_node("a").add_node("b");
  g.add_edge("alpha", "a", "b").add_edge("beta", "a", "b");
  return g;
}

// a ⇉ b → c
inline DirectedMultigraph two_parallel_then_c() {
  auto g = two_parallel();
  g.add_node("c").add_edge("eta", "b", "c");
  return g;
}

// a1 -gamma-> b <-delta- a2
inline DirectedMultigraph fan_in() {
  DirectedMultigraph g;
  g.add_node("a1").add_node("a2").add_node("b");
  g.add_edge("gamma", "a1", "b").add_edge("delta", "a2", "b");
  return g;
}

// a ⇉ b (gamma', delta')
inline DirectedMultigraph primed_pair() {
  DirectedMultigraph g;
  g.add_node("a").add_node("b");
  g.add_edge("gamma'", "a", "b").add_edge("delta'", "a", "b");
  return g;
}

// a ⇉ b → c (gamma', delta', eps')
inline DirectedMultigraph primed_chain() {
  auto g = primed_pair();
  g.add_node("c").add_edge("eps'", "b", "c");
  return g;
}

// fan_in -> primed_chain: a1, a2 -> a; gamma -> gamma', delta -> delta'
inline GraphMorphism fan_in_fibration() {
  return {fan_in(), primed_chain(), {{"a1", "a"}, {"a2", "a"}, {"b", "b"}},
          {{"gamma", "gamma'"}, {"delta", "delta'"}}};
}

// Surjective factor: fan_in -> primed_pair.
inline GraphMorphism fan_in_surjection() {
  return {fan_in(), primed_pair(), {{"a1", "a"}, {"a2", "a"}, {"b", "b"}},
          {{"gamma", "gamma'"}, {"delta", "delta'"}}};
}

// Injective factor: primed_pair -> primed_chain.
inline GraphMorphism primed_inclusion() {
  return {primed_pair(), primed_chain(), {{"a", "a"}, {"b", "b"}},
          {{"gamma'", "gamma'"}, {"delta'", "delta'"}}};
}

// Both parallel edges of a ⇉ b sent to the single edge of a → b.
inline GraphMorphism parallel_collapse() {
  DirectedMultigraph single;
  single.add_node("a").add_node("b").add_edge("e", "a", "b");
  return {two_parallel(), single, {{"a", "a"}, {"b", "b"}}, {{"alpha", "e"}, {"beta", "e"}}};
}

// 1 ⇄ 2 → 3
inline DirectedMultigraph driver3() {
  DirectedMultigraph g;
  g.add_node("1").add_node("2").add_node("3");
  g.add_edge("e1_2", "1", "2").add_edge("e2_1", "2", "1").add_edge("e2_3", "2", "3");
  return g;
}

// driver3 plus the driven nodes 4..10 (no feedback into 1, 2, 3).
inline DirectedMultigraph driven10() {
  auto g = driver3();
  for (const char* n : {"4", "5", "6", "7", "8", "9", "10"}) g.add_node(n);
  g.add_edge("e1_10", "1", "10").add_edge("e1_4", "1", "4").add_edge("e1_7", "1", "7");
  g.add_edge("e2_5", "2", "5").add_edge("e2_8", "2", "8");
  g.add_edge("e3_6", "3", "6").add_edge("e3_9", "3", "9");
  return g;
}

inline GraphMorphism driver_inclusion() {
  auto small = driver3();
  GraphMorphism phi{small, driven10(), {}, {}};
  for (const auto& a : small.nodes()) phi.node_map.emplace(a, a);
  for (const auto& [e, _] : small.edges()) phi.edge_map.emplace(e, e);
  return phi;
}

inline NetworkOfManifolds uniform_network(DirectedMultigraph g, std::size_t dim) {
  NetworkOfManifolds net{std::move(g), {}};
  for (const auto& a : net.graph.nodes()) net.dims.emplace(a, dim);
  return net;
}

// Family from text, slots in canonical order. Signatures are induced.
inline ControlFamily family_from_text(const NetworkOfManifolds& net,
                                      const std::map<NodeId, std::vector<std::string>>& bodies,
                                      const std::map<NodeId, ParameterValues>& params = {}) {
  std::map<NodeId, OpenSystem> systems;
  for (const auto& [a, lines] : bodies) {
    const auto slots = net.graph.in_edges(a);
    auto p = params.count(a) ? params.at(a) : ParameterValues{};
    systems.emplace(a, OpenSystem::from_text(induced_signature(net, a, slots, p), lines));
  }
  return canonical_family(net, std::move(systems));
}

}  // namespace netdyn::testing
