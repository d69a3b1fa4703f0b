#include <gtest/gtest.h>

#include <cmath>

#include "netdyn/errors.hpp"
#include "netdyn/open_system.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace netdyn;
using namespace netdyn::testing;

namespace {

// Hand-written bodies for the parallel-pair graph.
double w_a(double x) { return -x + std::sin(x); }
double w_b(double x1, double x2, double y) { return x1 - 2.0 * x2 * y + std::tanh(y); }

const std::map<NodeId, std::vector<std::string>> kParallelBodies{
    {"a", {"-x[0] + sin(x[0])"}},
    {"b", {"u[0][0] - 2*u[1][0]*x[0] + tanh(x[0])"}},
};

}  // namespace

TEST(OpenSystem, FromTextKeepsSource) {
  auto sys = OpenSystem::from_text(SystemSignature{1, {1}, {}}, {"u[0][0] - x[0]"});
  EXPECT_EQ(sys.source_text, std::vector<std::string>{"u[0][0] - x[0]"});
  EXPECT_TRUE(sys.validate().empty());
  EXPECT_EQ(sys.evaluate(Vector{1.0}, std::vector<Vector>{{3.0}}), Vector{2.0});
}

TEST(OpenSystem, FromTextPropagatesSyntaxErrors) {
  EXPECT_THROW(OpenSystem::from_text(SystemSignature{1, {}, {}}, {"x[0] +"}), SyntaxError);
}

TEST(OpenSystem, EvaluateRejectsWrongShapes) {
  auto sys = OpenSystem::from_text(SystemSignature{1, {2}, {}}, {"u[0][1]"});
  EXPECT_THROW(sys.evaluate(Vector{1.0}, std::vector<Vector>{}), ShapeMismatchError);
  EXPECT_THROW(sys.evaluate(Vector{1.0}, std::vector<Vector>{{1.0}}), ShapeMismatchError);
  EXPECT_THROW(sys.evaluate(Vector{1.0, 2.0}, std::vector<Vector>{{1.0, 2.0}}), ShapeMismatchError);
}

TEST(InducedSignature, ParallelPair) {
  NetworkOfManifolds net{two_parallel(), {{"a", 2}, {"b", 3}}};
  auto slots = net.graph.in_edges("b");
  auto sig = induced_signature(net, "b", slots);
  EXPECT_EQ(sig.self_dim, 3u);
  EXPECT_EQ(sig.input_dims, (std::vector<std::size_t>{2, 2}));
  EXPECT_EQ(induced_signature(net, "a", {}).slot_count(), 0u);
}

TEST(ValidateFamily, ReportsEachKindOfMismatch) {
  auto net = uniform_network(two_parallel(), 1);
  auto w = family_from_text(net, kParallelBodies);
  EXPECT_TRUE(validate_family(net, w).empty());

  auto missing = w;
  missing.erase("a");
  EXPECT_EQ(validate_family(net, missing).front().subject, "a");

  auto wrong_slots = w;
  wrong_slots.at("b").slot_edges = {"alpha"};
  EXPECT_FALSE(validate_family(net, wrong_slots).empty());

  auto wrong_dim = w;
  wrong_dim.at("b").system.signature.input_dims = {1, 2};
  EXPECT_FALSE(validate_family(net, wrong_dim).empty());

  auto bad_index = w;
  bad_index.at("a").system.body = {parse("x[3]")};
  EXPECT_FALSE(validate_family(net, bad_index).empty());

  auto extra = w;
  extra.emplace("zz", w.at("a"));
  EXPECT_EQ(validate_family(net, extra).back().subject, "zz");
}

TEST(Interconnect, SignatureMismatchThrows) {
  auto net = uniform_network(two_parallel(), 1);
  auto w = family_from_text(net, kParallelBodies);
  w.at("b").system.signature.input_dims = {1};
  EXPECT_THROW(interconnect(net, w), SignatureMismatchError);
}

TEST(Interconnect, ParallelPairMatchesHandComposition) {
  auto net = uniform_network(two_parallel(), 1);
  auto field = interconnect(net, family_from_text(net, kParallelBodies));
  SplitMix64 rng(1);
  for (int i = 0; i < 100; ++i) {
    auto p = random_point(net, rng);
    const double x = p["a"][0], y = p["b"][0];
    auto v = field(p);
    EXPECT_EQ(v["a"][0], w_a(x));
    EXPECT_EQ(v["b"][0], w_b(x, x, y));
  }
}

TEST(Interconnect, ThreeNodeChainMatchesHandComposition) {
  auto net = uniform_network(two_parallel_then_c(), 1);
  auto bodies = kParallelBodies;
  bodies["c"] = {"u[0][0]*x[0]"};
  auto field = interconnect(net, family_from_text(net, bodies));
  SplitMix64 rng(2);
  for (int i = 0; i < 100; ++i) {
    auto p = random_point(net, rng);
    const double x = p["a"][0], y = p["b"][0], z = p["c"][0];
    auto v = field(p);
    EXPECT_EQ(v["a"][0], w_a(x));
    EXPECT_EQ(v["b"][0], w_b(x, x, y));
    EXPECT_EQ(v["c"][0], y * z);
  }
}

TEST(Interconnect, SelfLoopFeedsOwnState) {
  DirectedMultigraph g;
  g.add_node("a").add_edge("loop", "a", "a");
  auto net = uniform_network(g, 1);
  auto field = interconnect(net, family_from_text(net, {{"a", {"u[0][0] - x[0]^2"}}}));
  auto v = field(TotalPoint({{"a", {3.0}}}));
  EXPECT_EQ(v["a"][0], 3.0 - 9.0);
}

TEST(Interconnect, MatchesNaiveOracleOnRandomNetworks) {
  SplitMix64 rng(3);
  for (int i = 0; i < 100; ++i) {
    auto net = random_dims(rng, random_graph(rng, 6, 10), 3);
    auto w = random_family(rng, net);
    auto field = interconnect(net, w);
    for (int k = 0; k < 10; ++k) {
      auto p = random_point(net, rng);
      EXPECT_EQ(field(p), naive_interconnect(net, w, p));
    }
  }
}

TEST(Interconnect, ComponentAgreesWithFullField) {
  auto net = uniform_network(two_parallel_then_c(), 1);
  auto bodies = kParallelBodies;
  bodies["c"] = {"u[0][0]"};
  auto field = interconnect(net, family_from_text(net, bodies));
  SplitMix64 rng(4);
  auto p = random_point(net, rng);
  auto v = field(p);
  for (const auto& a : net.graph.nodes()) EXPECT_EQ(field.component(p, a), v[a]);
  EXPECT_THROW(field.component(p, "zz"), UnknownNodeError);
}

TEST(Interconnect, WrongPointShapeThrows) {
  auto net = uniform_network(two_parallel(), 1);
  auto field = interconnect(net, family_from_text(net, kParallelBodies));
  EXPECT_THROW(field(TotalPoint({{"a", {1.0}}})), ShapeMismatchError);
}

TEST(PullbackFamily, FanInCopiesBaseSystems) {
  auto phi = fan_in_fibration();
  auto witness = is_fibration(phi).witness();
  auto dom = uniform_network(fan_in(), 1);
  auto cod = uniform_network(primed_chain(), 1);
  auto w_prime = family_from_text(cod, {{"a", {"-x[0]"}},
                                        {"b", {"u[0][0] - 3*u[1][0] + x[0]"}},
                                        {"c", {"u[0][0]"}}});
  auto w = pullback_family(phi, witness, dom, cod, w_prime);
  ASSERT_EQ(w.size(), 3u);
  EXPECT_EQ(w.at("a1").system.body, w_prime.at("a").system.body);
  EXPECT_EQ(w.at("a2").system.body, w_prime.at("a").system.body);
  EXPECT_EQ(w.at("b").system.body, w_prime.at("b").system.body);
  // b' binds slot 0 to delta', slot 1 to gamma' (canonical order); lifted.
  EXPECT_EQ(w.at("b").slot_edges, (std::vector<EdgeId>{"delta", "gamma"}));
  EXPECT_TRUE(validate_family(dom, w).empty());

  SplitMix64 rng(5);
  auto field = interconnect(dom, w);
  for (int i = 0; i < 50; ++i) {
    auto x = random_point(dom, rng);
    auto v = field(x);
    EXPECT_EQ(v["a1"][0], -x["a1"][0]);
    EXPECT_EQ(v["a2"][0], -x["a2"][0]);
    EXPECT_EQ(v["b"][0], x["a2"][0] - 3 * x["a1"][0] + x["b"][0]);
  }
}

TEST(PullbackFamily, EvaluatesBaseOnLiftedArguments) {
  SplitMix64 rng(6);
  for (int i = 0; i < 100; ++i) {
    auto f = random_fibration(rng, {});
    auto w_prime = random_family(rng, f.cod);
    auto witness = is_fibration(f.phi).witness();
    auto w = pullback_family(f.phi, witness, f.dom, f.cod, w_prime);
    ASSERT_TRUE(validate_family(f.dom, w).empty());
    for (int k = 0; k < 50; ++k) {
      auto x = random_point(f.dom, rng);
      for (const auto& a : f.dom.graph.nodes()) {
        const auto& base = w_prime.at(f.phi.node(a));
        std::vector<Vector> permuted;
        for (const auto& e_prime : base.slot_edges) {
          permuted.push_back(x[f.dom.graph.src(witness.lift(a, e_prime))]);
        }
        std::vector<Vector> routed;
        for (const auto& e : w.at(a).slot_edges) routed.push_back(x[f.dom.graph.src(e)]);
        EXPECT_EQ(w.at(a).system.evaluate(x[a], routed), base.system.evaluate(x[a], permuted));
      }
    }
  }
}

TEST(PullbackFamily, CanonicalizedPullbackMatchesNaiveOracle) {
  SplitMix64 rng(7);
  for (int i = 0; i < 50; ++i) {
    auto f = random_fibration(rng, {});
    auto w_prime = random_family(rng, f.cod);
    auto w = pullback_family(f.phi, is_fibration(f.phi).witness(), f.dom, f.cod, w_prime);
    auto canon = canonicalize_slots(f.dom, w);
    EXPECT_TRUE(validate_family(f.dom, canon).empty());
    auto field = interconnect(f.dom, w);
    for (int k = 0; k < 10; ++k) {
      auto x = random_point(f.dom, rng);
      EXPECT_EQ(field(x), naive_interconnect(f.dom, canon, x));
    }
  }
}

TEST(PullbackFamily, RejectsBadInputs) {
  auto phi = fan_in_fibration();
  auto witness = is_fibration(phi).witness();
  auto dom = uniform_network(fan_in(), 1);
  auto cod = uniform_network(primed_chain(), 1);
  auto w_prime = family_from_text(cod, {{"a", {"x[0]"}}, {"b", {"u[0][0]"}}, {"c", {"u[0][0]"}}});

  NetworkOfManifolds dom2{fan_in(), {{"a1", 2}, {"a2", 1}, {"b", 1}}};
  EXPECT_THROW(pullback_family(phi, witness, dom2, cod, w_prime), SignatureMismatchError);

  auto bad_witness = witness;
  bad_witness.lifts.at("b").at("gamma'") = "delta";
  EXPECT_THROW(pullback_family(phi, bad_witness, dom, cod, w_prime), NotFibrationError);

  auto partial = w_prime;
  partial.erase("c");
  EXPECT_THROW(pullback_family(phi, witness, dom, cod, partial), SignatureMismatchError);
}

TEST(PullbackFamily, IdentityPullbackIsTheSameFamily) {
  SplitMix64 rng(8);
  auto net = random_dims(rng, random_graph(rng, 5, 8), 2);
  auto w = random_family(rng, net);
  auto id = identity_morphism(net.graph);
  auto pulled = pullback_family(id, is_fibration(id).witness(), net, net, w);
  for (const auto& [a, ns] : w) {
    EXPECT_EQ(pulled.at(a).slot_edges, ns.slot_edges);
    EXPECT_EQ(pulled.at(a).system.body, ns.system.body);
  }
}

TEST(PullbackFamily, CompositionLaw) {
  // (psi o phi)* w = phi*(psi* w) as fields, on the factorization example.
  auto chain = uniform_network(primed_chain(), 1);
  auto pair = uniform_network(primed_pair(), 1);
  auto fan = uniform_network(fan_in(), 1);
  auto w = family_from_text(chain, {{"a", {"sin(x[0])"}},
                                    {"b", {"u[0][0]*x[0] - u[1][0]"}},
                                    {"c", {"u[0][0]^2"}}});
  auto psi = primed_inclusion();
  auto phi = fan_in_surjection();
  auto direct = pullback_family(compose(psi, phi), is_fibration(compose(psi, phi)).witness(), fan,
                                chain, w);
  auto via = pullback_family(phi, is_fibration(phi).witness(), fan, pair,
                             pullback_family(psi, is_fibration(psi).witness(), pair, chain, w));
  EXPECT_EQ(direct.at("b").slot_edges, via.at("b").slot_edges);
  SplitMix64 rng(9);
  auto f1 = interconnect(fan, direct);
  auto f2 = interconnect(fan, via);
  for (int i = 0; i < 50; ++i) {
    auto x = random_point(fan, rng);
    EXPECT_EQ(f1(x), f2(x));
  }
}

TEST(ScaleFamily, MultipliesTheField) {
  auto net = uniform_network(two_parallel(), 1);
  auto w = family_from_text(net, kParallelBodies);
  auto scaled = scale_family(w, 2.0);
  EXPECT_TRUE(scaled.at("a").system.source_text.empty());
  auto f = interconnect(net, w);
  auto g = interconnect(net, scaled);
  SplitMix64 rng(10);
  auto x = random_point(net, rng);
  EXPECT_EQ(g(x)["b"][0], 2.0 * f(x)["b"][0]);
}

TEST(Consistency, PulledBackFamilyIsConsistent) {
  auto q = fan_in_surjection();
  auto witness = is_fibration(q).witness();
  auto fan = uniform_network(fan_in(), 1);
  auto pair = uniform_network(primed_pair(), 1);
  auto base = family_from_text(pair, {{"a", {"-x[0]^3"}}, {"b", {"u[0][0] - u[1][0]*x[0]"}}});
  auto w = pullback_family(q, witness, fan, pair, base);
  auto r = family_is_pullback_consistent(q, witness, fan, w);
  EXPECT_TRUE(r.consistent);
  EXPECT_EQ(r.max_deviation, 0.0);
  EXPECT_EQ(r.samples, kDefaultConsistencySamples);
}

TEST(Consistency, DifferentSystemsInOneFiberAreCaught) {
  auto q = fan_in_surjection();
  auto witness = is_fibration(q).witness();
  auto fan = uniform_network(fan_in(), 1);
  auto w = family_from_text(fan, {{"a1", {"-x[0]"}}, {"a2", {"-2*x[0]"}}, {"b", {"u[0][0]"}}});
  auto r = family_is_pullback_consistent(q, witness, fan, w);
  EXPECT_FALSE(r.consistent);
  ASSERT_TRUE(r.offending_pair.has_value());
  EXPECT_EQ(*r.offending_pair, (std::pair<NodeId, NodeId>{"a1", "a2"}));
  EXPECT_EQ(r.offending_sample, 0u);
  EXPECT_GT(r.max_deviation, 0.0);
}

TEST(Consistency, SlotBindingIsRespected) {
  // Two nodes with the same text but where the slot order differs through the
  // witness: consistency must route arguments by base edge.
  SplitMix64 rng(11);
  for (int i = 0; i < 50; ++i) {
    auto f = random_fibration(rng, {3, 5, 3, 2, true});
    auto base = random_family(rng, f.cod);
    auto witness = is_fibration(f.phi).witness();
    auto w = pullback_family(f.phi, witness, f.dom, f.cod, base);
    auto canon = canonicalize_slots(f.dom, w);
    EXPECT_TRUE(family_is_pullback_consistent(f.phi, witness, f.dom, canon, 8).consistent);
  }
}

TEST(Consistency, NonSurjectiveThrows) {
  auto phi = fan_in_fibration();
  auto fan = uniform_network(fan_in(), 1);
  auto w = family_from_text(fan, {{"a1", {"x[0]"}}, {"a2", {"x[0]"}}, {"b", {"x[0]"}}});
  EXPECT_THROW(family_is_pullback_consistent(phi, is_fibration(phi).witness(), fan, w),
               NotSurjectiveError);
}

TEST(CanonicalizeSlots, PreservesTheField) {
  SplitMix64 rng(12);
  for (int i = 0; i < 50; ++i) {
    auto f = random_fibration(rng, {});
    auto w = pullback_family(f.phi, is_fibration(f.phi).witness(), f.dom, f.cod,
                             random_family(rng, f.cod));
    auto canon = canonicalize_slots(f.dom, w);
    for (const auto& a : f.dom.graph.nodes()) {
      EXPECT_EQ(canon.at(a).slot_edges, f.dom.graph.in_edges(a));
    }
    auto f1 = interconnect(f.dom, w);
    auto f2 = interconnect(f.dom, canon);
    auto x = random_point(f.dom, rng);
    EXPECT_EQ(f1(x), f2(x));
  }
}
