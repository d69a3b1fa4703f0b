#include "netdyn/open_system.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "netdyn/errors.hpp"

namespace netdyn {

namespace {

// NaN on both sides counts as agreement, NaN on one side as a mismatch.
double coordinate_deviation(double u, double v) {
  if (std::isnan(u) || std::isnan(v)) {
    return std::isnan(u) && std::isnan(v) ? 0.0 : std::numeric_limits<double>::infinity();
  }
  if (u == v) return 0.0;
  return std::abs(u - v);
}

}  // namespace

OpenSystem OpenSystem::from_text(SystemSignature sig, const std::vector<std::string>& lines) {
  OpenSystem sys{std::move(sig), {}, lines};
  sys.body.reserve(lines.size());
  for (const auto& line : lines) sys.body.push_back(parse(line));
  return sys;
}

Violations OpenSystem::validate() const {
  Violations out;
  if (body.size() != signature.self_dim) {
    out.push_back({"body", "has " + std::to_string(body.size()) + " expressions for dimension " +
                               std::to_string(signature.self_dim)});
  }
  for (std::size_t i = 0; i < body.size(); ++i) {
    for (auto v : netdyn::validate(*body[i], signature)) {
      v.message = "coordinate " + std::to_string(i) + ": " + v.message;
      out.push_back(std::move(v));
    }
  }
  return out;
}

void OpenSystem::evaluate_into(std::span<const double> self, std::span<const Vector> inputs,
                               std::span<double> out) const {
  if (self.size() != signature.self_dim || inputs.size() != signature.slot_count() ||
      out.size() != body.size()) {
    throw ShapeMismatchError("arguments do not match the system signature");
  }
  for (std::size_t s = 0; s < inputs.size(); ++s) {
    if (inputs[s].size() != signature.input_dims[s]) {
      throw ShapeMismatchError("input slot " + std::to_string(s) + " has the wrong length");
    }
  }
  for (std::size_t i = 0; i < body.size(); ++i) {
    out[i] = eval(*body[i], self, inputs, signature.parameters);
  }
}

Vector OpenSystem::evaluate(std::span<const double> self, std::span<const Vector> inputs) const {
  Vector out(body.size());
  evaluate_into(self, inputs, out);
  return out;
}

ControlFamily canonical_family(const NetworkOfManifolds& net,
                               std::map<NodeId, OpenSystem> systems) {
  ControlFamily w;
  for (auto& [a, sys] : systems) {
    if (!net.graph.has_node(a)) throw UnknownNodeError("system given for unknown node '" + a + "'");
    w.emplace(a, NodeSystem{std::move(sys), net.graph.in_edges(a)});
  }
  return w;
}

SystemSignature induced_signature(const NetworkOfManifolds& net, const NodeId& a,
                                  std::span<const EdgeId> slot_edges, ParameterValues params) {
  SystemSignature sig{net.dim(a), {}, std::move(params)};
  for (const auto& e : slot_edges) sig.input_dims.push_back(net.dim(net.graph.src(e)));
  return sig;
}

Violations validate_family(const NetworkOfManifolds& net, const ControlFamily& w) {
  Violations out;
  for (const auto& a : net.graph.nodes()) {
    auto it = w.find(a);
    if (it == w.end()) {
      out.push_back({a, "no open system"});
      continue;
    }
    const auto& [sys, slots] = it->second;
    auto in = net.graph.in_edges(a);
    auto bound = slots;
    std::sort(bound.begin(), bound.end());
    if (bound != in) {
      out.push_back({a, "slot binding is not a permutation of the in-edges"});
      continue;
    }
    const auto& sig = sys.signature;
    if (sig.self_dim != net.dim(a)) {
      out.push_back({a, "self dimension " + std::to_string(sig.self_dim) +
                            " differs from phase space dimension " + std::to_string(net.dim(a))});
    }
    if (sig.slot_count() != slots.size()) {
      out.push_back({a, "signature has " + std::to_string(sig.slot_count()) +
                            " slots, input tree has " + std::to_string(slots.size()) + " leaves"});
    } else {
      for (std::size_t s = 0; s < slots.size(); ++s) {
        const auto want = net.dim(net.graph.src(slots[s]));
        if (sig.input_dims[s] != want) {
          out.push_back({a, "slot " + std::to_string(s) + " (edge '" + slots[s] +
                                "') has dimension " + std::to_string(sig.input_dims[s]) +
                                ", source has " + std::to_string(want)});
        }
      }
    }
    for (auto v : sys.validate()) {
      v.message = v.subject + ": " + v.message;
      v.subject = a;
      out.push_back(std::move(v));
    }
  }
  for (const auto& [a, _] : w) {
    if (!net.graph.has_node(a)) out.push_back({a, "open system for a node not in the graph"});
  }
  return out;
}

InterconnectedField::InterconnectedField(NetworkOfManifolds net, ControlFamily family)
    : net_(std::move(net)), family_(std::move(family)) {
  sources_.reserve(family_.size());
  for (const auto& [a, ns] : family_) {
    std::vector<NodeId> sources;
    for (const auto& e : ns.slot_edges) sources.push_back(net_.graph.src(e));
    sources_.push_back(std::move(sources));
  }
}

void InterconnectedField::evaluate_into(const TotalPoint& x, TangentTotalPoint& out) const {
  std::vector<Vector> inputs;
  auto sources = sources_.begin();
  for (const auto& [a, ns] : family_) {
    inputs.clear();
    for (const auto& src : *sources++) inputs.push_back(x[src]);
    ns.system.evaluate_into(x[a], inputs, out[a]);
  }
}

TangentTotalPoint InterconnectedField::operator()(const TotalPoint& x) const {
  check_shape(net_, x);
  auto out = BlockVector::zeros(net_);
  evaluate_into(x, out);
  return out;
}

Vector InterconnectedField::component(const TotalPoint& x, const NodeId& a) const {
  auto it = family_.find(a);
  if (it == family_.end()) throw UnknownNodeError("unknown node '" + a + "'");
  std::vector<Vector> inputs;
  for (const auto& e : it->second.slot_edges) inputs.push_back(x[net_.graph.src(e)]);
  return it->second.system.evaluate(x[a], inputs);
}

InterconnectedField interconnect(const NetworkOfManifolds& net, const ControlFamily& w) {
  auto violations = validate_family(net, w);
  if (!violations.empty()) {
    throw SignatureMismatchError("node '" + violations.front().subject +
                                 "': " + violations.front().message);
  }
  return InterconnectedField(net, w);
}

ControlFamily pullback_family(const GraphMorphism& phi, const FibrationWitness& witness,
                              const NetworkOfManifolds& dom, const NetworkOfManifolds& cod,
                              const ControlFamily& w_prime) {
  if (auto v = check_network_morphism(phi, dom, cod); !v.empty()) {
    throw SignatureMismatchError("'" + v.front().subject + "': " + v.front().message);
  }
  if (auto v = validate_witness(phi, witness); !v.empty()) {
    throw NotFibrationError("witness rejected at '" + v.front().subject + "': " +
                            v.front().message);
  }
  if (auto v = validate_family(cod, w_prime); !v.empty()) {
    throw SignatureMismatchError("codomain family at '" + v.front().subject +
                                 "': " + v.front().message);
  }

  ControlFamily out;
  for (const auto& a : dom.graph.nodes()) {
    const auto& base = w_prime.at(phi.node(a));
    NodeSystem pulled{base.system, {}};
    pulled.slot_edges.reserve(base.slot_edges.size());
    for (const auto& e_prime : base.slot_edges) pulled.slot_edges.push_back(witness.lift(a, e_prime));
    out.emplace(a, std::move(pulled));
  }
  return out;
}

ControlFamily scale_family(const ControlFamily& w, double factor) {
  ControlFamily out = w;
  for (auto& [_, ns] : out) {
    for (auto& e : ns.system.body) e = binary(BinaryOp::Mul, number(factor), e);
    ns.system.source_text.clear();
  }
  return out;
}

ConsistencyReport family_is_pullback_consistent(const GraphMorphism& q,
                                                const FibrationWitness& witness,
                                                const NetworkOfManifolds& net,
                                                const ControlFamily& w, std::size_t samples,
                                                std::uint64_t seed, double tol) {
  if (!q.is_surjective_on_nodes()) throw NotSurjectiveError("quotient map is not surjective");
  if (auto v = validate_witness(q, witness); !v.empty()) {
    throw NotFibrationError("witness rejected at '" + v.front().subject + "': " +
                            v.front().message);
  }
  if (auto v = validate_family(net, w); !v.empty()) {
    throw SignatureMismatchError("family at '" + v.front().subject + "': " + v.front().message);
  }

  ConsistencyReport report;
  report.samples = samples;
  report.seed = seed;

  std::map<NodeId, std::vector<NodeId>> fibers;
  for (const auto& a : net.graph.nodes()) fibers[q.node(a)].push_back(a);

  SplitMix64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto draw = [&](std::size_t n) {
    Vector v(n);
    for (auto& c : v) c = normal(rng);
    return v;
  };

  for (std::size_t s = 0; s < samples; ++s) {
    for (const auto& [c, fiber] : fibers) {
      const auto& first = fiber.front();
      // One shared value per base in-edge and one shared self state.
      const Vector self = draw(net.dim(first));
      std::map<EdgeId, Vector> by_base_edge;
      for (const auto& [e_prime, e] : witness.lifts.at(first)) {
        by_base_edge.emplace(e_prime, draw(net.dim(net.graph.src(e))));
      }

      std::vector<Vector> outputs;
      for (const auto& a : fiber) {
        const auto& ns = w.at(a);
        if (ns.system.signature.self_dim != self.size()) {
          report.consistent = false;
          report.offending_pair = {first, a};
          report.offending_sample = s;
          report.max_deviation = std::numeric_limits<double>::infinity();
          return report;
        }
        std::vector<Vector> inputs;
        for (const auto& e : ns.slot_edges) inputs.push_back(by_base_edge.at(q.edge(e)));
        try {
          outputs.push_back(ns.system.evaluate(self, inputs));
        } catch (const ShapeMismatchError&) {
          report.consistent = false;
          report.offending_pair = {first, a};
          report.offending_sample = s;
          report.max_deviation = std::numeric_limits<double>::infinity();
          return report;
        }
      }

      for (std::size_t i = 0; i < fiber.size(); ++i) {
        for (std::size_t j = i + 1; j < fiber.size(); ++j) {
          double dev = 0.0;
          for (std::size_t k = 0; k < outputs[i].size(); ++k) {
            dev = std::max(dev, coordinate_deviation(outputs[i][k], outputs[j][k]));
          }
          report.max_deviation = std::max(report.max_deviation, dev);
          if (dev > tol && report.consistent) {
            report.consistent = false;
            report.offending_pair = {fiber[i], fiber[j]};
            report.offending_sample = s;
          }
        }
      }
    }
  }
  return report;
}

ControlFamily canonicalize_slots(const NetworkOfManifolds& net, const ControlFamily& w) {
  ControlFamily out;
  for (const auto& [a, ns] : w) {
    const auto canonical = net.graph.in_edges(a);
    if (ns.slot_edges == canonical) {
      out.emplace(a, ns);
      continue;
    }
    // slot_map[s] = canonical position of the edge bound to slot s
    std::vector<std::size_t> slot_map(ns.slot_edges.size());
    for (std::size_t s = 0; s < ns.slot_edges.size(); ++s) {
      auto it = std::find(canonical.begin(), canonical.end(), ns.slot_edges[s]);
      if (it == canonical.end()) {
        throw SignatureMismatchError("node '" + a + "': slot edge '" + ns.slot_edges[s] +
                                     "' is not an in-edge");
      }
      slot_map[s] = static_cast<std::size_t>(it - canonical.begin());
    }
    NodeSystem fixed{ns.system, canonical};
    fixed.system.signature.input_dims.assign(canonical.size(), 0);
    for (std::size_t s = 0; s < slot_map.size(); ++s) {
      fixed.system.signature.input_dims[slot_map[s]] = ns.system.signature.input_dims[s];
    }
    for (auto& e : fixed.system.body) e = remap_slots(e, slot_map);
    fixed.system.source_text.clear();
    out.emplace(a, std::move(fixed));
  }
  return out;
}

}  // namespace netdyn
