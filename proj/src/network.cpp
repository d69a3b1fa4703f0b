#include "netdyn/network.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "netdyn/errors.hpp"

namespace netdyn {

std::size_t NetworkOfManifolds::dim(const NodeId& a) const {
  auto it = dims.find(a);
  if (it == dims.end()) throw UnknownNodeError("no phase space for node '" + a + "'");
  return it->second;
}

std::size_t NetworkOfManifolds::total_dim() const {
  std::size_t n = 0;
  for (const auto& [_, d] : dims) n += d;
  return n;
}

Violations validate_network(const NetworkOfManifolds& net) {
  Violations out = validate_graph(net.graph);
  for (const auto& a : net.graph.nodes()) {
    auto it = net.dims.find(a);
    if (it == net.dims.end()) {
      out.push_back({a, "no phase space dimension"});
    } else if (it->second == 0) {
      out.push_back({a, "phase space dimension must be at least 1"});
    }
  }
  for (const auto& [a, _] : net.dims) {
    if (!net.graph.has_node(a)) out.push_back({a, "dimension given for a node not in the graph"});
  }
  return out;
}

BlockVector BlockVector::zeros(const NetworkOfManifolds& net) {
  std::map<NodeId, Vector> blocks;
  for (const auto& [a, d] : net.dims) blocks.emplace(a, Vector(d, 0.0));
  return BlockVector(std::move(blocks));
}

const Vector& BlockVector::operator[](const NodeId& a) const {
  auto it = blocks_.find(a);
  if (it == blocks_.end()) throw ShapeMismatchError("point has no block for node '" + a + "'");
  return it->second;
}

Vector& BlockVector::operator[](const NodeId& a) {
  auto it = blocks_.find(a);
  if (it == blocks_.end()) throw ShapeMismatchError("point has no block for node '" + a + "'");
  return it->second;
}

bool BlockVector::is_finite() const {
  for (const auto& [_, v] : blocks_) {
    for (double c : v) {
      if (!std::isfinite(c)) return false;
    }
  }
  return true;
}

void check_shape(const NetworkOfManifolds& net, const BlockVector& x) {
  if (x.size() != net.graph.node_count()) {
    throw ShapeMismatchError("point has " + std::to_string(x.size()) + " blocks, network has " +
                             std::to_string(net.graph.node_count()) + " nodes");
  }
  for (const auto& [a, v] : x.blocks()) {
    if (!net.graph.has_node(a)) throw ShapeMismatchError("point has a block for unknown node '" + a + "'");
    if (v.size() != net.dim(a)) {
      throw ShapeMismatchError("block '" + a + "' has length " + std::to_string(v.size()) +
                               ", expected " + std::to_string(net.dim(a)));
    }
  }
}

double max_abs_difference(const BlockVector& x, const BlockVector& y) {
  if (x.size() != y.size()) throw ShapeMismatchError("points have different node sets");
  double dev = 0.0;
  for (const auto& [a, u] : x.blocks()) {
    const auto& v = y[a];
    if (u.size() != v.size()) throw ShapeMismatchError("block '" + a + "' lengths differ");
    for (std::size_t i = 0; i < u.size(); ++i) dev = std::max(dev, std::abs(u[i] - v[i]));
  }
  return dev;
}

BlockVector random_point(const NetworkOfManifolds& net, SplitMix64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::map<NodeId, Vector> blocks;
  for (const auto& [a, d] : net.dims) {
    Vector v(d);
    for (auto& c : v) c = normal(rng);
    blocks.emplace(a, std::move(v));
  }
  return BlockVector(std::move(blocks));
}

Violations check_network_morphism(const GraphMorphism& phi, const NetworkOfManifolds& dom,
                                  const NetworkOfManifolds& cod) {
  Violations out;
  for (const auto& a : dom.graph.nodes()) {
    auto image = phi.node_map.find(a);
    if (image == phi.node_map.end()) {
      out.push_back({a, "node has no image"});
      continue;
    }
    auto d = dom.dims.find(a);
    auto c = cod.dims.find(image->second);
    if (d == dom.dims.end() || c == cod.dims.end()) {
      out.push_back({a, "missing phase space dimension"});
    } else if (d->second != c->second) {
      out.push_back({a, "dimension " + std::to_string(d->second) + " differs from dimension " +
                            std::to_string(c->second) + " of image '" + image->second + "'"});
    }
  }
  return out;
}

namespace {

BlockVector select_blocks(const GraphMorphism& phi, const BlockVector& x_prime) {
  if (x_prime.size() != phi.codomain.node_count()) {
    throw ShapeMismatchError("point is not shaped for the codomain");
  }
  for (const auto& [a, _] : x_prime.blocks()) {
    if (!phi.codomain.has_node(a)) {
      throw ShapeMismatchError("point has a block for unknown node '" + a + "'");
    }
  }
  std::map<NodeId, Vector> blocks;
  for (const auto& a : phi.domain.nodes()) blocks.emplace(a, x_prime[phi.node(a)]);
  return BlockVector(std::move(blocks));
}

void require_surjective(const GraphMorphism& phi) {
  if (!phi.is_surjective_on_nodes()) throw NotSurjectiveError("node map is not surjective");
}

void require_network_morphism(const GraphMorphism& phi, const NetworkOfManifolds& dom,
                              const NetworkOfManifolds& cod) {
  auto v = check_network_morphism(phi, dom, cod);
  if (!v.empty()) throw ShapeMismatchError("'" + v.front().subject + "': " + v.front().message);
}

}  // namespace

TotalPoint pullback_point(const GraphMorphism& phi, const TotalPoint& x_prime) {
  return select_blocks(phi, x_prime);
}

TangentTotalPoint pullback_tangent(const GraphMorphism& phi, const TangentTotalPoint& v_prime) {
  return select_blocks(phi, v_prime);
}

PolydiagonalMembership polydiagonal_membership(const GraphMorphism& phi, const TotalPoint& x,
                                               double tol) {
  require_surjective(phi);
  std::map<NodeId, std::vector<NodeId>> fibers;
  for (const auto& a : phi.domain.nodes()) fibers[phi.node(a)].push_back(a);

  double dev = 0.0;
  for (const auto& [_, fiber] : fibers) {
    for (std::size_t i = 0; i < fiber.size(); ++i) {
      const auto& u = x[fiber[i]];
      for (std::size_t j = i + 1; j < fiber.size(); ++j) {
        const auto& v = x[fiber[j]];
        if (u.size() != v.size()) throw ShapeMismatchError("blocks sharing an image differ in length");
        for (std::size_t k = 0; k < u.size(); ++k) dev = std::max(dev, std::abs(u[k] - v[k]));
      }
    }
  }
  return {dev <= tol, dev};
}

EmbeddingReport image_is_embedding_check(const GraphMorphism& phi, const NetworkOfManifolds& dom,
                                         const NetworkOfManifolds& cod, std::size_t samples,
                                         std::uint64_t seed) {
  require_surjective(phi);
  require_network_morphism(phi, dom, cod);

  EmbeddingReport report;
  report.samples = samples;
  report.seed = seed;

  // Injectivity: every codomain block is read by some domain block.
  std::map<NodeId, NodeId> section;
  for (const auto& a : dom.graph.nodes()) section.emplace(phi.node(a), a);
  report.blocks_covered = section.size() == cod.graph.node_count();

  SplitMix64 rng(seed);
  report.image_in_polydiagonal = true;
  report.polydiagonal_in_image = true;
  for (std::size_t s = 0; s < samples; ++s) {
    // image -> polydiagonal
    auto x = pullback_point(phi, random_point(cod, rng));
    auto m = polydiagonal_membership(phi, x, 0.0);
    report.max_deviation = std::max(report.max_deviation, m.max_deviation);
    report.image_in_polydiagonal = report.image_in_polydiagonal && m.member;

    // polydiagonal -> image: build y in Delta_phi, recover a preimage through
    // the section, push it back.
    auto seed_point = random_point(cod, rng);
    std::map<NodeId, Vector> y_blocks;
    for (const auto& a : dom.graph.nodes()) y_blocks.emplace(a, seed_point[phi.node(a)]);
    BlockVector y(std::move(y_blocks));
    std::map<NodeId, Vector> pre;
    for (const auto& [c, a] : section) pre.emplace(c, y[a]);
    report.polydiagonal_in_image =
        report.polydiagonal_in_image && pullback_point(phi, BlockVector(std::move(pre))) == y;
  }
  return report;
}

TotalPoint zero_extension(const GraphMorphism& phi, const NetworkOfManifolds& cod,
                          const TotalPoint& y) {
  auto x = BlockVector::zeros(cod);
  for (const auto& [a, v] : y.blocks()) x[phi.node(a)] = v;
  return x;
}

SubmersionReport projection_is_submersion_check(const GraphMorphism& phi,
                                                const NetworkOfManifolds& dom,
                                                const NetworkOfManifolds& cod, std::size_t samples,
                                                std::uint64_t seed) {
  if (!phi.is_injective_on_nodes()) throw NotInjectiveError("node map is not injective");
  require_network_morphism(phi, dom, cod);

  SubmersionReport report;
  report.samples = samples;
  report.seed = seed;
  SplitMix64 rng(seed);

  report.is_projection = true;
  report.preimages_exhibited = true;
  for (std::size_t s = 0; s < samples; ++s) {
    auto x = random_point(cod, rng);
    auto px = pullback_point(phi, x);
    for (const auto& a : dom.graph.nodes()) {
      report.is_projection = report.is_projection && px[a] == x[phi.node(a)];
    }
    auto y = random_point(dom, rng);
    report.preimages_exhibited =
        report.preimages_exhibited && pullback_point(phi, zero_extension(phi, cod, y)) == y;
  }
  return report;
}

}  // namespace netdyn
