#pragma once

// Networks of Euclidean phase spaces and the point-level pullback functor.
//
// A total phase space point is a node-keyed family of real vectors. Nothing
// here depends on an ordering of the nodes; flattening happens only at the
// file and CSV boundary.

#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include "netdyn/graph.hpp"
#include "netdyn/random.hpp"

namespace netdyn {

using Vector = std::vector<double>;

/// Node -> dimension of the attached R^n.
using PhaseSpaceAssignment = std::map<NodeId, std::size_t>;

struct NetworkOfManifolds {
  DirectedMultigraph graph;
  PhaseSpaceAssignment dims;

  std::size_t dim(const NodeId& a) const;
  std::size_t total_dim() const;

  friend bool operator==(const NetworkOfManifolds&, const NetworkOfManifolds&) = default;
};

/// Graph violations plus dims that are missing, extra or zero.
Violations validate_network(const NetworkOfManifolds& net);

/// A node-keyed family of vectors. Used both for points of the total phase
/// space and for tangent vectors at such points.
class BlockVector {
 public:
  BlockVector() = default;
  explicit BlockVector(std::map<NodeId, Vector> blocks) : blocks_(std::move(blocks)) {}

  /// All-zero vector shaped for `net`.
  static BlockVector zeros(const NetworkOfManifolds& net);

  const Vector& operator[](const NodeId& a) const;
  Vector& operator[](const NodeId& a);
  void set(const NodeId& a, Vector v) { blocks_[a] = std::move(v); }

  const std::map<NodeId, Vector>& blocks() const noexcept { return blocks_; }
  std::map<NodeId, Vector>& blocks() noexcept { return blocks_; }
  std::size_t size() const noexcept { return blocks_.size(); }

  bool is_finite() const;

  friend bool operator==(const BlockVector&, const BlockVector&) = default;

 private:
  std::map<NodeId, Vector> blocks_;
};

using TotalPoint = BlockVector;
using TangentTotalPoint = BlockVector;

/// Throws ShapeMismatchError unless x has exactly the nodes of `net` with
/// matching block lengths.
void check_shape(const NetworkOfManifolds& net, const BlockVector& x);

/// max over nodes and coordinates of |x - y|. Keys must match.
double max_abs_difference(const BlockVector& x, const BlockVector& y);

/// Standard-normal point shaped for `net`.
BlockVector random_point(const NetworkOfManifolds& net, SplitMix64& rng);

/// Ok iff dims(a) == dims'(phi(a)) for every domain node.
Violations check_network_morphism(const GraphMorphism& phi, const NetworkOfManifolds& dom,
                                  const NetworkOfManifolds& cod);

/// (P phi x')_a = x'_{phi(a)}. Throws ShapeMismatchError if x' is not keyed
/// by the codomain nodes or two blocks that must coincide differ in length.
TotalPoint pullback_point(const GraphMorphism& phi, const TotalPoint& x_prime);

/// D P phi. In coordinates this is the same block selection/duplication.
TangentTotalPoint pullback_tangent(const GraphMorphism& phi, const TangentTotalPoint& v_prime);

struct PolydiagonalMembership {
  bool member = false;
  double max_deviation = 0.0;
};

inline constexpr double kDefaultPolydiagonalTol = 1e-9;

/// Is x in Delta_phi = {x : x_a = x_b whenever phi(a) = phi(b)}? Deviation is
/// the largest infinity-norm distance between blocks sharing an image.
/// Throws NotSurjectiveError if phi is not onto the codomain nodes.
PolydiagonalMembership polydiagonal_membership(const GraphMorphism& phi, const TotalPoint& x,
                                               double tol = kDefaultPolydiagonalTol);

struct EmbeddingReport {
  bool blocks_covered = false;         // every codomain block appears in the image
  bool image_in_polydiagonal = false;  // P phi(x') in Delta_phi for all samples
  bool polydiagonal_in_image = false;  // every sampled x in Delta_phi has a preimage
  std::size_t samples = 0;
  double max_deviation = 0.0;
  std::uint64_t seed = 0;

  bool ok() const noexcept { return blocks_covered && image_in_polydiagonal && polydiagonal_in_image; }
};

/// For a node-surjective network morphism, confirms that P phi is an
/// embedding onto Delta_phi by sampling both directions.
EmbeddingReport image_is_embedding_check(const GraphMorphism& phi, const NetworkOfManifolds& dom,
                                         const NetworkOfManifolds& cod, std::size_t samples = 100,
                                         std::uint64_t seed = kDefaultSeed);

struct SubmersionReport {
  bool is_projection = false;       // P phi keeps exactly the image blocks
  bool preimages_exhibited = false; // zero-extension is a preimage for every sample
  std::size_t samples = 0;
  std::uint64_t seed = 0;

  bool ok() const noexcept { return is_projection && preimages_exhibited; }
};

/// For a node-injective network morphism, confirms P phi is the coordinate
/// projection onto the image blocks and exhibits preimages by zero-extension.
SubmersionReport projection_is_submersion_check(const GraphMorphism& phi,
                                                const NetworkOfManifolds& dom,
                                                const NetworkOfManifolds& cod,
                                                std::size_t samples = 100,
                                                std::uint64_t seed = kDefaultSeed);

/// The zero-extension preimage used by projection_is_submersion_check.
TotalPoint zero_extension(const GraphMorphism& phi, const NetworkOfManifolds& cod,
                          const TotalPoint& y);

}  // namespace netdyn
