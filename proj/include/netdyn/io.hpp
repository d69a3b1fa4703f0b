#pragma once

// JSON file formats and CSV trajectory export.
//
// Network file:
//   {"nodes": [{"id": "a", "dim": 1, "space": "euclidean",
//               "dynamics": ["-x[0]"], "params": {"k": 1.5}}, ...],
//    "edges": [{"id": "e1", "src": "a", "tgt": "b"}, ...]}
// Morphism file:  {"nodes": {"a1": "a", ...}, "edges": {"gamma": "gamma'", ...}}
// Point file:     {"a": [1.0], "b": [0.5, 2.0]}
// Partition file: {"blocks": [["a1", "a2"], ["b"]]}
//
// Input slot s of a node's dynamics reads the s-th in-edge in EdgeId order.

#include <iosfwd>
#include <string>
#include <string_view>

#include <json.hpp>

#include "netdyn/dynamics.hpp"
#include "netdyn/graph.hpp"
#include "netdyn/network.hpp"
#include "netdyn/open_system.hpp"
#include "netdyn/quotient.hpp"

namespace netdyn::io {

using json = nlohmann::json;

/// Throws FormatError with the 1-based line and column of the problem.
json parse_json(std::string_view text);
json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

struct NetworkSpec {
  NetworkOfManifolds net;
  ControlFamily family;  // empty when the file carries no dynamics
  bool has_dynamics = false;
};

enum class Dynamics { Required, Optional };

/// Throws FormatError for structural problems (missing fields, wrong types,
/// duplicate ids, bad space kind) and for expressions that do not parse or do
/// not validate against the node's induced signature.
NetworkSpec load_network(const json& j, Dynamics policy = Dynamics::Required);

/// Bodies are written in canonical slot order; a body keeps its original
/// text unless it had to be rewritten.
json emit_network(const NetworkOfManifolds& net, const ControlFamily& family);

/// Throws FormatError for non-string entries; totality is checked by
/// validate_morphism.
GraphMorphism load_morphism(const json& j, const DirectedMultigraph& domain,
                            const DirectedMultigraph& codomain);
json emit_morphism(const GraphMorphism& phi);

json emit_witness(const FibrationWitness& w);

/// Throws FormatError for missing nodes, unknown nodes or wrong lengths.
TotalPoint load_point(const json& j, const NetworkOfManifolds& net);
json emit_point(const TotalPoint& x);

/// Throws FormatError; InvalidPartitionError for bad coverage.
NodePartition load_partition(const json& j, const DirectedMultigraph& g);
json emit_partition(const NodePartition& p);

/// Header "t,<node>.<i>,..." with nodes in id order and coordinates
/// ascending; values with 17 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

/// printf-style %.17g; reads back to the same double.
std::string format_double(double v);

}  // namespace netdyn::io
