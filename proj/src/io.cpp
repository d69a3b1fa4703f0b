#include "netdyn/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "netdyn/errors.hpp"

namespace netdyn::io {

namespace {

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

[[noreturn]] void fail(const std::string& what) { throw FormatError(what); }

const json& member(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(where + ": missing field '" + key + "'");
  return *it;
}

std::string string_field(const json& obj, const char* key, const std::string& where) {
  const auto& v = member(obj, key, where);
  if (!v.is_string()) fail(where + ": field '" + key + "' must be a string");
  auto s = v.get<std::string>();
  if (s.empty()) fail(where + ": field '" + key + "' must not be empty");
  return s;
}

std::string join(const Violations& v) {
  std::string out;
  for (const auto& item : v) {
    if (!out.empty()) out += "; ";
    out += "'" + item.subject + "': " + item.message;
  }
  return out;
}

}  // namespace

namespace {

json parse_labeled(std::string_view text, const std::string& label) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // e.byte is 1-based and points one past the offending character
    auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw FormatError(label + "malformed JSON: " + e.what(), line, col);
  }
}

}  // namespace

json parse_json(std::string_view text) { return parse_labeled(text, ""); }

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_labeled(buf.str(), path + ": ");
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

NetworkSpec load_network(const json& j, Dynamics policy) {
  if (!j.is_object()) fail("network file must be a JSON object");
  const auto& nodes = member(j, "nodes", "network");
  if (!nodes.is_array()) fail("network: 'nodes' must be an array");
  const auto& edges = member(j, "edges", "network");
  if (!edges.is_array()) fail("network: 'edges' must be an array");

  NetworkSpec spec;
  std::map<NodeId, OpenSystem> systems;
  std::map<NodeId, std::vector<std::string>> dynamics;
  std::map<NodeId, ParameterValues> params;

  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    const std::string where = "nodes[" + std::to_string(i) + "]";
    if (!n.is_object()) fail(where + ": must be an object");
    auto id = string_field(n, "id", where);
    if (spec.net.graph.has_node(id)) fail(where + ": duplicate node id '" + id + "'");

    const auto& dim = member(n, "dim", where);
    if (!dim.is_number_integer() || dim.get<long long>() < 1) {
      fail(where + ": 'dim' must be a positive integer");
    }
    if (string_field(n, "space", where) != "euclidean") {
      fail(where + ": unsupported space kind (only \"euclidean\" is accepted)");
    }
    spec.net.graph.add_node(id);
    spec.net.dims.emplace(id, dim.get<std::size_t>());

    auto& p = params[id];
    if (auto it = n.find("params"); it != n.end()) {
      if (!it->is_object()) fail(where + ": 'params' must be an object");
      for (const auto& [name, value] : it->items()) {
        if (!value.is_number()) fail(where + ": parameter '" + name + "' must be a number");
        p.emplace(name, value.get<double>());
      }
    }
    if (auto it = n.find("dynamics"); it != n.end()) {
      if (!it->is_array()) fail(where + ": 'dynamics' must be an array of strings");
      auto& lines = dynamics[id];
      for (const auto& line : *it) {
        if (!line.is_string()) fail(where + ": 'dynamics' must be an array of strings");
        lines.push_back(line.get<std::string>());
      }
    }
  }

  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto& e = edges[i];
    const std::string where = "edges[" + std::to_string(i) + "]";
    if (!e.is_object()) fail(where + ": must be an object");
    auto id = string_field(e, "id", where);
    if (spec.net.graph.has_edge(id)) fail(where + ": duplicate edge id '" + id + "'");
    spec.net.graph.add_edge(id, string_field(e, "src", where), string_field(e, "tgt", where));
  }

  if (auto v = validate_network(spec.net); !v.empty()) fail("invalid network: " + join(v));

  if (dynamics.empty()) {
    if (policy == Dynamics::Required && spec.net.graph.node_count() > 0) {
      fail("network: every node needs 'dynamics'");
    }
    return spec;
  }
  if (dynamics.size() != spec.net.graph.node_count()) {
    for (const auto& a : spec.net.graph.nodes()) {
      if (!dynamics.count(a)) fail("node '" + a + "': missing 'dynamics'");
    }
  }

  for (const auto& a : spec.net.graph.nodes()) {
    const auto& lines = dynamics.at(a);
    if (lines.size() != spec.net.dim(a)) {
      fail("node '" + a + "': 'dynamics' has " + std::to_string(lines.size()) +
           " entries for dimension " + std::to_string(spec.net.dim(a)));
    }
    const auto slots = spec.net.graph.in_edges(a);
    auto sig = induced_signature(spec.net, a, slots, params.at(a));
    try {
      systems.emplace(a, OpenSystem::from_text(std::move(sig), lines));
    } catch (const SyntaxError& e) {
      fail("node '" + a + "': " + e.what());
    }
  }
  spec.family = canonical_family(spec.net, std::move(systems));
  if (auto v = validate_family(spec.net, spec.family); !v.empty()) {
    fail("invalid dynamics: " + join(v));
  }
  spec.has_dynamics = true;
  return spec;
}

json emit_network(const NetworkOfManifolds& net, const ControlFamily& family) {
  const auto canonical = canonicalize_slots(net, family);
  json nodes = json::array();
  for (const auto& a : net.graph.nodes()) {
    json n = {{"id", a}, {"dim", net.dim(a)}, {"space", "euclidean"}};
    if (auto it = canonical.find(a); it != canonical.end()) {
      const auto& sys = it->second.system;
      json lines = json::array();
      if (sys.source_text.size() == sys.body.size()) {
        for (const auto& text : sys.source_text) lines.push_back(text);
      } else {
        for (const auto& e : sys.body) lines.push_back(print(*e));
      }
      n["dynamics"] = std::move(lines);
      if (!sys.signature.parameters.empty()) {
        json p = json::object();
        for (const auto& [name, value] : sys.signature.parameters) p[name] = value;
        n["params"] = std::move(p);
      }
    }
    nodes.push_back(std::move(n));
  }
  json edges = json::array();
  for (const auto& [id, e] : net.graph.edges()) {
    edges.push_back({{"id", id}, {"src", e.src}, {"tgt", e.tgt}});
  }
  return {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

GraphMorphism load_morphism(const json& j, const DirectedMultigraph& domain,
                            const DirectedMultigraph& codomain) {
  if (!j.is_object()) fail("morphism file must be a JSON object");
  GraphMorphism phi{domain, codomain, {}, {}};
  for (const char* key : {"nodes", "edges"}) {
    const auto& table = member(j, key, "morphism");
    if (!table.is_object()) fail(std::string("morphism: '") + key + "' must be an object");
    auto& target = std::string(key) == "nodes" ? phi.node_map : phi.edge_map;
    for (const auto& [from, to] : table.items()) {
      if (!to.is_string()) fail(std::string("morphism: ") + key + " entry '" + from + "' must be a string");
      target.emplace(from, to.get<std::string>());
    }
  }
  return phi;
}

json emit_morphism(const GraphMorphism& phi) {
  json nodes = json::object(), edges = json::object();
  for (const auto& [a, b] : phi.node_map) nodes[a] = b;
  for (const auto& [e, f] : phi.edge_map) edges[e] = f;
  return {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

json emit_witness(const FibrationWitness& w) {
  json out = json::object();
  for (const auto& [a, lifts] : w.lifts) {
    json table = json::object();
    for (const auto& [e_prime, e] : lifts) table[e_prime] = e;
    out[a] = std::move(table);
  }
  return out;
}

TotalPoint load_point(const json& j, const NetworkOfManifolds& net) {
  if (!j.is_object()) fail("point file must be a JSON object");
  std::map<NodeId, Vector> blocks;
  for (const auto& [a, v] : j.items()) {
    if (!net.graph.has_node(a)) fail("point: unknown node '" + a + "'");
    if (!v.is_array()) fail("point: value of '" + a + "' must be an array of numbers");
    Vector block;
    for (const auto& c : v) {
      if (!c.is_number()) fail("point: value of '" + a + "' must be an array of numbers");
      block.push_back(c.get<double>());
    }
    if (block.size() != net.dim(a)) {
      fail("point: node '" + a + "' needs " + std::to_string(net.dim(a)) + " values, got " +
           std::to_string(block.size()));
    }
    blocks.emplace(a, std::move(block));
  }
  for (const auto& a : net.graph.nodes()) {
    if (!blocks.count(a)) fail("point: missing initial condition for node '" + a + "'");
  }
  return BlockVector(std::move(blocks));
}

json emit_point(const TotalPoint& x) {
  json out = json::object();
  for (const auto& [a, v] : x.blocks()) out[a] = v;
  return out;
}

NodePartition load_partition(const json& j, const DirectedMultigraph& g) {
  if (!j.is_object()) fail("partition file must be a JSON object");
  const auto& blocks = member(j, "blocks", "partition");
  if (!blocks.is_array()) fail("partition: 'blocks' must be an array of arrays");
  std::vector<std::vector<NodeId>> out;
  for (const auto& block : blocks) {
    if (!block.is_array()) fail("partition: 'blocks' must be an array of arrays");
    auto& members = out.emplace_back();
    for (const auto& a : block) {
      if (!a.is_string()) fail("partition: node ids must be strings");
      members.push_back(a.get<std::string>());
    }
  }
  return NodePartition(g.nodes(), std::move(out));
}

json emit_partition(const NodePartition& p) { return {{"blocks", p.blocks()}}; }

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  if (traj.states.empty()) return;
  os << 't';
  for (const auto& [a, v] : traj.states.front().blocks()) {
    for (std::size_t i = 0; i < v.size(); ++i) os << ',' << a << '.' << i;
  }
  os << '\n';
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    os << format_double(traj.times[k]);
    for (const auto& [a, v] : traj.states[k].blocks()) {
      for (double c : v) os << ',' << format_double(c);
    }
    os << '\n';
  }
}

}  // namespace netdyn::io
