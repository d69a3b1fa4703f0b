#include "netdyn/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <functional>
#include <ostream>

#include "netdyn/dynamics.hpp"
#include "netdyn/errors.hpp"
#include "netdyn/io.hpp"
#include "netdyn/quotient.hpp"

namespace netdyn {

namespace {

using io::json;

struct MapInputs {
  std::string domain;
  std::string codomain;
  std::string map;
};

struct LoadedMap {
  io::NetworkSpec domain;
  io::NetworkSpec codomain;
  GraphMorphism phi;
};

void add_map_options(CLI::App& cmd, MapInputs& in) {
  cmd.add_option("--domain", in.domain, "domain network file")->required();
  cmd.add_option("--codomain", in.codomain, "codomain network file")->required();
  cmd.add_option("--map", in.map, "morphism file")->required();
}

LoadedMap load_map(const MapInputs& in, io::Dynamics codomain_dynamics) {
  LoadedMap m{io::load_network(io::read_json_file(in.domain), io::Dynamics::Optional),
              io::load_network(io::read_json_file(in.codomain), codomain_dynamics), {}};
  m.phi = io::load_morphism(io::read_json_file(in.map), m.domain.net.graph, m.codomain.net.graph);
  if (auto v = validate_morphism(m.phi); !v.empty()) {
    throw InvalidMorphismError("invalid morphism at '" + v.front().subject + "': " +
                               v.front().message);
  }
  return m;
}

void require_network_morphism(const LoadedMap& m) {
  if (auto v = check_network_morphism(m.phi, m.domain.net, m.codomain.net); !v.empty()) {
    throw ShapeMismatchError("not a map of networks at '" + v.front().subject +
                             "': " + v.front().message);
  }
}

json failure_json(const FibrationFailure& f) {
  return {{"fibration", false},
          {"node", f.node},
          {"codomain_edge", f.codomain_edge},
          {"lifts", f.lift_count}};
}

json consistency_json(const ConsistencyReport& r) {
  json j = {{"consistent", r.consistent},
            {"max_deviation", r.max_deviation},
            {"samples", r.samples},
            {"seed", r.seed}};
  if (r.offending_pair) j["offending_pair"] = {r.offending_pair->first, r.offending_pair->second};
  if (r.offending_sample) j["offending_sample"] = *r.offending_sample;
  return j;
}

// "base.json" -> "base.map.json"
std::string default_map_path(const std::string& out_path) {
  const auto slash = out_path.find_last_of('/');
  const auto dot = out_path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
    return out_path + ".map.json";
  }
  return out_path.substr(0, dot) + ".map" + out_path.substr(dot);
}

// Writes the base network and the projection. Returns the exit code.
int emit_quotient(const io::NetworkSpec& spec, const QuotientOutcome& outcome,
                  const std::string& out_path, std::string map_out, std::ostream& out) {
  if (const auto* nb = std::get_if<NotBalanced>(&outcome)) {
    out << json{{"balanced", false}, {"representative", nb->representative}, {"node", nb->node}}
               .dump(2)
        << '\n';
    return kExitPropertyFails;
  }
  const auto& qr = std::get<QuotientResult>(outcome);
  auto pushed = pushforward_family(qr, spec.net, spec.family);
  if (const auto* bad = std::get_if<InconsistentFamily>(&pushed)) {
    out << json{{"balanced", true}, {"family", consistency_json(bad->report)}}.dump(2) << '\n';
    return kExitPropertyFails;
  }
  if (map_out.empty()) map_out = default_map_path(out_path);
  io::write_json_file(out_path, io::emit_network(qr.base, std::get<ControlFamily>(pushed)));
  io::write_json_file(map_out, io::emit_morphism(qr.projection));
  out << json{{"balanced", true},
              {"partition", io::emit_partition(qr.partition)["blocks"]},
              {"base_nodes", qr.base.graph.node_count()},
              {"base_edges", qr.base.graph.edge_count()},
              {"map", map_out}}
             .dump(2)
      << '\n';
  return kExitOk;
}

// Initial coloring for minbase: nodes are only merged when their dynamics text
// and parameters agree, so the pushforward has a chance to exist.
NodePartition dynamics_classes(const io::NetworkSpec& spec) {
  std::map<std::string, std::vector<NodeId>> classes;
  for (const auto& [a, ns] : spec.family) {
    std::string key;
    for (const auto& e : ns.system.body) key += print(*e) + '\n';
    for (const auto& [name, value] : ns.system.signature.parameters) {
      key += name + '=' + io::format_double(value) + '\n';
    }
    classes[key].push_back(a);
  }
  std::vector<std::vector<NodeId>> blocks;
  for (auto& [_, members] : classes) blocks.push_back(std::move(members));
  return NodePartition(spec.net.graph.nodes(), std::move(blocks));
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Coupled dynamical systems on networks and their graph fibrations", "netdyn"};
  app.require_subcommand(1);
  // --h is the step size, so help is long-form only (inherited by subcommands).
  app.set_help_flag("--help", "print this help message and exit");

  std::function<int()> action;

  // validate
  std::string network_path;
  auto* validate = app.add_subcommand("validate", "check a network file");
  validate->add_option("--network", network_path, "network file")->required();
  validate->callback([&] {
    action = [&] {
      io::load_network(io::read_json_file(network_path));
      out << "ok\n";
      return int{kExitOk};
    };
  });

  // fibration
  MapInputs fib_in;
  auto* fibration = app.add_subcommand("fibration", "check whether a morphism is a graph fibration");
  add_map_options(*fibration, fib_in);
  fibration->callback([&] {
    action = [&] {
      auto m = load_map(fib_in, io::Dynamics::Optional);
      auto result = is_fibration(m.phi);
      if (!result) {
        out << failure_json(result.failure()).dump(2) << '\n';
        return int{kExitPropertyFails};
      }
      out << json{{"fibration", true}, {"witness", io::emit_witness(result.witness())}}.dump(2)
          << '\n';
      return int{kExitOk};
    };
  });

  // pullback
  MapInputs pb_in;
  std::string pb_out;
  auto* pullback = app.add_subcommand("pullback", "pull codomain dynamics back to the domain");
  add_map_options(*pullback, pb_in);
  pullback->add_option("--out", pb_out, "output network file")->required();
  pullback->callback([&] {
    action = [&] {
      auto m = load_map(pb_in, io::Dynamics::Required);
      require_network_morphism(m);
      auto result = is_fibration(m.phi);
      if (!result) {
        out << failure_json(result.failure()).dump(2) << '\n';
        return int{kExitPropertyFails};
      }
      auto pulled = pullback_family(m.phi, result.witness(), m.domain.net, m.codomain.net,
                                    m.codomain.family);
      io::write_json_file(pb_out, io::emit_network(m.domain.net, pulled));
      out << "wrote " << pb_out << '\n';
      return int{kExitOk};
    };
  });

  // simulate
  std::string sim_network, sim_x0, sim_out;
  IntegratorConfig sim_cfg;
  auto* simulate = app.add_subcommand("simulate", "integrate a network with RK4 and write CSV");
  simulate->add_option("--network", sim_network, "network file")->required();
  simulate->add_option("--x0", sim_x0, "initial condition file")->required();
  simulate->add_option("--h", sim_cfg.h, "step size")->required();
  simulate->add_option("--t", sim_cfg.t_end, "end time")->required();
  simulate->add_option("--out", sim_out, "output CSV file")->required();
  simulate->callback([&] {
    action = [&] {
      auto spec = io::load_network(io::read_json_file(sim_network));
      auto x0 = io::load_point(io::read_json_file(sim_x0), spec.net);
      auto traj = rk4_integrate(interconnect(spec.net, spec.family), x0, sim_cfg);
      std::ofstream csv(sim_out, std::ios::binary);
      if (!csv) throw FormatError("cannot write '" + sim_out + "'");
      io::write_trajectory_csv(csv, traj);
      out << "wrote " << traj.states.size() << " rows to " << sim_out << '\n';
      return int{kExitOk};
    };
  });

  // conjugacy
  MapInputs conj_in;
  std::size_t conj_samples = kDefaultConjugacySamples;
  std::uint64_t conj_seed = kDefaultSeed;
  double conj_tol = 1e-12;
  auto* conjugacy = app.add_subcommand("conjugacy", "check the vector-field commuting square");
  add_map_options(*conjugacy, conj_in);
  conjugacy->add_option("--samples", conj_samples, "number of random codomain points");
  conjugacy->add_option("--seed", conj_seed, "PRNG seed");
  conjugacy->add_option("--tol", conj_tol, "residual tolerance");
  conjugacy->callback([&] {
    action = [&] {
      auto m = load_map(conj_in, io::Dynamics::Required);
      require_network_morphism(m);
      auto result = is_fibration(m.phi);
      if (!result) {
        out << failure_json(result.failure()).dump(2) << '\n';
        return int{kExitPropertyFails};
      }
      auto report = check_vectorfield_conjugacy(m.phi, result.witness(), m.domain.net,
                                                m.codomain.net, m.codomain.family, conj_samples,
                                                conj_seed);
      json per_node = json::object();
      for (const auto& [a, r] : report.residual_per_node) per_node[a] = r;
      out << json{{"samples", report.samples},
                  {"max_residual", report.max_residual},
                  {"residual_per_node", per_node},
                  {"seed", report.seed}}
                 .dump(2)
          << '\n';
      return report.max_residual <= conj_tol ? int{kExitOk} : int{kExitPropertyFails};
    };
  });

  // semiconjugacy
  MapInputs semi_in;
  std::string semi_x0;
  IntegratorConfig semi_cfg;
  double semi_tol = 1e-10;
  auto* semi = app.add_subcommand("semiconjugacy", "compare trajectories through P phi");
  add_map_options(*semi, semi_in);
  semi->add_option("--x0", semi_x0, "initial condition on the codomain")->required();
  semi->add_option("--h", semi_cfg.h, "step size")->required();
  semi->add_option("--t", semi_cfg.t_end, "end time")->required();
  semi->add_option("--tol", semi_tol, "deviation tolerance");
  semi->callback([&] {
    action = [&] {
      auto m = load_map(semi_in, io::Dynamics::Required);
      require_network_morphism(m);
      auto result = is_fibration(m.phi);
      if (!result) {
        out << failure_json(result.failure()).dump(2) << '\n';
        return int{kExitPropertyFails};
      }
      auto x0 = io::load_point(io::read_json_file(semi_x0), m.codomain.net);
      auto report = check_trajectory_semiconjugacy(m.phi, result.witness(), m.domain.net,
                                                   m.codomain.net, m.codomain.family, x0,
                                                   semi_cfg);
      out << json{{"steps", report.steps},
                  {"max_deviation", report.max_deviation},
                  {"time_of_max", report.time_of_max}}
                 .dump(2)
          << '\n';
      return report.max_deviation <= semi_tol ? int{kExitOk} : int{kExitPropertyFails};
    };
  });

  // minbase
  std::string mb_network, mb_out, mb_map_out;
  auto* minbase = app.add_subcommand("minbase", "quotient a network by its coarsest balanced partition");
  minbase->add_option("--network", mb_network, "network file")->required();
  minbase->add_option("--out", mb_out, "output base network file")->required();
  minbase->add_option("--map-out", mb_map_out, "output projection morphism file (default: <out>.map.json)");
  minbase->callback([&] {
    action = [&] {
      auto spec = io::load_network(io::read_json_file(mb_network));
      auto partition = coarsest_balanced_partition(spec.net, dynamics_classes(spec));
      return emit_quotient(spec, quotient_network(spec.net, partition), mb_out, mb_map_out, out);
    };
  });

  // quotient
  std::string q_network, q_partition, q_out, q_map_out;
  auto* quotient = app.add_subcommand("quotient", "quotient a network by a given partition");
  quotient->add_option("--network", q_network, "network file")->required();
  quotient->add_option("--partition", q_partition, "partition file")->required();
  quotient->add_option("--out", q_out, "output base network file")->required();
  quotient->add_option("--map-out", q_map_out, "output projection morphism file (default: <out>.map.json)");
  quotient->callback([&] {
    action = [&] {
      auto spec = io::load_network(io::read_json_file(q_network));
      auto partition = io::load_partition(io::read_json_file(q_partition), spec.net.graph);
      return emit_quotient(spec, quotient_network(spec.net, partition), q_out, q_map_out, out);
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitInputError;
  }

  try {
    return action();
  } catch (const NotFibrationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitPropertyFails;
  } catch (const IntegrationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitPropertyFails;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const io::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
}

}  // namespace netdyn
