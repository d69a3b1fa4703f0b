#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "netdyn/cli.hpp"
#include "netdyn/io.hpp"
#include "support/temp_dir.hpp"

using namespace netdyn;
using namespace netdyn::testing;
using netdyn::io::json;

namespace {

const std::string kNetworks = std::string(NETDYN_NETWORKS_DIR) + "/";

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

std::vector<std::string> map_args(const std::string& cmd, const std::string& dom,
                                  const std::string& cod, const std::string& map) {
  return {cmd, "--domain", kNetworks + dom, "--codomain", kNetworks + cod, "--map", kNetworks + map};
}

}  // namespace

TEST(Cli, ValidateOk) {
  auto r = run({"validate", "--network", kNetworks + "driven10_linear.json"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out, "ok\n");
}

TEST(Cli, ValidateMalformedJsonGivesLineAndColumn) {
  TempDir tmp;
  write(tmp.file("bad.json"), "{\n  \"nodes\": [,\n}");
  auto r = run({"validate", "--network", tmp.file("bad.json")});
  EXPECT_EQ(r.code, kExitInputError);
  EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;
}

TEST(Cli, ValidateSemanticErrorIsStructured) {
  TempDir tmp;
  write(tmp.file("bad.json"), R"({"nodes": [{"id": "a", "dim": 1, "space": "euclidean",
    "dynamics": ["u[0][0]"]}], "edges": []})");
  auto r = run({"validate", "--network", tmp.file("bad.json")});
  EXPECT_EQ(r.code, kExitInputError);
  EXPECT_NE(r.err.find("'a'"), std::string::npos) << r.err;
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run({}).code, kExitInputError);
  EXPECT_EQ(run({"frobnicate"}).code, kExitInputError);
  EXPECT_EQ(run({"validate"}).code, kExitInputError);
  EXPECT_EQ(run({"validate", "--network", kNetworks + "nope.json"}).code, kExitInputError);
}

TEST(Cli, HelpExitsZero) {
  auto r = run({"--help"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("minbase"), std::string::npos);
}

TEST(Cli, FibrationAcceptedWithWitness) {
  auto r = run(map_args("fibration", "fan_in.json", "primed_chain.json", "fan_in_to_chain.map.json"));
  EXPECT_EQ(r.code, kExitOk) << r.err;
  auto j = json::parse(r.out);
  EXPECT_EQ(j["fibration"], true);
  EXPECT_EQ(j["witness"]["b"], json::parse(R"({"gamma'": "gamma", "delta'": "delta"})"));
}

TEST(Cli, FibrationRejectedWithCounterexample) {
  auto r = run(map_args("fibration", "parallel_pair.json", "single_edge.json", "collapse.map.json"));
  EXPECT_EQ(r.code, kExitPropertyFails);
  auto j = json::parse(r.out);
  EXPECT_EQ(j["fibration"], false);
  EXPECT_EQ(j["node"], "b");
  EXPECT_EQ(j["codomain_edge"], "e");
  EXPECT_EQ(j["lifts"], 2);
}

TEST(Cli, NonCommutingMapIsAnInputError) {
  TempDir tmp;
  write(tmp.file("map.json"), R"({"nodes": {"a1": "a", "a2": "c", "b": "b"},
                                  "edges": {"gamma": "gamma'", "delta": "delta'"}})");
  auto r = run({"fibration", "--domain", kNetworks + "fan_in.json", "--codomain",
                kNetworks + "primed_chain.json", "--map", tmp.file("map.json")});
  EXPECT_EQ(r.code, kExitInputError);
}

TEST(Cli, PullbackCopiesDynamicsText) {
  TempDir tmp;
  auto args = map_args("pullback", "fan_in.json", "primed_chain.json", "fan_in_to_chain.map.json");
  args.insert(args.end(), {"--out", tmp.file("pulled.json")});
  auto r = run(args);
  ASSERT_EQ(r.code, kExitOk) << r.err;

  auto pulled = io::read_json_file(tmp.file("pulled.json"));
  auto codomain = io::read_json_file(kNetworks + "primed_chain.json");
  auto dynamics_of = [](const json& net, const std::string& id) {
    for (const auto& n : net["nodes"]) {
      if (n["id"] == id) return n["dynamics"];
    }
    return json();
  };
  EXPECT_EQ(dynamics_of(pulled, "a1"), dynamics_of(codomain, "a"));
  EXPECT_EQ(dynamics_of(pulled, "a2"), dynamics_of(codomain, "a"));

  EXPECT_EQ(run({"validate", "--network", tmp.file("pulled.json")}).code, kExitOk);
  auto conj = run({"conjugacy", "--domain", tmp.file("pulled.json"), "--codomain",
                   kNetworks + "primed_chain.json", "--map", kNetworks + "fan_in_to_chain.map.json"});
  EXPECT_EQ(conj.code, kExitOk) << conj.err;
  EXPECT_LE(json::parse(conj.out)["max_residual"].get<double>(), 1e-12);
}

TEST(Cli, PullbackAlongNonFibrationExitsOne) {
  TempDir tmp;
  write(tmp.file("single.json"), R"({"nodes": [
      {"id": "a", "dim": 1, "space": "euclidean", "dynamics": ["-x[0]"]},
      {"id": "b", "dim": 1, "space": "euclidean", "dynamics": ["u[0][0]"]}],
    "edges": [{"id": "e", "src": "a", "tgt": "b"}]})");
  auto r = run({"pullback", "--domain", kNetworks + "parallel_pair.json", "--codomain",
                tmp.file("single.json"), "--map", kNetworks + "collapse.map.json", "--out",
                tmp.file("out.json")});
  EXPECT_EQ(r.code, kExitPropertyFails);
}

TEST(Cli, ConjugacyReport) {
  auto args = map_args("conjugacy", "fan_in.json", "primed_chain.json", "fan_in_to_chain.map.json");
  args.insert(args.end(), {"--samples", "17", "--seed", "5"});
  auto r = run(args);
  ASSERT_EQ(r.code, kExitOk) << r.err;
  auto j = json::parse(r.out);
  EXPECT_EQ(j["samples"], 17);
  EXPECT_EQ(j["seed"], 5);
  EXPECT_EQ(j["max_residual"], 0.0);
  EXPECT_EQ(j["residual_per_node"].size(), 3u);
}

TEST(Cli, ConjugacyNeedsCodomainDynamics) {
  auto r = run(map_args("conjugacy", "parallel_pair.json", "single_edge.json", "collapse.map.json"));
  EXPECT_EQ(r.code, kExitInputError);
}

TEST(Cli, SemiconjugacyOnDriverInclusion) {
  auto args = map_args("semiconjugacy", "driver3.json", "driven10_tanh.json", "driver_inclusion.map.json");
  args.insert(args.end(), {"--x0", kNetworks + "driven10_x0.json", "--h", "1e-3", "--t", "1"});
  auto r = run(args);
  ASSERT_EQ(r.code, kExitOk) << r.err;
  auto j = json::parse(r.out);
  EXPECT_EQ(j["steps"], 1000);
  EXPECT_LE(j["max_deviation"].get<double>(), 1e-10);
}

TEST(Cli, SimulateIsDeterministic) {
  TempDir tmp;
  auto args = std::vector<std::string>{"simulate", "--network", kNetworks + "driven10_linear.json",
                                       "--x0", kNetworks + "driven10_x0.json", "--h", "0.01", "--t", "0.5",
                                       "--out", tmp.file("a.csv")};
  ASSERT_EQ(run(args).code, kExitOk);
  args.back() = tmp.file("b.csv");
  ASSERT_EQ(run(args).code, kExitOk);
  const auto a = slurp(tmp.file("a.csv"));
  EXPECT_EQ(a, slurp(tmp.file("b.csv")));

  std::istringstream lines(a);
  std::string header, row;
  std::getline(lines, header);
  EXPECT_EQ(header, "t,1.0,10.0,2.0,3.0,4.0,5.0,6.0,7.0,8.0,9.0");
  std::size_t rows = 0;
  while (std::getline(lines, row)) {
    ++rows;
    EXPECT_EQ(std::count(row.begin(), row.end(), ','), 10);
  }
  EXPECT_EQ(rows, 51u);
}

TEST(Cli, SimulateMissingInitialConditionExitsTwo) {
  TempDir tmp;
  write(tmp.file("x0.json"), R"({"1": [0.1]})");
  auto r = run({"simulate", "--network", kNetworks + "driven10_linear.json", "--x0",
                tmp.file("x0.json"), "--h", "0.1", "--t", "1", "--out", tmp.file("x.csv")});
  EXPECT_EQ(r.code, kExitInputError);
}

TEST(Cli, SimulateBlowUpExitsOne) {
  TempDir tmp;
  write(tmp.file("net.json"), R"({"nodes": [{"id": "a", "dim": 1, "space": "euclidean",
    "dynamics": ["x[0]^2"]}], "edges": []})");
  write(tmp.file("x0.json"), R"({"a": [1]})");
  auto r = run({"simulate", "--network", tmp.file("net.json"), "--x0", tmp.file("x0.json"), "--h",
                "0.1", "--t", "10", "--out", tmp.file("x.csv")});
  EXPECT_EQ(r.code, kExitPropertyFails);
  EXPECT_NE(r.err.find("step"), std::string::npos);
}

TEST(Cli, SimulateBadStepExitsTwo) {
  TempDir tmp;
  auto r = run({"simulate", "--network", kNetworks + "driven10_linear.json", "--x0",
                kNetworks + "driven10_x0.json", "--h", "0", "--t", "1", "--out", tmp.file("x.csv")});
  EXPECT_EQ(r.code, kExitInputError);
}

TEST(Cli, MinbaseMergesFibers) {
  TempDir tmp;
  auto r = run({"minbase", "--network", kNetworks + "fan_in_dynamics.json", "--out", tmp.file("base.json")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  auto j = json::parse(r.out);
  EXPECT_EQ(j["partition"], json::parse(R"([["a1", "a2"], ["b"]])"));
  auto base = io::load_network(io::read_json_file(tmp.file("base.json")));
  EXPECT_EQ(base.net.graph.node_count(), 2u);
  EXPECT_EQ(base.net.graph.edge_count(), 2u);
  auto map = io::read_json_file(tmp.file("base.map.json"));
  EXPECT_EQ(map["nodes"]["a2"], "a1");

  // the projection is a fibration between the two files
  auto fib = run({"fibration", "--domain", kNetworks + "fan_in_dynamics.json", "--codomain",
                  tmp.file("base.json"), "--map", tmp.file("base.map.json")});
  EXPECT_EQ(fib.code, kExitOk) << fib.err;
}

TEST(Cli, MinbaseKeepsDifferentDynamicsApart) {
  TempDir tmp;
  auto r = run({"minbase", "--network", kNetworks + "driven10_linear.json", "--out",
                tmp.file("base.json"), "--map-out", tmp.file("q.json")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  auto j = json::parse(r.out);
  EXPECT_EQ(j["partition"], json::parse(R"([["1"], ["10", "4", "7"], ["2"], ["3"], ["5", "8"], ["6", "9"]])"));
  EXPECT_TRUE(io::read_json_file(tmp.file("q.json")).is_object());
}

TEST(Cli, QuotientByGivenPartition) {
  TempDir tmp;
  write(tmp.file("net.json"), R"({"nodes": [
      {"id": "a1", "dim": 1, "space": "euclidean", "dynamics": ["-x[0]"]},
      {"id": "a2", "dim": 1, "space": "euclidean", "dynamics": ["-x[0]"]},
      {"id": "b", "dim": 1, "space": "euclidean", "dynamics": ["u[0][0] - u[1][0]"]}],
    "edges": [{"id": "gamma", "src": "a1", "tgt": "b"}, {"id": "delta", "src": "a2", "tgt": "b"}]})");
  write(tmp.file("p.json"), R"({"blocks": [["a1", "a2"], ["b"]]})");
  auto r = run({"quotient", "--network", tmp.file("net.json"), "--partition", tmp.file("p.json"),
                "--out", tmp.file("base.json")});
  EXPECT_EQ(r.code, kExitOk) << r.err;

  write(tmp.file("p2.json"), R"({"blocks": [["a1"], ["a2", "b"]]})");
  auto unbalanced = run({"quotient", "--network", tmp.file("net.json"), "--partition",
                         tmp.file("p2.json"), "--out", tmp.file("base2.json")});
  EXPECT_EQ(unbalanced.code, kExitPropertyFails);
  EXPECT_EQ(json::parse(unbalanced.out)["balanced"], false);

  write(tmp.file("p3.json"), R"({"blocks": [["a1"], ["b"]]})");
  EXPECT_EQ(run({"quotient", "--network", tmp.file("net.json"), "--partition", tmp.file("p3.json"),
                 "--out", tmp.file("base3.json")})
                .code,
            kExitInputError);
}

TEST(Cli, QuotientInconsistentFamilyExitsOne) {
  TempDir tmp;
  write(tmp.file("net.json"), R"({"nodes": [
      {"id": "a1", "dim": 1, "space": "euclidean", "dynamics": ["-x[0]"]},
      {"id": "a2", "dim": 1, "space": "euclidean", "dynamics": ["-2*x[0]"]},
      {"id": "b", "dim": 1, "space": "euclidean", "dynamics": ["u[0][0]"]}],
    "edges": [{"id": "gamma", "src": "a1", "tgt": "b"}, {"id": "delta", "src": "a2", "tgt": "b"}]})");
  write(tmp.file("p.json"), R"({"blocks": [["a1", "a2"], ["b"]]})");
  auto r = run({"quotient", "--network", tmp.file("net.json"), "--partition", tmp.file("p.json"),
                "--out", tmp.file("base.json")});
  EXPECT_EQ(r.code, kExitPropertyFails);
  auto j = json::parse(r.out);
  EXPECT_EQ(j["family"]["consistent"], false);
}
