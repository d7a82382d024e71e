#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qdot/cli.hpp"
#include "qdot/json_io.hpp"

using namespace qdot;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "qdot");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string scenario_path(const std::string& name) {
  return std::string(QDOT_SOURCE_DIR) + "/scenarios/" + name;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = fs::temp_directory_path() / (std::string("qdot_cli_") + info->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  fs::path write(const std::string& name, const std::string& body) const {
    const fs::path p = path_ / name;
    std::ofstream(p, std::ios::binary) << body;
    return p;
  }

 private:
  fs::path path_;
};

const char* const kTwoQubitArray = R"("array": {"width": 2, "height": 1})";

std::string scenario_with(const std::string& program, const std::string& extra = "") {
  return std::string(R"({"schema_version": 1, "seed": 3, "material": "inas", )") + kTwoQubitArray + ", " + extra +
         R"("program": )" + program + "}";
}

}  // namespace

TEST(Cli, NoArgumentsOrUnknownSubcommandIsUsage) {
  EXPECT_EQ(cli({}).code, kExitUsage);
  const auto r = cli({"frobnicate"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("unknown subcommand"), std::string::npos);
  EXPECT_EQ(cli({"qec", "--no-such-flag"}).code, kExitUsage);
  EXPECT_EQ(cli({"--help"}).code, 0);
}

TEST(Cli, SimulateIsByteIdenticalAcrossRuns) {
  TempDir tmp;
  const auto a = tmp.path() / "a", b = tmp.path() / "b";
  for (const auto& name : {"bell.scenario", "teleport.scenario", "qec.scenario"}) {
    ASSERT_EQ(cli({"simulate", "--scenario", scenario_path(name), "--shots", "50", "--out", a.string()}).code, 0)
        << name;
    ASSERT_EQ(cli({"simulate", "--scenario", scenario_path(name), "--shots", "50", "--out", b.string()}).code, 0);
    EXPECT_EQ(slurp(a / "report.json"), slurp(b / "report.json")) << name;
    EXPECT_EQ(slurp(a / "events.jsonl"), slurp(b / "events.jsonl")) << name;
    EXPECT_FALSE(slurp(a / "report.json").empty());
  }
}

TEST(Cli, SeedOverrideChangesSampledOutcomes) {
  const auto a = cli({"simulate", "--scenario", scenario_path("bell.scenario"), "--shots", "200"});
  const auto b = cli({"simulate", "--scenario", scenario_path("bell.scenario"), "--shots", "200", "--seed", "99"});
  ASSERT_EQ(a.code, 0);
  ASSERT_EQ(b.code, 0);
  EXPECT_NE(Json::parse(a.out).at("shot_summary"), Json::parse(b.out).at("shot_summary"));
  EXPECT_EQ(Json::parse(b.out).at("seed").get<std::uint64_t>(), 99u);
}

TEST(Cli, BellScenarioIsPerfectlyCorrelated) {
  const auto r = cli({"simulate", "--scenario", scenario_path("bell.scenario")});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  const Json& s = j.at("shot_summary");
  const double zz = s.at("zz_correlation").get<double>();
  const double n = j.at("shots").get<double>();
  EXPECT_EQ(n, 10000);
  // binomial 3 sigma around the ideal value, with a floor for the zero-variance case
  EXPECT_LE(std::abs(zz - 1.0), std::max(3.0 * s.at("zz_correlation_stderr").get<double>(), 3.0 / n));
  const Json& h = s.at("histogram");
  EXPECT_FALSE(h.contains("01"));
  EXPECT_FALSE(h.contains("10"));
  const int n00 = h.value("00", 0), n11 = h.value("11", 0);
  EXPECT_EQ(n00 + n11, 10000);
  EXPECT_LT(std::abs(n00 - 5000), 3 * 50);
}

TEST(Cli, MalformedJsonIsSchemaErrorAndWritesNothing) {
  TempDir tmp;
  const auto out = tmp.path() / "out";
  const auto bad = tmp.write("bad.scenario", R"({"schema_version": 1, "seed": 1, )");
  const auto r = cli({"simulate", "--scenario", bad.string(), "--out", out.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(fs::exists(out));
  const Json e = Json::parse(r.err);
  EXPECT_EQ(e.at("error"), "schema");
  EXPECT_EQ(e.at("exit_code"), 2);
}

TEST(Cli, SchemaViolationsExitTwo) {
  TempDir tmp;
  const auto out = tmp.path() / "out";
  const std::vector<std::string> cases{
      R"({"seed": 1, "array": {"width": 1, "height": 1}, "program": []})",
      R"({"schema_version": 1, "array": {"width": 1, "height": 1}, "program": []})",
      R"({"schema_version": 2, "seed": 1, "array": {"width": 1, "height": 1}, "program": []})",
      scenario_with(R"([{"op": "init", "at": [5, 0]}])"),
      scenario_with(R"([{"op": "warp", "at": [0, 0]}])"),
      scenario_with(R"([{"op": "gate", "gate": "Q", "at": [0, 0]}])"),
      scenario_with("[]", R"("colour": "red", )"),
      scenario_with("[]", R"("invariant_tolerance": -1, )"),
      scenario_with("[]", R"("shots": 0, )"),
  };
  for (std::size_t k = 0; k < cases.size(); ++k) {
    const auto p = tmp.write("case" + std::to_string(k) + ".scenario", cases[k]);
    const auto r = cli({"simulate", "--scenario", p.string(), "--out", out.string()});
    EXPECT_EQ(r.code, 2) << cases[k] << "\n" << r.err;
    EXPECT_FALSE(fs::exists(out)) << cases[k];
  }
  EXPECT_EQ(cli({"simulate", "--scenario", (tmp.path() / "missing.scenario").string()}).code, 2);
}

TEST(Cli, BlockadeViolationExitsThreeWithErrorRecord) {
  TempDir tmp;
  const auto out = tmp.path() / "out";
  const auto p = tmp.write("double_init.scenario",
                           scenario_with(R"([{"op": "init", "at": [0, 0]}, {"op": "init", "at": [0, 0]}])"));
  const auto r = cli({"simulate", "--scenario", p.string(), "--out", out.string()});
  EXPECT_EQ(r.code, 3);
  const Json e = Json::parse(slurp(out / "error.json"));
  EXPECT_EQ(e.at("error"), "physics");
  EXPECT_EQ(e.at("event"), 1);
  EXPECT_EQ(e.at("exit_code"), 3);
  // the partial report and the log of the successful events are still written
  EXPECT_TRUE(Json::parse(slurp(out / "report.json")).contains("error"));
  std::istringstream log(slurp(out / "events.jsonl"));
  std::string line;
  int lines = 0;
  while (std::getline(log, line)) ++lines;
  EXPECT_EQ(lines, 1);
}

TEST(Cli, RoutingFailureExitsThree) {
  TempDir tmp;
  const auto p = tmp.write(
      "walled.scenario",
      R"({"schema_version": 1, "seed": 3, "material": "inas",
          "array": {"width": 3, "height": 1, "dots": [{"at": [1, 0], "role": "readout"}]},
          "program": [{"op": "init", "at": [0, 0]}, {"op": "route", "from": [0, 0], "to": [2, 0]}]})");
  const auto r = cli({"simulate", "--scenario", p.string()});
  EXPECT_EQ(r.code, 3) << r.err;
}

TEST(Cli, InvariantBreachExitsFour) {
  TempDir tmp;
  const auto out = tmp.path() / "out";
  // a zero tolerance trips on ordinary floating-point roundoff of the state norm
  const auto p = tmp.write("tight.scenario",
                           scenario_with(R"([{"op": "init", "at": [0, 0]}, {"op": "gate", "gate": "H", "at": [0, 0]},
                                             {"op": "gate", "gate": "T", "at": [0, 0]},
                                             {"op": "gate", "gate": "H", "at": [0, 0]}])",
                                         R"("invariant_tolerance": 0, )"));
  const auto r = cli({"simulate", "--scenario", p.string(), "--out", out.string()});
  EXPECT_EQ(r.code, 4) << r.out << r.err;
  const Json e = Json::parse(slurp(out / "error.json"));
  EXPECT_EQ(e.at("error"), "invariant");
  EXPECT_EQ(e.at("exit_code"), 4);
}

TEST(Cli, QecWithoutErrorsHasNoLogicalFailures) {
  const auto r = cli({"qec", "--cycles", "100", "--p", "0", "--seed", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j.at("logical_errors"), 0);
  EXPECT_EQ(j.at("logical_error_rate").get<double>(), 0.0);
  EXPECT_EQ(cli({"qec", "--cycles", "10", "--p", "2"}).code, kExitUsage);
}

TEST(Cli, ResourcesForInAs) {
  TempDir tmp;
  const auto r = cli({"resources", "--preset", "inas", "--out", tmp.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(slurp(tmp.path() / "resources.json"), r.out);
  const Json& d = j.at("drive");
  EXPECT_NEAR(d.at("B_ac_T").get<double>(), 71e-6, 0.71e-6);
  EXPECT_NEAR(d.at("I_ac_A").get<double>(), 36e-6, 0.72e-6);
  EXPECT_NEAR(d.at("V_ac_V").get<double>(), 1.8e-3, 0.036e-3);
  EXPECT_NEAR(d.at("P_W").get<double>(), 46e-9, 1.38e-9);
  EXPECT_NEAR(j.at("zeeman_field_ratio").at("field_ratio").get<double>(), 15.0 / 0.44, 1e-9);
}

TEST(Cli, ChannelSubcommand) {
  const auto r = cli({"channel", "--kind", "swap", "--length-qubits", "10"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j.at("hops"), 10);
  EXPECT_NEAR(j.at("latency_s").get<double>(), 10 * 4.1357e-10, 1e-13);
  // lambda defaults to t_swap / T2 with T2 = 100 us
  EXPECT_NEAR(j.at("true_bandwidth_bps").get<double>() / j.at("physical_bandwidth_bps").get<double>(),
              std::exp(-10 * 4.1357e-10 / 100e-6), 1e-9);
  const auto lit = cli({"channel", "--kind", "swap", "--length-qubits", "10", "--lambda", "1e-6"});
  ASSERT_EQ(lit.code, 0);
  const Json l = Json::parse(lit.out);
  EXPECT_NEAR(l.at("true_bandwidth_bps").get<double>() / l.at("physical_bandwidth_bps").get<double>(), 0.99999,
              1e-6);
  EXPECT_FALSE(j.at("max_distance_note").get<std::string>().empty());

  const auto t = cli({"channel", "--kind", "tunnel", "--length-qubits", "10"});
  ASSERT_EQ(t.code, 0);
  EXPECT_NEAR(Json::parse(t.out).at("t_hop_s").get<double>(), 4.1357e-11, 1e-14);

  const auto tb = cli({"channel", "--kind", "teleport", "--distance-m", "0.01"});
  ASSERT_EQ(tb.code, 0);
  const double ratio = Json::parse(tb.out).at("ratio_to_reference").get<double>();
  EXPECT_GT(ratio, 1.0 / 3);
  EXPECT_LT(ratio, 3.0);

  EXPECT_EQ(cli({"channel", "--kind", "swap"}).code, kExitUsage);
}

TEST(Cli, BuiltinTeleportBranchesAreFaithful) {
  const auto r = cli({"teleport", "--theta", "1.1", "--phi", "0.4", "--seed", "8"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  ASSERT_EQ(j.at("branches").size(), 4u);
  for (const auto& b : j.at("branches")) {
    EXPECT_GT(b.at("fidelity").get<double>(), 1 - 1e-9);
    EXPECT_NEAR(b.at("probability").get<double>(), 0.25, 1e-9);
  }
  EXPECT_GT(j.at("sampled").at("fidelity").get<double>(), 1 - 1e-9);
}

TEST(Cli, ReferenceNumbersScenario) {
  const auto r = cli({"simulate", "--scenario", scenario_path("reference_numbers.scenario")});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  const Json& ch = j.at("channels");
  ASSERT_EQ(ch.size(), 4u);
  // literal 1e-10 s per swap and lambda = 1e-6
  EXPECT_NEAR(ch[0].at("latency_s").get<double>(), 1e-9, 1e-21);
  EXPECT_NEAR(ch[0].at("physical_bandwidth_bps").get<double>(), 1e9, 1e-3);
  EXPECT_NEAR(ch[0].at("true_bandwidth_bps").get<double>(), 1e9 * std::exp(-1e-5), 1e-3);
  EXPECT_NEAR(ch[2].at("t_hop_s").get<double>(), ch[1].at("t_hop_s").get<double>() / 10, 1e-24);
  EXPECT_EQ(j.at("budgets").at("pulse_budget").at("cycles_in_T2").get<double>(), 10000.0);
  EXPECT_EQ(j.at("resources").at("zeeman_field_ratio").at("rounded_reference"), 30);
}
