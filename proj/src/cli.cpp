#include "qdot/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qdot/channels.hpp"
#include "qdot/constants.hpp"
#include "qdot/json_io.hpp"
#include "qdot/material.hpp"
#include "qdot/pulses.hpp"
#include "qdot/qec.hpp"
#include "qdot/scenario.hpp"

namespace qdot {

namespace {

namespace fs = std::filesystem;

const char* const kUsage =
    "usage: qdot <subcommand> [options]\n"
    "\n"
    "subcommands:\n"
    "  resources  drive chain, exchange and budget numbers for a material preset\n"
    "  channel    swap / tunnel / teleport channel report\n"
    "  teleport   teleportation with per-branch fidelities (built-in or --scenario)\n"
    "  qec        five-qubit code cycles under a per-pulse Pauli error channel\n"
    "  simulate   run a scenario file (--scenario PATH)\n"
    "\n"
    "run 'qdot <subcommand> --help' for options\n";

void write_file(const fs::path& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << body;
}

int emit(const Json& j, const std::string& out_dir, const char* name, std::ostream& out) {
  const std::string body = dump_json(j) + "\n";
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / name, body);
  }
  out << body;
  return 0;
}

MaterialParams preset_material(const std::string& preset, std::optional<double> T2) {
  MaterialParams m = material_preset(preset);
  if (T2) {
    m.noise.T2 = *T2;
    if (m.name == "inas") m.noise.T1 = 2.0 * *T2;
  }
  return m;
}

struct SimulateFlags {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> shots;
  bool strict = false;
  std::optional<std::string> preset;
};

int simulate(const SimulateFlags& f, std::ostream& out, std::ostream& err) {
  ScenarioOverrides o;
  o.seed = f.seed;
  o.shots = f.shots;
  if (!f.out.empty()) o.output = f.out;
  o.preset = f.preset;
  o.strict = f.strict;
  std::string raw;
  Scenario s;
  try {
    s = load_scenario(f.scenario, o, &raw);
  } catch (const SchemaError& e) {
    err << dump_json(Json{{"error", "schema"}, {"message", e.what()}, {"exit_code", 2}}, -1) << "\n";
    return 2;
  }
  const RunOutcome r = run_scenario(s, sha256_digest(raw));
  if (!s.output.empty()) {
    fs::create_directories(s.output);
    write_file(fs::path(s.output) / "report.json", dump_json(r.report) + "\n");
    std::string lines;
    for (const auto& e : r.event_log) lines += dump_json(e, -1) + "\n";
    write_file(fs::path(s.output) / "events.jsonl", lines);
    if (r.error) {
      Json e = *r.error;
      e["exit_code"] = r.exit_code;
      write_file(fs::path(s.output) / "error.json", dump_json(e) + "\n");
    }
  }
  out << dump_json(r.report) << "\n";
  if (r.error) {
    Json e = *r.error;
    e["exit_code"] = r.exit_code;
    err << dump_json(e, -1) << "\n";
  }
  return r.exit_code;
}

Json builtin_teleport(double theta, double phi, bool noise, std::uint64_t seed) {
  MaterialParams m = inas_preset();
  m.noise.enabled = noise;
  DotArray array(3, 1, m, DeviceOptions{Representation::vector, false, 0.0, seed, {}});
  const GridPos c{0, 0}, a{1, 0}, b{2, 0};
  for (GridPos p : {c, a, b}) array.init_qubit(p);
  array.rabi_pulse(c, gates::rot(0, {0.0, 1.0, 0.0}, theta));
  array.rabi_pulse(c, gates::rz(0, phi));
  make_epr(array, a, b);

  StateVector<double> psi(2);
  psi << std::cos(theta / 2), std::polar(std::sin(theta / 2), phi);

  auto fidelity_at_b = [&](const DotArray& arr) {
    const std::array<int, 1> keep{arr.qubit_at(b)};
    const auto rho = reduced_density(*arr.state(), std::span<const int>(keep));
    return (psi.adjoint() * rho * psi)(0, 0).real();
  };

  Json j;
  j["payload"] = {{"theta", theta}, {"phi", phi}};
  j["noise"] = noise;
  j["epr_fidelity"] = bell_fidelity(array, a, b);
  Json branches = Json::array();
  double min_f = 1.0;
  for (int mc : {0, 1})
    for (int ma : {0, 1}) {
      DotArray copy = array;
      Rng unused(0);
      TeleportOptions opt;
      opt.force_phase = mc;
      opt.force_amplitude = ma;
      const auto r = teleport(copy, c, a, b, unused, opt);
      const double f = fidelity_at_b(copy);
      min_f = std::min(min_f, f);
      branches.push_back({{"phase_bit", mc}, {"amplitude_bit", ma}, {"probability", r.branch_probability},
                          {"fidelity", f}, {"clock_s", copy.clock()}});
    }
  j["branches"] = std::move(branches);
  j["min_branch_fidelity"] = min_f;
  Rng rng(seed);
  const auto r = teleport(array, c, a, b, rng);
  j["sampled"] = {{"phase_bit", r.phase_bit}, {"amplitude_bit", r.amplitude_bit}, {"fidelity", fidelity_at_b(array)}};
  return j;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  static const std::set<std::string> subcommands{"resources", "channel", "teleport", "qec", "simulate"};
  if (argc < 2) {
    err << kUsage;
    return kExitUsage;
  }
  const std::string first = argv[1];
  if (first == "-h" || first == "--help") {
    out << kUsage;
    return 0;
  }
  if (!subcommands.count(first)) {
    err << "unknown subcommand '" << first << "'\n" << kUsage;
    return kExitUsage;
  }

  CLI::App app{"qdot: enhancement-dot spin-qubit array simulator", "qdot"};
  app.require_subcommand(1);

  std::string preset = "inas";
  std::optional<double> T2;
  std::string out_dir;

  auto* resources = app.add_subcommand("resources", "drive chain, exchange and budget numbers");
  resources->add_option("--preset", preset)->check(CLI::IsMember({"inas", "si"}));
  resources->add_option("--t2", T2, "T2 in seconds (required for the si preset's T2-derived numbers)");
  resources->add_option("--out", out_dir);

  std::string kind = "swap";
  std::optional<int> length_qubits;
  std::optional<double> distance_m, lambda, t_hop;
  double threshold = 1e-4;
  int rounds = 0;
  auto* channel = app.add_subcommand("channel", "channel report");
  channel->add_option("--kind", kind)->check(CLI::IsMember({"swap", "tunnel", "teleport"}));
  channel->add_option("--length-qubits", length_qubits);
  channel->add_option("--distance-m", distance_m);
  channel->add_option("--preset", preset)->check(CLI::IsMember({"inas", "si"}));
  channel->add_option("--t2", T2);
  channel->add_option("--lambda", lambda);
  channel->add_option("--t-hop", t_hop);
  channel->add_option("--threshold", threshold);
  channel->add_option("--rounds", rounds, "purification rounds (teleport)");
  channel->add_option("--out", out_dir);

  SimulateFlags sim;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::optional<std::string> sim_preset;
  double theta = constants::pi / 2, phi = constants::pi / 2;
  bool noise = false;
  auto* tele = app.add_subcommand("teleport", "teleportation with per-branch fidelities");
  tele->add_option("--scenario", sim.scenario);
  tele->add_option("--seed", seed)->each([&](const std::string&) { seed_given = true; });
  tele->add_option("--out", out_dir);
  tele->add_option("--shots", sim.shots);
  tele->add_flag("--strict", sim.strict);
  tele->add_option("--preset", sim_preset)->check(CLI::IsMember({"inas", "si"}));
  tele->add_option("--theta", theta, "payload polar angle");
  tele->add_option("--phi", phi, "payload azimuth");
  tele->add_flag("--noise", noise, "enable T1/T2 noise in the built-in run");

  int cycles = 100;
  double p = 0.0;
  auto* qec = app.add_subcommand("qec", "five-qubit code cycles");
  qec->add_option("--cycles", cycles)->check(CLI::NonNegativeNumber);
  qec->add_option("--p", p)->check(CLI::Range(0.0, 1.0));
  qec->add_option("--seed", seed);
  qec->add_option("--out", out_dir);

  auto* simulate_cmd = app.add_subcommand("simulate", "run a scenario file");
  simulate_cmd->add_option("--scenario", sim.scenario)->required();
  simulate_cmd->add_option("--seed", seed)->each([&](const std::string&) { seed_given = true; });
  simulate_cmd->add_option("--out", out_dir);
  simulate_cmd->add_option("--shots", sim.shots);
  simulate_cmd->add_flag("--strict", sim.strict);
  simulate_cmd->add_option("--preset", sim_preset)->check(CLI::IsMember({"inas", "si"}));

  try {
    std::vector<std::string> args;
    for (int i = argc - 1; i >= 1; --i) args.emplace_back(argv[i]);
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (*resources) return emit(resources_report(preset_material(preset, T2)), out_dir, "resources.json", out);

    if (*channel) {
      const MaterialParams m = preset_material(preset, T2);
      if (!length_qubits && !distance_m) {
        err << "channel: give --length-qubits or --distance-m\n";
        return kExitUsage;
      }
      const ChannelKind k = *channel_kind_from_string(kind);
      if (k == ChannelKind::teleport) {
        TeleportBandwidthAssumptions a;
        a.fidelity_threshold = threshold;
        a.purification_rounds = rounds;
        const double d = distance_m ? *distance_m : *length_qubits * m.dot_pitch;
        Json j = to_json(teleport_bandwidth(d, m, a));
        j["reference_bps"] = 1.65e8;
        j["ratio_to_reference"] = j["true_bandwidth_bps"].get<double>() / 1.65e8;
        return emit(j, out_dir, "channel.json", out);
      }
      const int hops = length_qubits ? *length_qubits : static_cast<int>(std::llround(*distance_m / m.dot_pitch));
      ChannelSpec spec = make_channel_spec(k, straight_path(hops), m);
      if (lambda) spec.lambda = *lambda;
      if (t_hop) spec.t_hop = *t_hop;
      spec.fidelity_threshold = threshold;
      const auto report = k == ChannelKind::swap ? swap_channel_metrics(spec) : tunnel_channel_metrics(spec);
      return emit(to_json(report), out_dir, "channel.json", out);
    }

    if (*tele || *simulate_cmd) {
      if (seed_given) sim.seed = seed;
      sim.out = out_dir;
      sim.preset = sim_preset;
      if (!sim.scenario.empty()) return simulate(sim, out, err);
      return emit(builtin_teleport(theta, phi, noise, seed), out_dir, "teleport.json", out);
    }

    if (*qec) return emit(to_json(run_qec(cycles, p, seed)), out_dir, "qec.json", out);
  } catch (const std::exception& e) {
    err << dump_json(Json{{"error", "runtime"}, {"message", e.what()}, {"exit_code", 3}}, -1) << "\n";
    return 3;
  }
  err << kUsage;
  return kExitUsage;
}

}  // namespace qdot
