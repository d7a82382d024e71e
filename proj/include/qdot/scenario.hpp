#pragma once

// Declarative scenario files: parsing with full static validation, seeded
// execution against the device/channel/qec layers, and the run report.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qdot/device.hpp"
#include "qdot/json_io.hpp"
#include "qdot/material.hpp"

namespace qdot {

inline constexpr int kScenarioSchemaVersion = 1;

/// Malformed scenario (exit code 2).
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical invariant of the simulation was breached (exit code 4).
class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DotSetup {
  GridPos pos;
  DotRole role;
  std::optional<double> T2_override;
};

struct Scenario {
  int schema_version = kScenarioSchemaVersion;
  std::uint64_t seed = 0;
  MaterialParams material;
  int width = 1;
  int height = 1;
  std::vector<DotSetup> dots;
  Representation representation = Representation::vector;
  bool strict = false;
  double readout_error = 0.0;
  double invariant_tolerance = 1e-9;  // allowed norm/trace/hermiticity drift of the state
  int shots = 1;
  std::string output;  // empty when not given
  std::vector<Json> program;  // validated events
};

struct ScenarioOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> shots;
  std::optional<std::string> output;
  std::optional<std::string> preset;
  bool strict = false;
};

/// Parses and statically validates every event; throws SchemaError.
Scenario parse_scenario(const Json& j, const ScenarioOverrides& overrides = {});

/// Reads the file, parses it as JSON and validates it; throws SchemaError.
Scenario load_scenario(const std::string& path, const ScenarioOverrides& overrides, std::string* raw_text = nullptr);

struct RunOutcome {
  int exit_code = 0;  // 0, 3 (physics) or 4 (invariant)
  Json report;  // complete report, or the partial report when failing
  std::vector<Json> event_log;  // first shot
  std::optional<Json> error;
};

/// Executes the program `shots` times. Shot s uses seed + s; event k of a shot
/// draws from stream k of that seed, so events never share randomness.
RunOutcome run_scenario(const Scenario& scenario, const std::string& digest);

/// Drive chain, exchange estimates, minimum Rabi field, Zeeman field ratio
/// g = 0.44 vs g = 15 and the pulse budget for one material.
Json resources_report(const MaterialParams& m);

/// "sha256:<hex>" of `text`.
std::string sha256_digest(const std::string& text);

}  // namespace qdot
