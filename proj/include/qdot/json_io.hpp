#pragma once

#include <nlohmann/json.hpp>

#include <string>

#include "qdot/qstate.hpp"

namespace qdot {

using Json = nlohmann::ordered_json;

/// Serializes `value` with every floating-point number printed with 17
/// significant digits ("%.17g"), so output is byte-stable and round-trips.
/// indent < 0 gives a single line.
std::string dump_json(const Json& value, int indent = 2);

/// {n_qubits, representation, qubit_order, entries: [[re, im], ...]} in index
/// order (row-major for density matrices).
Json state_to_json(const State& state);
State state_from_json(const Json& j, StateLimits limits = {});

std::string format_double(double x);

}  // namespace qdot
