#include "qdot/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace qdot {

std::string format_double(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s(buf);
  // keep it recognizably a float
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

namespace {

void dump_into(std::string& out, const Json& v, int indent, int depth) {
  const bool pretty = indent >= 0;
  auto newline = [&](int d) {
    if (!pretty) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += Json(it.key()).dump();
        out += pretty ? ": " : ":";
        dump_into(out, it.value(), indent, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      // Short numeric arrays (pairs, positions) stay on one line.
      const bool inline_array = v.size() <= 3 && std::all_of(v.begin(), v.end(), [](const Json& e) {
                                  return e.is_number();
                                });
      out += '[';
      bool first = true;
      for (const auto& e : v) {
        if (!first) out += inline_array && pretty ? ", " : ",";
        first = false;
        if (!inline_array) newline(depth + 1);
        dump_into(out, e, indent, depth + 1);
      }
      if (!inline_array) newline(depth);
      out += ']';
      return;
    }
    case Json::value_t::number_float:
      out += format_double(v.get<double>());
      return;
    default:
      out += v.dump();
      return;
  }
}

}  // namespace

std::string dump_json(const Json& value, int indent) {
  std::string out;
  dump_into(out, value, indent, 0);
  return out;
}

Json state_to_json(const State& state) {
  Json j;
  j["n_qubits"] = state.n_qubits();
  j["representation"] = state.is_vector() ? "vector" : "matrix";
  j["qubit_order"] = "qubit 0 is the most significant bit of the basis index";
  Json entries = Json::array();
  auto push = [&](std::complex<double> z) { entries.push_back(Json::array({z.real(), z.imag()})); };
  if (state.is_vector()) {
    for (Eigen::Index i = 0; i < state.dim(); ++i) push(state.amplitudes()(i));
  } else {
    const auto& m = state.density_matrix();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) push(m(r, c));
  }
  j["entries"] = std::move(entries);
  return j;
}

State state_from_json(const Json& j, StateLimits limits) {
  const int n = j.at("n_qubits").get<int>();
  const std::string rep = j.at("representation").get<std::string>();
  const auto& entries = j.at("entries");
  if (n < 1 || n > 30) throw StateError("n_qubits out of range");
  const Eigen::Index d = Eigen::Index(1) << n;
  auto entry = [&](std::size_t k) {
    const auto& e = entries.at(k);
    return std::complex<double>(e.at(0).get<double>(), e.at(1).get<double>());
  };
  if (rep == "vector") {
    if (entries.size() != static_cast<std::size_t>(d)) throw StateError("wrong number of entries");
    StateVector<double> v(d);
    for (Eigen::Index i = 0; i < d; ++i) v(i) = entry(static_cast<std::size_t>(i));
    return State::from_vector(std::move(v), limits);
  }
  if (rep == "matrix") {
    if (entries.size() != static_cast<std::size_t>(d * d)) throw StateError("wrong number of entries");
    DensityMatrix<double> m(d, d);
    for (Eigen::Index r = 0; r < d; ++r)
      for (Eigen::Index c = 0; c < d; ++c) m(r, c) = entry(static_cast<std::size_t>(r * d + c));
    return State::from_density(std::move(m), limits);
  }
  throw StateError("unknown representation '" + rep + "'");
}

}  // namespace qdot
