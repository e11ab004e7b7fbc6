#pragma once

// JSON and CSV forms of loops, reports, degrees, trajectories and branches.

#include "nvortex/continuation.hpp"
#include "nvortex/degree.hpp"
#include "nvortex/robin.hpp"

#include <nlohmann/json.hpp>

#include <iomanip>
#include <ostream>
#include <sstream>

namespace nvortex::io {

using json = nlohmann::json;

inline json vec_json(const Vec& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

inline Vec vec_from_json(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vec>(values.data(), static_cast<Eigen::Index>(values.size()));
}

/// {n, N, coefficients}: coefficients[i] holds alpha_k for k = i - n.
inline json loop_json(const FourierLoop& u) {
  json coeffs = json::array();
  for (int k = -u.order(); k <= u.order(); ++k) coeffs.push_back(vec_json(u.mode(k)));
  return {{"n", u.order()}, {"N", u.points()}, {"coefficients", coeffs}};
}

inline FourierLoop loop_from_json(const json& j) {
  const int n = j.at("n").get<int>();
  const auto pts = j.at("N").get<Eigen::Index>();
  const json& coeffs = j.at("coefficients");
  if (!coeffs.is_array() || coeffs.size() != static_cast<std::size_t>(2 * n + 1))
    throw InvalidArgument("loop JSON needs 2n+1 coefficient blocks");
  FourierLoop u(n, pts);
  for (int k = -n; k <= n; ++k) {
    const Vec a = vec_from_json(coeffs[static_cast<std::size_t>(k + n)]);
    if (a.size() != u.block()) throw InvalidArgument("loop JSON block has the wrong length");
    u.mode(k) = a;
  }
  return u;
}

inline json complex_json(const CVec& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back({v[i].real(), v[i].imag()});
  return out;
}

inline json spectral_json(const SpectralReport& rep) {
  json j{{"eigenvalues", complex_json(rep.eigenvalues)},
         {"periodic_dimension", rep.periodic_dimension},
         {"nondegenerate", rep.nondegenerate}};
  j["gamma_periodic_dimension"] = rep.gamma_periodic_dimension ? json(*rep.gamma_periodic_dimension) : json(nullptr);
  return j;
}

inline json equilibrium_json(const RelativeEquilibrium& eq) {
  return {{"z", vec_json(eq.z.coords())},
          {"omega", eq.omega},
          {"residual_norm", eq.residual_norm},
          {"iterations", eq.iterations}};
}

/// Sparse {"k": d_k} map.
inline json degree_json(const DegreeVector& d) {
  json j = json::object();
  for (const auto& [k, v] : d.entries()) j[std::to_string(k)] = v;
  return j;
}

inline DegreeVector degree_from_json(const json& j) {
  DegreeVector d;
  for (const auto& [key, value] : j.items()) d.set(std::stoi(key), value.get<int>());
  return d;
}

inline json critical_point_json(const CriticalPointReport& c) {
  return {{"location", {c.location.x(), c.location.y()}},
          {"gradient_norm", c.gradient_norm},
          {"hessian", {{c.hessian(0, 0), c.hessian(0, 1)}, {c.hessian(1, 0), c.hessian(1, 1)}}},
          {"index", c.brouwer_index},
          {"stable", c.stable},
          {"nondegenerate", c.nondegenerate}};
}

inline json diagnostics_json(const BranchDiagnostics& d) {
  auto finite = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
  return {{"residual", d.residual},
          {"min_pair_distance", finite(d.min_pair_distance)},
          {"boundary_margin", finite(d.boundary_margin)},
          {"diagonal_norm", d.diagonal_norm},
          {"orbit_distance", d.orbit_distance},
          {"tail_fraction", d.tail_fraction},
          {"iterations", d.iterations}};
}

inline json branch_point_json(const BranchPoint& p) {
  return {{"r", p.r}, {"fold", p.fold}, {"diagnostics", diagnostics_json(p.diagnostics)}, {"loop", loop_json(p.u)}};
}

namespace detail {

inline std::ostream& precise(std::ostream& os) { return os << std::setprecision(17); }

}  // namespace detail

/// One BranchPoint per line.
inline void write_branch_jsonl(std::ostream& os, const Branch& br) {
  for (const auto& p : br.points) os << branch_point_json(p).dump() << '\n';
}

inline void write_branch_csv(std::ostream& os, const Branch& br) {
  detail::precise(os);
  os << "r,residual,min_pair_distance,boundary_margin,diagonal_norm,orbit_distance,tail_fraction,fold\n";
  for (const auto& p : br.points) {
    const auto& d = p.diagnostics;
    os << p.r << ',' << d.residual << ',' << d.min_pair_distance << ',' << d.boundary_margin << ',' << d.diagonal_norm
       << ',' << d.orbit_distance << ',' << d.tail_fraction << ',' << (p.fold ? 1 : 0) << '\n';
  }
}

/// Columns t, x1, y1, ..., xN, yN.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  if (traj.empty()) return;
  detail::precise(os);
  const Eigen::Index n = traj.states.front().size() / 2;
  os << 't';
  for (Eigen::Index k = 1; k <= n; ++k) os << ",x" << k << ",y" << k;
  os << '\n';
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    os << traj.times[i];
    for (Eigen::Index c = 0; c < traj.states[i].size(); ++c) os << ',' << traj.states[i][c];
    os << '\n';
  }
}

/// Loop sampled at m nodes, physical coordinates a0^ + r u(t / r^2).
inline void write_loop_csv(std::ostream& os, const LoopProblem& p, const FourierLoop& u, int m) {
  detail::precise(os);
  os << 't';
  for (Eigen::Index k = 1; k <= u.points(); ++k) os << ",x" << k << ",y" << k;
  os << '\n';
  for (int j = 0; j < m; ++j) {
    const double s = kTwoPi * j / m;
    const double t = p.r > 0.0 ? s * p.r * p.r : s;
    const Vec z = p.r > 0.0 ? physical_state(p, u, t) : u.evaluate(s);
    os << t;
    for (Eigen::Index c = 0; c < z.size(); ++c) os << ',' << z[c];
    os << '\n';
  }
}

}  // namespace nvortex::io
