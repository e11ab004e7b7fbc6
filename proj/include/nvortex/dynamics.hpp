#pragma once

// Time integration of Gamma_k z_k' = J grad_{z_k} H_Omega(z).

#include "nvortex/hamiltonian.hpp"

#include <boost/numeric/odeint.hpp>

#include <string>
#include <vector>

namespace nvortex {

struct IntegratorConfig {
  enum class Method { DormandPrince, ImplicitMidpoint };
  Method method = Method::DormandPrince;
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  /// Upper bound on |dt|; the fixed step of the implicit midpoint rule.
  double max_step = 1e-2;
  double collision_floor = 1e-9;
  /// Record every accepted step when true, otherwise only the endpoints.
  bool record_steps = true;

  void validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw InvalidArgument("integrator tolerances must be positive");
    if (!(max_step > 0.0)) throw InvalidArgument("max_step must be positive");
    if (!(collision_floor > 0.0)) throw InvalidArgument("collision_floor must be positive");
  }
};

enum class TrajectoryEnd { Completed, CollisionEvent, BlowupEvent };

inline const char* to_string(TrajectoryEnd e) {
  switch (e) {
    case TrajectoryEnd::Completed: return "completed";
    case TrajectoryEnd::CollisionEvent: return "collision";
    case TrajectoryEnd::BlowupEvent: return "blowup";
  }
  return "?";
}

struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> states;
  TrajectoryEnd end = TrajectoryEnd::Completed;
  std::string detail;

  bool empty() const { return times.empty(); }
  const Vec& final_state() const { return states.back(); }
};

namespace detail {

inline double min_pair_distance(const Vec& z) {
  double m = std::numeric_limits<double>::infinity();
  const Eigen::Index n = z.size() / 2;
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = j + 1; k < n; ++k) m = std::min(m, (point(z, j) - point(z, k)).norm());
  return m;
}

struct CollisionSignal {};

inline Trajectory integrate_dopri(const VortexSystem& sys, const Vec& z0, double t_end, const IntegratorConfig& cfg) {
  using State = std::vector<double>;
  namespace odeint = boost::numeric::odeint;

  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(z0);
  if (t_end == 0.0) return traj;

  auto rhs = [&](const State& x, State& dx, double) {
    const Eigen::Map<const Vec> z(x.data(), static_cast<Eigen::Index>(x.size()));
    Vec v;
    try {
      v = vector_field(sys, Vec(z));
    } catch (const CollisionError&) {
      throw CollisionSignal{};
    } catch (const OutsideDomainError&) {
      throw CollisionSignal{};
    }
    dx.assign(v.data(), v.data() + v.size());
  };

  const double dir = t_end > 0.0 ? 1.0 : -1.0;
  // the step bound carries the sign of the integration direction
  auto stepper =
      odeint::make_controlled(cfg.abs_tol, cfg.rel_tol, dir * cfg.max_step, odeint::runge_kutta_dopri5<State>());
  State x(z0.data(), z0.data() + z0.size());
  double t = 0.0;
  double dt = dir * std::min(cfg.max_step, std::abs(t_end)) * 1e-2;
  const double dt_floor = 1e-14 * std::max(1.0, std::abs(t_end));

  while (dir * (t_end - t) > 0.0) {
    if (dir * (t + dt - t_end) > 0.0) dt = t_end - t;
    odeint::controlled_step_result res;
    try {
      res = stepper.try_step(rhs, x, t, dt);
    } catch (const CollisionSignal&) {
      dt *= 0.5;
      if (std::abs(dt) < dt_floor) {
        traj.end = TrajectoryEnd::CollisionEvent;
        traj.detail = "vortices met the singular set at t=" + std::to_string(t);
        return traj;
      }
      continue;
    }
    if (res == odeint::success) {
      const Vec z = Eigen::Map<const Vec>(x.data(), static_cast<Eigen::Index>(x.size()));
      const bool last = dir * (t_end - t) <= 0.0;
      if (cfg.record_steps || last) {
        traj.times.push_back(t);
        traj.states.push_back(z);
      }
      if (min_pair_distance(z) < cfg.collision_floor) {
        if (!cfg.record_steps && !last) {
          traj.times.push_back(t);
          traj.states.push_back(z);
        }
        traj.end = TrajectoryEnd::CollisionEvent;
        traj.detail = "minimum vortex distance below collision floor at t=" + std::to_string(t);
        return traj;
      }
    } else if (std::abs(dt) < dt_floor) {
      traj.end = TrajectoryEnd::BlowupEvent;
      traj.detail = "step size underflow at t=" + std::to_string(t);
      return traj;
    }
  }
  return traj;
}

inline Trajectory integrate_midpoint(const VortexSystem& sys, const Vec& z0, double t_end,
                                     const IntegratorConfig& cfg) {
  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(z0);
  if (t_end == 0.0) return traj;
  const auto steps = static_cast<long>(std::ceil(std::abs(t_end) / cfg.max_step));
  const double h = t_end / static_cast<double>(steps);
  const Mat jn = symplectic_matrix(sys.size());
  const Mat minv_j = sys.vorticity_matrix().inverse() * jn;
  Vec z = z0;
  for (long s = 0; s < steps; ++s) {
    Vec w = z;
    bool converged = false;
    try {
      w = z + h * vector_field(sys, z);
      for (int it = 0; it < 50; ++it) {
        const Vec mid = 0.5 * (z + w);
        const auto rep = domain_energy(sys, mid, true);
        const Vec resid = w - z - h * velocity_from_gradient(sys, rep.gradient);
        const Mat jac = Mat::Identity(sys.dim(), sys.dim()) - 0.5 * h * minv_j * (*rep.hessian);
        const Vec delta = jac.partialPivLu().solve(-resid);
        w += delta;
        if (delta.norm() <= cfg.abs_tol + cfg.rel_tol * w.norm()) {
          converged = true;
          break;
        }
      }
    } catch (const CollisionError&) {
      traj.end = TrajectoryEnd::CollisionEvent;
    } catch (const OutsideDomainError&) {
      traj.end = TrajectoryEnd::CollisionEvent;
    }
    if (traj.end == TrajectoryEnd::CollisionEvent) {
      traj.detail = "implicit stage met the singular set near t=" + std::to_string(traj.times.back());
      return traj;
    }
    if (!converged) {
      traj.end = TrajectoryEnd::BlowupEvent;
      traj.detail = "implicit midpoint iteration failed near t=" + std::to_string(traj.times.back());
      return traj;
    }
    z = w;
    const double t = (s + 1 == steps) ? t_end : h * static_cast<double>(s + 1);
    if (cfg.record_steps || s + 1 == steps) {
      traj.times.push_back(t);
      traj.states.push_back(z);
    }
    if (min_pair_distance(z) < cfg.collision_floor) {
      traj.end = TrajectoryEnd::CollisionEvent;
      traj.detail = "minimum vortex distance below collision floor at t=" + std::to_string(t);
      return traj;
    }
  }
  return traj;
}

}  // namespace detail

/// Integrates from t = 0 to t_end (negative t_end integrates backward).
/// Collisions and step underflow end the run early and are reported on the trajectory.
inline Trajectory integrate(const VortexSystem& sys, const Vec& z0, double t_end, const IntegratorConfig& cfg = {}) {
  cfg.validate();
  detail::require_distinct(sys, z0);
  detail::require_in_domain(sys.domain(), z0);
  if (cfg.method == IntegratorConfig::Method::ImplicitMidpoint) return detail::integrate_midpoint(sys, z0, t_end, cfg);
  return detail::integrate_dopri(sys, z0, t_end, cfg);
}

struct DriftReport {
  double energy = 0.0;
  double center_of_vorticity = 0.0;
  double angular_impulse = 0.0;

  double max() const { return std::max({energy, center_of_vorticity, angular_impulse}); }
};

/// Max relative drift of H0, Q = sum Gamma_k z_k and I = sum Gamma_k |z_k|^2 from their initial values.
/// Each drift is divided by max(|initial value|, natural scale), the scales being
/// (1/2pi) sum_{j!=k} |Gamma_j Gamma_k|, sum |Gamma_k||z_k| and sum |Gamma_k||z_k|^2 at t = 0.
inline DriftReport invariant_drift(const VortexSystem& sys, const Trajectory& traj) {
  if (traj.empty()) throw InvalidArgument("empty trajectory");
  if (sys.domain().has_regular_part())
    throw PreconditionError("invariant drift monitors whole-plane first integrals only");
  const Vec& z0 = traj.states.front();
  double pair_scale = 0.0, q_scale = 0.0, i_scale = 0.0;
  for (Eigen::Index j = 0; j < sys.size(); ++j) {
    q_scale += std::abs(sys.strength(j)) * point(z0, j).norm();
    i_scale += std::abs(sys.strength(j)) * point(z0, j).squaredNorm();
    for (Eigen::Index k = 0; k < sys.size(); ++k)
      if (j != k) pair_scale += std::abs(sys.strength(j) * sys.strength(k));
  }
  pair_scale /= kTwoPi;
  const double h0 = sys.size() > 1 ? h0_energy(sys, z0) : 0.0;
  const Vec2 q0 = sys.center_of_vorticity(z0);
  const double i0 = sys.angular_impulse(z0);
  const auto denom = [](double initial, double scale) { return std::max({std::abs(initial), scale, 1e-300}); };

  DriftReport d;
  for (const auto& z : traj.states) {
    const double h = sys.size() > 1 ? h0_energy(sys, z) : 0.0;
    d.energy = std::max(d.energy, std::abs(h - h0) / denom(h0, pair_scale));
    d.center_of_vorticity = std::max(d.center_of_vorticity, (sys.center_of_vorticity(z) - q0).norm() / denom(q0.norm(), q_scale));
    d.angular_impulse = std::max(d.angular_impulse, std::abs(sys.angular_impulse(z) - i0) / denom(i0, i_scale));
  }
  return d;
}

}  // namespace nvortex
