#pragma once

// Tracing the branch r -> u^(r) of periodic loops that emanates from a relative
// equilibrium orbit S^1 * Z at r = 0, with termination classification.

#include "nvortex/dynamics.hpp"
#include "nvortex/periodic.hpp"

#include <functional>
#include <string>
#include <vector>

namespace nvortex {

struct BranchDiagnostics {
  double residual = 0.0;
  /// min over the period of the pairwise distances of a0^ + r u.
  double min_pair_distance = 0.0;
  /// min over the period of the distance of a0^ + r u to the domain boundary.
  double boundary_margin = 0.0;
  /// r ||P_D u||_X.
  double diagonal_norm = 0.0;
  /// Distance of u - P_D u to the orbit S^1 * Z in X.
  double orbit_distance = 0.0;
  double tail_fraction = 0.0;
  int iterations = 0;
};

struct BranchPoint {
  double r = 0.0;
  FourierLoop u;
  BranchDiagnostics diagnostics;
  bool fold = false;
};

enum class BranchTermination { ReachedTarget, Unbounded, BoundaryApproach, SingularLimitAnomaly, SolverFailure };

inline const char* to_string(BranchTermination t) {
  switch (t) {
    case BranchTermination::ReachedTarget: return "ReachedTarget";
    case BranchTermination::Unbounded: return "Unbounded";
    case BranchTermination::BoundaryApproach: return "BoundaryApproach";
    case BranchTermination::SingularLimitAnomaly: return "SingularLimitAnomaly";
    case BranchTermination::SolverFailure: return "SolverFailure";
  }
  return "?";
}

struct Branch {
  LoopProblem problem;
  FourierLoop reference;
  std::vector<BranchPoint> points;
  BranchTermination termination = BranchTermination::ReachedTarget;
  std::string detail;
};

struct ContinuationConfig {
  double initial_step = 0.01;
  double min_step = 1e-6;
  double max_step = 0.05;
  double growth = 1.5;
  int max_halvings = 12;
  int max_points = 2000;
  bool pseudo_arclength = false;
  /// BoundaryApproach when the margin drops below this fraction of the inradius.
  double boundary_fraction = 1e-3;
  double u_cap = 1e3;
  double r_cap = 1e3;
  /// Seed locality: largest accepted orbit distance to S^1 * Z (and r ||P_D u||).
  double seed_delta = 0.5;
  /// Downward runs stop when the orbit distance grows by this factor over its minimum.
  double anomaly_factor = 10.0;
  /// Node count used for the margin diagnostics (at least the collocation count).
  int diagnostic_nodes = 256;
  NewtonOptions newton;

  void validate() const {
    if (!(initial_step > 0.0) || !(min_step > 0.0) || !(max_step >= min_step))
      throw InvalidArgument("continuation steps must be positive with max_step >= min_step");
    if (!(growth >= 1.0)) throw InvalidArgument("step growth must be at least 1");
    if (max_halvings < 0 || max_points < 1) throw InvalidArgument("continuation budgets must be positive");
    if (!(boundary_fraction > 0.0) || !(u_cap > 0.0) || !(r_cap > 0.0) || !(seed_delta > 0.0))
      throw InvalidArgument("continuation thresholds must be positive");
    if (!(newton.tolerance > 0.0)) throw InvalidArgument("Newton tolerance must be positive");
  }
};

/// 1e-2 of the domain inradius over the configuration diameter (1e-2 / diameter when unbounded).
inline double default_r_start(const DomainModel& dom, const FourierLoop& z) {
  const Mat nodes = z.sample(FourierLoop::default_nodes(z.order()));
  double diam = 0.0;
  for (Eigen::Index j = 0; j < nodes.cols(); ++j)
    for (Eigen::Index a = 0; a < z.points(); ++a)
      for (Eigen::Index b = a + 1; b < z.points(); ++b)
        diam = std::max(diam, (point(nodes.col(j), a) - point(nodes.col(j), b)).norm());
  const double rad = std::isfinite(dom.inradius()) ? dom.inradius() : 1.0;
  return 1e-2 * rad / std::max(diam, 1e-12);
}

inline BranchDiagnostics branch_diagnostics(const LoopProblem& p, const FourierLoop& u, const FourierLoop& reference,
                                            int nodes = 256) {
  BranchDiagnostics d;
  d.residual = phi_gradient(p, u).norm_x();
  const Mat s = u.sample(std::max(nodes, FourierLoop::default_nodes(u.order())));
  d.min_pair_distance = std::numeric_limits<double>::infinity();
  d.boundary_margin = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < s.cols(); ++j)
    for (Eigen::Index a = 0; a < u.points(); ++a) {
      const Vec2 za = p.a0 + p.r * point(s.col(j), a);
      d.boundary_margin = std::min(d.boundary_margin, p.sys.domain().boundary_distance(za));
      for (Eigen::Index b = a + 1; b < u.points(); ++b)
        d.min_pair_distance = std::min(d.min_pair_distance, p.r * (point(s.col(j), a) - point(s.col(j), b)).norm());
    }
  const FourierLoop diag = u.diagonal_part();
  d.diagonal_norm = p.r * diag.norm_x();
  d.orbit_distance = orbit_distance(u - diag, reference).first;
  d.tail_fraction = u.tail_energy_fraction();
  return d;
}

/// Newton-corrects u = Z at r_start; rejects points that leave the neighborhood of S^1 * Z.
inline BranchPoint seed_branch(const LoopProblem& p, const FourierLoop& z, const ContinuationConfig& cfg = {},
                               const SymmetrySubspace* sym = nullptr) {
  cfg.validate();
  if (!(p.r > 0.0)) throw InvalidArgument("seed scale must be positive");
  if (std::abs(p.sys.total_vorticity()) < 1e-14) throw PreconditionError("total vorticity vanishes");
  if (!p.sys.domain().contains(p.a0)) throw OutsideDomainError("a0 is not in the domain");
  NewtonResult res;
  try {
    res = newton_periodic(p, z, PhaseCondition(z), sym, cfg.newton);
  } catch (const Error& e) {
    throw SeedRejected(std::string("corrector failed: ") + e.what());
  }
  BranchPoint pt{p.r, res.u, branch_diagnostics(p, res.u, z, cfg.diagnostic_nodes), false};
  pt.diagnostics.iterations = res.iterations;
  if (pt.diagnostics.orbit_distance > cfg.seed_delta || pt.diagnostics.diagonal_norm > cfg.seed_delta)
    throw SeedRejected("corrected loop is not near S^1*Z (orbit distance " +
                       std::to_string(pt.diagnostics.orbit_distance) + ", r|P_D u| " +
                       std::to_string(pt.diagnostics.diagonal_norm) + ")");
  return pt;
}

/// d Phi_r(u) / dr = (1 + k^2)^{-1} [grad F(a0^ + r u) + r F''(a0^ + r u) u]_k.
inline FourierLoop phi_r_derivative(const LoopProblem& p, const FourierLoop& u) {
  FourierLoop out(u.order(), u.points());
  if (!p.sys.domain().has_regular_part()) return out;
  const int m = FourierLoop::default_nodes(u.order());
  const Mat nodes = u.sample(m);
  const Vec center = diagonal(p.a0, p.sys.size());
  Mat vals(nodes.rows(), m);
  for (int j = 0; j < m; ++j) {
    const Vec z = center + p.r * nodes.col(j);
    vals.col(j) = f_gradient(p.sys, z) + p.r * (f_hessian(p.sys, z) * nodes.col(j));
  }
  const FourierLoop g = FourierLoop::from_samples(vals, u.order());
  for (int k = -u.order(); k <= u.order(); ++k) out.mode(k) = g.mode(k) / (1.0 + k * k);
  return out;
}

namespace detail {

struct ArcResult {
  FourierLoop u;
  double r;
  int iterations;
};

/// Newton on {Phi_r(u) = 0, phase, arclength} in the unknowns (u, r).
inline ArcResult arclength_corrector(const LoopProblem& base, const FourierLoop& u_pred, double r_pred,
                                     const FourierLoop& tu, double tr, const PhaseCondition& phase,
                                     const SymmetrySubspace* sym, const NewtonOptions& opts) {
  const int n = u_pred.order();
  const Eigen::Index dim = u_pred.dim();
  const Mat basis = sym ? sym->basis(n, u_pred.points()) : Mat::Identity(dim, dim);
  const Eigen::Index free = basis.cols();
  const Vec w = x_weights(n, u_pred.points());
  FourierLoop u = u_pred;
  double r = r_pred;
  for (int it = 0; it <= opts.max_iterations; ++it) {
    const LoopProblem p = base.with_r(r);
    if (!(r > 0.0)) throw LoopLeftDomain("arclength corrector reached r <= 0");
    const FourierLoop phi = phi_gradient(p, u);
    const double arc = (u - u_pred).inner_x(tu) + (r - r_pred) * tr;
    if (phi.norm_x() <= opts.tolerance && std::abs(phase(u)) <= opts.tolerance && std::abs(arc) <= opts.tolerance)
      return {u, r, it};
    if (it == opts.max_iterations) break;
    Mat jac = Mat::Zero(free + 2, free + 1);
    Vec f(free + 2);
    jac.topLeftCorner(free, free) = basis.transpose() * phi_jacobian(p, u, &basis);
    jac.block(0, free, free, 1) = basis.transpose() * phi_r_derivative(p, u).coeffs();
    jac.block(free, 0, 1, free) = (basis.transpose() * phase.gradient()).transpose();
    jac.block(free + 1, 0, 1, free) = (basis.transpose() * (w.asDiagonal() * tu.coeffs())).transpose();
    jac(free + 1, free) = tr;
    f.head(free) = basis.transpose() * phi.coeffs();
    f[free] = phase(u);
    f[free + 1] = arc;
    Eigen::ColPivHouseholderQR<Mat> qr(jac);
    qr.setThreshold(1e-11);
    if (qr.rank() < free + 1) throw JacobianSingular("arclength Jacobian is rank deficient", static_cast<int>(free + 1 - qr.rank()));
    const Vec step = qr.solve(-f);
    const FourierLoop trial(n, u.points(), u.coeffs() + basis * step.head(free));
    if (!loop_admissible(base.with_r(r + step[free]), trial)) throw LoopLeftDomain("arclength iterate left the domain");
    u = trial;
    r += step[free];
  }
  throw NoConvergence("arclength corrector did not converge");
}

}  // namespace detail

/// Predictor-corrector continuation from `seed` toward r_target (either direction).
inline Branch continue_branch(const LoopProblem& base, const BranchPoint& seed, const FourierLoop& reference,
                              double r_target, const ContinuationConfig& cfg = {},
                              const SymmetrySubspace* sym = nullptr) {
  cfg.validate();
  if (!(r_target > 0.0)) throw InvalidArgument("target scale must be positive");
  Branch br{base.with_r(seed.r), reference, {seed}, BranchTermination::ReachedTarget, ""};
  const double dir = r_target >= seed.r ? 1.0 : -1.0;
  const double inradius = base.sys.domain().inradius();
  const double margin_floor = std::isfinite(inradius) ? cfg.boundary_fraction * inradius : 0.0;
  double h = std::min(cfg.initial_step, cfg.max_step);
  double min_orbit = seed.diagnostics.orbit_distance;
  double last_tr = dir;

  auto classify = [&](const BranchPoint& pt) -> bool {
    const auto& d = pt.diagnostics;
    if (std::min(d.boundary_margin, d.min_pair_distance) < margin_floor) {
      br.termination = BranchTermination::BoundaryApproach;
      br.detail = "margin " + std::to_string(std::min(d.boundary_margin, d.min_pair_distance)) + " at r=" +
                  std::to_string(pt.r);
      return true;
    }
    if (pt.u.norm_x() > cfg.u_cap || pt.r > cfg.r_cap) {
      br.termination = BranchTermination::Unbounded;
      br.detail = "loop norm or scale exceeded its cap at r=" + std::to_string(pt.r);
      return true;
    }
    if (dir < 0.0) {
      min_orbit = std::min(min_orbit, d.orbit_distance);
      if (d.orbit_distance > 1e-8 && d.orbit_distance > cfg.anomaly_factor * min_orbit) {
        br.termination = BranchTermination::SingularLimitAnomaly;
        br.detail = "orbit distance to S^1*Z stopped decaying at r=" + std::to_string(pt.r);
        return true;
      }
    }
    return false;
  };
  if (classify(seed)) return br;

  while (true) {
    const BranchPoint& last = br.points.back();
    const bool reached = cfg.pseudo_arclength ? dir * (last.r - r_target) >= 0.0
                                              : std::abs(last.r - r_target) <= 1e-14 * std::max(1.0, r_target);
    if (reached) {
      br.termination = BranchTermination::ReachedTarget;
      return br;
    }
    if (static_cast<int>(br.points.size()) >= cfg.max_points) {
      br.termination = BranchTermination::SolverFailure;
      br.detail = "point budget exhausted";
      return br;
    }

    bool accepted = false;
    std::string failure;
    for (int halving = 0; halving <= cfg.max_halvings && h >= cfg.min_step; ++halving) {
      try {
        BranchPoint next;
        if (!cfg.pseudo_arclength) {
          double r_next = last.r + dir * h;
          if (dir * (r_next - r_target) > 0.0) r_next = r_target;
          FourierLoop guess = last.u;
          if (br.points.size() >= 2) {
            const BranchPoint& prev = br.points[br.points.size() - 2];
            guess = last.u + (last.u - prev.u) * ((r_next - last.r) / (last.r - prev.r));
          }
          const LoopProblem p = base.with_r(r_next);
          if (!loop_admissible(p, guess)) guess = last.u;
          const NewtonResult res = newton_periodic(p, guess, PhaseCondition(last.u), sym, cfg.newton);
          next = {r_next, res.u, branch_diagnostics(p, res.u, reference, cfg.diagnostic_nodes), false};
          next.diagnostics.iterations = res.iterations;
        } else {
          FourierLoop tu(last.u.order(), last.u.points());
          double tr = dir;
          if (br.points.size() >= 2) {
            const BranchPoint& prev = br.points[br.points.size() - 2];
            tu = last.u - prev.u;
            tr = last.r - prev.r;
            const double norm = std::sqrt(tu.inner_x(tu) + tr * tr);
            tu = tu * (1.0 / norm);
            tr /= norm;
          }
          const FourierLoop u_pred = last.u + tu * h;
          const double r_pred = last.r + tr * h;
          const auto res = detail::arclength_corrector(base, u_pred, r_pred, tu, tr, PhaseCondition(last.u), sym,
                                                       cfg.newton);
          const LoopProblem p = base.with_r(res.r);
          next = {res.r, res.u, branch_diagnostics(p, res.u, reference, cfg.diagnostic_nodes), false};
          next.diagnostics.iterations = res.iterations;
          const double new_tr = res.r - last.r;
          next.fold = (new_tr > 0.0) != (last_tr > 0.0);
          last_tr = new_tr;
        }
        br.points.push_back(std::move(next));
        accepted = true;
        break;
      } catch (const Error& e) {
        failure = e.what();
        h *= 0.5;
      }
    }
    if (!accepted) {
      br.termination = BranchTermination::SolverFailure;
      br.detail = "corrector failed after step halving: " + failure;
      return br;
    }
    if (br.points.back().diagnostics.iterations <= 4) h = std::min(cfg.max_step, h * cfg.growth);
    if (classify(br.points.back())) return br;
  }
}

/// Integrates the physical flow from z(0) = a0^ + r u(0) over one period 2 pi r^2;
/// returns max_k |z_k(T) - z_k(0)|.
inline double closure_error(const LoopProblem& p, const FourierLoop& u, IntegratorConfig cfg = {}) {
  const double period = kTwoPi * p.r * p.r;
  cfg.record_steps = false;
  cfg.max_step = std::min(cfg.max_step, period / 200.0);
  const Vec z0 = physical_state(p, u, 0.0);
  const Trajectory traj = integrate(p.sys, z0, period, cfg);
  if (traj.end != TrajectoryEnd::Completed) throw SolverFailure("closure integration ended early: " + traj.detail);
  double err = 0.0;
  for (Eigen::Index k = 0; k < p.sys.size(); ++k)
    err = std::max(err, (point(traj.final_state(), k) - point(z0, k)).norm());
  return err;
}

struct SmoothnessSample {
  double r = 0.0;
  double delta = 0.0;
  /// ||s(delta) - s(delta/2)|| / ||s(delta/2) - s(delta/4)|| for secant slopes s.
  double ratio = 0.0;
  bool trivially_smooth = false;
  bool passed = false;
};

struct SmoothnessReport {
  std::vector<SmoothnessSample> samples;
  bool passed = false;
};

using BranchSampler = std::function<FourierLoop(double)>;

/// Richardson test of secant slopes of r -> u(r) at each r in `radii`; a C^1 (C^2)
/// curve has ratio near 2. Differences below `noise` count as trivially smooth.
inline SmoothnessReport branch_smoothness_check(const BranchSampler& sample, const std::vector<double>& radii,
                                                double rel_delta = 0.05, double noise = 1e-12) {
  SmoothnessReport rep;
  rep.passed = !radii.empty();
  for (double r : radii) {
    SmoothnessSample s;
    s.r = r;
    s.delta = rel_delta * r;
    const FourierLoop u0 = sample(r);
    auto slope = [&](double d) { return (sample(r + d) - u0) * (1.0 / d); };
    const FourierLoop s1 = slope(s.delta), s2 = slope(s.delta / 2), s4 = slope(s.delta / 4);
    const double a = (s1 - s2).norm_x(), b = (s2 - s4).norm_x();
    if (a < noise && b < noise) {
      s.trivially_smooth = true;
      s.passed = true;
    } else {
      s.ratio = b > 0.0 ? a / b : std::numeric_limits<double>::infinity();
      s.passed = s.ratio >= 1.8 && s.ratio <= 2.2;
    }
    rep.passed = rep.passed && s.passed;
    rep.samples.push_back(s);
  }
  return rep;
}

/// Smoothness along a computed branch: resamples u(r) by Newton from the nearest
/// branch point at `count` interior points. Requires a non-degenerate a0.
inline SmoothnessReport branch_smoothness_check(const Branch& br, int count = 3, double rel_delta = 0.05,
                                                const SymmetrySubspace* sym = nullptr) {
  if (br.points.size() < 2) throw InvalidArgument("branch has fewer than two points");
  const auto& dom = br.problem.sys.domain();
  if (dom.has_regular_part()) {
    const Eigen::VectorXd ev =
        Eigen::SelfAdjointEigenSolver<Mat2>(dom.robin_hessian(br.problem.a0), Eigen::EigenvaluesOnly).eigenvalues();
    if (ev.cwiseAbs().minCoeff() < 1e-10) throw NotApplicable("a0 is a degenerate critical point of h");
  }
  std::vector<double> radii;
  std::vector<const BranchPoint*> anchors;
  const std::size_t npts = br.points.size();
  for (int i = 1; i <= count; ++i) {
    const std::size_t idx = std::min(npts - 2, npts * static_cast<std::size_t>(i) / static_cast<std::size_t>(count + 1));
    radii.push_back(br.points[idx].r);
    anchors.push_back(&br.points[idx]);
  }
  NewtonOptions opts;
  opts.tolerance = 1e-13;
  auto sample = [&](double r) {
    const BranchPoint* best = anchors.front();
    for (const auto* a : anchors)
      if (std::abs(a->r - r) < std::abs(best->r - r)) best = a;
    const PhaseCondition phase(best->u);
    try {
      return newton_periodic(br.problem.with_r(r), best->u, phase, sym, opts).u;
    } catch (const NoConvergence&) {
      NewtonOptions loose;
      return newton_periodic(br.problem.with_r(r), best->u, phase, sym, loose).u;
    }
  };
  return branch_smoothness_check(sample, radii, rel_delta);
}

}  // namespace nvortex
