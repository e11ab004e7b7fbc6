#pragma once

// The scaled periodic problem on truncated loops: action functional, its H^1
// gradient Phi_r = L - Psi_r, the Jacobian, and a bordered Newton solver.
//
// A loop u solves Gamma_k u_k' = J grad_{u_k} H_r(u) iff Phi_r(u) = 0, and then
// z(t) = a0^ + r u(t / r^2) is a 2 pi r^2 periodic solution in the domain.

#include "nvortex/equilibria.hpp"

#include <optional>
#include <sstream>

namespace nvortex {

/// The data fixing one instance of the periodic problem.
struct LoopProblem {
  VortexSystem sys;
  double r = 0.0;
  Vec2 a0 = Vec2::Zero();

  /// Translations stay a symmetry when F does not enter: r = 0 or the whole plane.
  bool translation_invariant() const { return r == 0.0 || !sys.domain().has_regular_part(); }

  LoopProblem with_r(double new_r) const { return {sys, new_r, a0}; }
};

/// L u = (id - d^2/dt^2)^{-1}(-J_N M_Gamma u'); per mode L(B_k alpha) = -(k / (1 + k^2)) M_Gamma B_k alpha.
inline FourierLoop l_operator(const VortexSystem& sys, const FourierLoop& u) {
  FourierLoop out(u.order(), u.points());
  for (int k = -u.order(); k <= u.order(); ++k)
    out.mode(k) = -(static_cast<double>(k) / (1.0 + k * k)) * sys.apply_vorticity(u.mode(k));
  return out;
}

namespace detail {

/// Admissibility of the loop at the collocation nodes; returns the first violation or nothing.
inline std::optional<std::string> loop_violation(const LoopProblem& p, const Mat& nodes, bool& outside) {
  const auto& dom = p.sys.domain();
  const bool check_domain = p.r > 0.0 && dom.has_regular_part();
  for (Eigen::Index j = 0; j < nodes.cols(); ++j) {
    const Vec u = nodes.col(j);
    if (!u.allFinite()) {
      outside = true;
      return "non-finite loop value";
    }
    for (Eigen::Index a = 0; a < p.sys.size(); ++a) {
      if (check_domain && !dom.contains(p.a0 + p.r * point(u, a))) {
        outside = true;
        std::ostringstream os;
        os << "vortex " << a + 1 << " leaves " << dom.name() << " at node " << j;
        return os.str();
      }
      for (Eigen::Index b = a + 1; b < p.sys.size(); ++b)
        if ((point(u, a) - point(u, b)).norm() < p.sys.collision_eps()) {
          outside = false;
          std::ostringstream os;
          os << "vortices " << a + 1 << " and " << b + 1 << " collide at node " << j;
          return os.str();
        }
    }
  }
  return std::nullopt;
}

inline void require_admissible_loop(const LoopProblem& p, const Mat& nodes) {
  bool outside = false;
  if (auto v = loop_violation(p, nodes, outside)) {
    if (outside) throw OutsideDomainOnLoop(*v);
    throw CollisionOnLoop(*v);
  }
}

inline void require_loop_size(const LoopProblem& p, const FourierLoop& u) {
  if (u.points() != p.sys.size()) throw InvalidArgument("loop and system have different numbers of vortices");
}

}  // namespace detail

inline bool loop_admissible(const LoopProblem& p, const FourierLoop& u) {
  bool outside = false;
  return !detail::loop_violation(p, u.sample(FourierLoop::default_nodes(u.order())), outside);
}

/// (1/2) int <M u', J u> dt - int H_r(u) dt; the quadratic part exactly, the rest by
/// the trapezoid rule on 4n + 4 nodes.
inline double action(const LoopProblem& p, const FourierLoop& u) {
  detail::require_loop_size(p, u);
  const int m = FourierLoop::default_nodes(u.order());
  const Mat nodes = u.sample(m);
  detail::require_admissible_loop(p, nodes);
  double quad = 0.0;
  for (int k = -u.order(); k <= u.order(); ++k) quad -= k * u.mode(k).dot(p.sys.apply_vorticity(u.mode(k)));
  quad *= kPi;
  double h = 0.0;
  for (int j = 0; j < m; ++j) h += hr_energy(p.sys, p.r, nodes.col(j), p.a0).value;
  return quad - kTwoPi * h / m;
}

/// Truncated H^1 gradient of the action: L u - P_n (id - d^2/dt^2)^{-1} grad H_r(u).
inline FourierLoop phi_gradient(const LoopProblem& p, const FourierLoop& u) {
  detail::require_loop_size(p, u);
  const int m = FourierLoop::default_nodes(u.order());
  const Mat nodes = u.sample(m);
  detail::require_admissible_loop(p, nodes);
  Mat grads(nodes.rows(), m);
  for (int j = 0; j < m; ++j) grads.col(j) = hr_energy(p.sys, p.r, nodes.col(j), p.a0).gradient;
  FourierLoop g = FourierLoop::from_samples(grads, u.order());
  FourierLoop out = l_operator(p.sys, u);
  for (int k = -u.order(); k <= u.order(); ++k) out.mode(k) -= g.mode(k) / (1.0 + k * k);
  return out;
}

/// Synthesis matrix: rows of node j hold B_k(t_j) for every mode k.
inline Mat synthesis_matrix(int n, Eigen::Index points, int m) {
  const Eigen::Index b = 2 * points;
  Mat s = Mat::Zero(m * b, (2 * n + 1) * b);
  for (int j = 0; j < m; ++j)
    for (int k = -n; k <= n; ++k) {
      const Mat2 rot = rotation(k * kTwoPi * j / m);
      for (Eigen::Index a = 0; a < points; ++a)
        s.block<2, 2>(j * b + 2 * a, FourierLoop::offset(k, n, b) + 2 * a) = rot;
    }
  return s;
}

/// D Phi_r(u) on coefficient space, optionally composed with a basis (columns) of a subspace.
inline Mat phi_jacobian(const LoopProblem& p, const FourierLoop& u, const Mat* basis = nullptr) {
  detail::require_loop_size(p, u);
  const int n = u.order();
  const int m = FourierLoop::default_nodes(n);
  const Eigen::Index b = u.block(), dim = u.dim();
  const Mat nodes = u.sample(m);
  detail::require_admissible_loop(p, nodes);

  const Mat s = synthesis_matrix(n, u.points(), m);
  const Mat sq = basis ? Mat(s * (*basis)) : s;
  Mat hsq(sq.rows(), sq.cols());
  for (int j = 0; j < m; ++j) {
    const Mat h = *hr_energy(p.sys, p.r, nodes.col(j), p.a0, true).hessian;
    hsq.middleRows(j * b, b) = h * sq.middleRows(j * b, b);
  }
  Mat jac = -(s.transpose() * hsq) / m;
  for (int k = -n; k <= n; ++k) jac.middleRows(FourierLoop::offset(k, n, b), b) /= (1.0 + k * k);

  Mat lmat = Mat::Zero(dim, dim);
  for (int k = -n; k <= n; ++k) {
    const Eigen::Index o = FourierLoop::offset(k, n, b);
    for (Eigen::Index a = 0; a < u.points(); ++a)
      lmat.block<2, 2>(o + 2 * a, o + 2 * a) =
          -(static_cast<double>(k) / (1.0 + k * k)) * p.sys.strength(a) * Mat2::Identity();
  }
  jac += basis ? Mat(lmat * (*basis)) : lmat;
  return jac;
}

/// u -> <u - u_ref, u_ref'>_{L^2}, pinning the time-shift action.
class PhaseCondition {
public:
  explicit PhaseCondition(FourierLoop ref) : ref_(std::move(ref)), tangent_(ref_.derivative()) {}
  double operator()(const FourierLoop& u) const { return (u - ref_).inner_l2(tangent_); }
  /// Gradient with respect to the coefficients.
  Vec gradient() const { return kTwoPi * tangent_.coeffs(); }
  const FourierLoop& reference() const { return ref_; }

private:
  FourierLoop ref_;
  FourierLoop tangent_;
};

struct NewtonOptions {
  double tolerance = 1e-10;
  int max_iterations = 30;
  /// Largest accepted step in the X norm (trust radius); nonpositive disables the cap.
  double max_step = 0.0;
  int max_backtracks = 30;
};

struct NewtonResult {
  FourierLoop u;
  double residual = 0.0;
  int iterations = 0;
};

/// Solves {Phi_r(u) = 0, phase(u) = 0} (plus P_D(u - u_ref) = 0 when translations are a
/// symmetry) by least-squares Newton, inside X^gamma when a symmetry subspace is given.
inline NewtonResult newton_periodic(const LoopProblem& p, const FourierLoop& u_guess, const PhaseCondition& phase,
                                    const SymmetrySubspace* sym = nullptr, const NewtonOptions& opts = {}) {
  detail::require_loop_size(p, u_guess);
  FourierLoop u = sym ? sym->project(p.sys, u_guess) : u_guess;
  {
    bool outside = false;
    if (auto v = detail::loop_violation(p, u.sample(FourierLoop::default_nodes(u.order())), outside))
      throw LoopLeftDomain("initial guess is not admissible: " + *v);
  }
  const int n = u.order();
  const Eigen::Index dim = u.dim();
  const Mat basis = sym ? sym->basis(n, u.points()) : Mat::Identity(dim, dim);
  const Eigen::Index free = basis.cols();
  const bool pin_translation = p.translation_invariant();
  const Vec weights = x_weights(n, u.points());

  const FourierLoop ref_diag = phase.reference().diagonal_part();
  Mat translations = Mat::Zero(dim, 2);
  for (Eigen::Index a = 0; a < u.points(); ++a) {
    translations(FourierLoop::offset(0, n, u.block()) + 2 * a, 0) = 1.0 / static_cast<double>(u.points());
    translations(FourierLoop::offset(0, n, u.block()) + 2 * a + 1, 1) = 1.0 / static_cast<double>(u.points());
  }

  auto residual_vector = [&](const FourierLoop& v, const FourierLoop& phi) {
    const Eigen::Index extra = 1 + (pin_translation ? 2 : 0);
    Vec f(free + extra);
    f.head(free) = basis.transpose() * phi.coeffs();
    f[free] = phase(v);
    if (pin_translation) f.tail(2) = translations.transpose() * (v - phase.reference()).coeffs();
    return f;
  };

  FourierLoop phi = phi_gradient(p, u);
  for (int it = 0;; ++it) {
    const double res = phi.norm_x();
    if (res <= opts.tolerance && std::abs(phase(u)) <= opts.tolerance) return {u, res, it};
    if (it >= opts.max_iterations)
      throw NoConvergence("periodic Newton stalled at residual " + std::to_string(res));

    const Mat jphi = phi_jacobian(p, u, &basis);
    const Eigen::Index extra = 1 + (pin_translation ? 2 : 0);
    Mat jac(free + extra, free);
    jac.topRows(free) = basis.transpose() * jphi;
    jac.row(free) = (basis.transpose() * phase.gradient()).transpose();
    if (pin_translation) jac.bottomRows(2) = (basis.transpose() * translations).transpose();

    Eigen::ColPivHouseholderQR<Mat> qr(jac);
    qr.setThreshold(1e-11);
    if (qr.rank() < free) {
      const int kernel = static_cast<int>(free - qr.rank());
      throw JacobianSingular("bordered periodic Jacobian is rank deficient (kernel dimension " +
                                 std::to_string(kernel) + ")",
                             kernel);
    }
    const Vec f = residual_vector(u, phi);
    Vec step = basis * qr.solve(-f);
    const double step_x = std::sqrt((weights.array() * step.array().square()).sum());
    if (opts.max_step > 0.0 && step_x > opts.max_step) step *= opts.max_step / step_x;

    // backtrack only to stay admissible; Newton steps are otherwise taken in full
    double lambda = 1.0;
    FourierLoop trial;
    bool ok = false;
    for (int bt = 0; bt <= opts.max_backtracks; ++bt, lambda *= 0.5) {
      trial = FourierLoop(n, u.points(), u.coeffs() + lambda * step);
      if (loop_admissible(p, trial)) {
        ok = true;
        break;
      }
    }
    if (!ok) throw LoopLeftDomain("Newton iterate leaves the admissible set at iteration " + std::to_string(it));
    u = trial;
    phi = phi_gradient(p, u);
  }
}

/// Maps a loop solution back to physical time: z(t) = a0^ + r u(t / r^2).
inline Vec physical_state(const LoopProblem& p, const FourierLoop& u, double t) {
  const Vec uu = u.evaluate(t / (p.r * p.r));
  return diagonal(p.a0, p.sys.size()) + p.r * uu;
}

/// Symmetric form of D Phi in H^1-orthonormal coordinates: W^{1/2} D Phi W^{-1/2}.
inline Mat symmetric_jacobian(const LoopProblem& p, const FourierLoop& u) {
  const Vec w = x_weights(u.order(), u.points()).cwiseSqrt();
  return w.asDiagonal() * phi_jacobian(p, u) * w.cwiseInverse().asDiagonal();
}

/// Kernel dimension of D Phi_0(Z) restricted to X^gamma (identity gamma: all of X_n),
/// evaluated at truncations n and 2n; throws TruncationUnstable if the counts differ.
inline int gamma_periodic_count(const VortexSystem& sys, const RelativeEquilibrium& eq, const SymmetryElement& gamma,
                                int n = 8, double tol = 1e-8) {
  if (sys.domain().has_regular_part()) throw InvalidArgument("relative equilibria live in the whole plane");
  gamma.check_strengths(sys);
  const SymmetrySubspace space(gamma);
  const LoopProblem prob{sys.with_domain(DomainModel::plane()), 0.0, Vec2::Zero()};
  auto count_at = [&](int order) {
    const FourierLoop z = equilibrium_loop(eq, order);
    if (!space.contains(z, 1e-10)) throw NotSymmetric("the relative equilibrium loop is not fixed by gamma");
    const Mat q = space.basis(order, sys.size());
    const Mat jq = phi_jacobian(prob, z, &q);
    const Eigen::VectorXd sv = Eigen::JacobiSVD<Mat>(jq).singularValues();
    const double scale = std::max(1.0, sv.size() ? sv[0] : 0.0);
    int kernel = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv[i] <= tol * scale) ++kernel;
    return kernel + static_cast<int>(q.cols() - std::min<Eigen::Index>(q.cols(), jq.rows()));
  };
  const int coarse = count_at(n);
  const int fine = count_at(2 * n);
  if (coarse != fine)
    throw TruncationUnstable("kernel dimension " + std::to_string(coarse) + " at n=" + std::to_string(n) + " but " +
                             std::to_string(fine) + " at n=" + std::to_string(2 * n));
  return fine;
}

/// Compression of D Phi_0(Z) (symmetric form) to the slice orthogonal to the known
/// kernel D + R Z' inside X^gamma.
inline Mat orbit_slice_jacobian(const VortexSystem& sys, const RelativeEquilibrium& eq, int n,
                                const SymmetryElement* gamma = nullptr) {
  const LoopProblem prob{sys.with_domain(DomainModel::plane()), 0.0, Vec2::Zero()};
  const FourierLoop z = equilibrium_loop(eq, n);
  const Vec sw = x_weights(n, sys.size()).cwiseSqrt();
  const Mat sym = symmetric_jacobian(prob, z);

  Mat space = Mat::Identity(z.dim(), z.dim());
  if (gamma) {
    gamma->check_strengths(sys);
    space = SymmetrySubspace(*gamma).basis(n, sys.size());
  }
  Mat known(z.dim(), 3);
  known.setZero();
  for (Eigen::Index a = 0; a < sys.size(); ++a) {
    known(FourierLoop::offset(0, n, z.block()) + 2 * a, 0) = 1.0;
    known(FourierLoop::offset(0, n, z.block()) + 2 * a + 1, 1) = 1.0;
  }
  known.col(2) = z.derivative().coeffs();
  for (int c = 0; c < 3; ++c) known.col(c) = sw.asDiagonal() * known.col(c);

  // the known kernel lies in X^gamma; complement taken inside the subspace coordinates
  const Mat known_in_space = space.transpose() * known;
  const Mat comp = space * orthogonal_complement(known_in_space);
  return comp.transpose() * sym * comp;
}

}  // namespace nvortex
