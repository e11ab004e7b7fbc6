#pragma once

// Relative equilibria Z(t) = e^{-omega J_N t} z of the whole-plane problem, the
// stability matrix A = J_N (M^{-1} H0''(z) + omega I), and counting of
// 2 pi / |omega| periodic solutions of w' = A w.

#include "nvortex/hamiltonian.hpp"
#include "nvortex/loop.hpp"

#include <optional>
#include <variant>

namespace nvortex {

struct RelativeEquilibrium {
  Configuration z;
  double omega = 0.0;
  double residual_norm = 0.0;
  int iterations = 0;
};

struct SpectralReport {
  CVec eigenvalues;
  int periodic_dimension = 0;
  std::optional<int> gamma_periodic_dimension;
  bool nondegenerate = false;
};

/// grad H0(z) + omega M_Gamma z; zero iff e^{-omega J_N t} z solves the planar equations.
inline Vec equilibrium_residual(const VortexSystem& sys, const Vec& z, double omega) {
  return h0_gradient(sys, z) + omega * sys.apply_vorticity(z);
}

struct FixOmega {
  double omega;
};
struct FixScale {
  /// Root mean square distance of the vortices from the center of vorticity.
  double rho;
};
using Normalization = std::variant<FixOmega, FixScale>;

struct EquilibriumSolverOptions {
  double tolerance = 1e-10;
  int max_iterations = 50;
};

/// Gauss-Newton on {residual = 0, sum Gamma_k z_k = 0, rotation pin, normalization}.
/// The pin keeps the outermost vortex of the (centered) guess on its initial ray.
inline RelativeEquilibrium solve_equilibrium(const VortexSystem& sys, const Vec& z_guess, const Normalization& norm,
                                             const EquilibriumSolverOptions& opts = {}) {
  const double total = sys.total_vorticity();
  if (std::abs(total) < 1e-14) throw PreconditionError("total vorticity vanishes; center of vorticity is undefined");
  detail::require_distinct(sys, z_guess);
  const Eigen::Index n = sys.size(), dim = sys.dim();

  Vec z = z_guess;
  const Vec2 c = sys.center_of_vorticity(z) / total;
  for (Eigen::Index k = 0; k < n; ++k) z.segment<2>(2 * k) -= c;

  const auto rms = [&](const Vec& w) { return std::sqrt(w.squaredNorm() / static_cast<double>(n)); };
  if (const auto* fs = std::get_if<FixScale>(&norm)) {
    if (!(fs->rho > 0.0)) throw InvalidArgument("scale must be positive");
    z *= fs->rho / rms(z);
  }

  Eigen::Index pin = 0;
  for (Eigen::Index k = 1; k < n; ++k)
    if (point(z, k).norm() > point(z, pin).norm()) pin = k;
  const Vec2 pin_normal = apply_j(point(z, pin)).normalized();  // perpendicular to the ray

  const Vec mz0 = sys.apply_vorticity(z);
  double omega = std::holds_alternative<FixOmega>(norm) ? std::get<FixOmega>(norm).omega
                                                       : -h0_gradient(sys, z).dot(mz0) / mz0.squaredNorm();

  const Eigen::Index rows = dim + 4;
  RelativeEquilibrium out;
  for (int it = 0; it <= opts.max_iterations; ++it) {
    Vec f(rows);
    f.head(dim) = equilibrium_residual(sys, z, omega);
    f.segment<2>(dim) = sys.center_of_vorticity(z);
    f[dim + 2] = pin_normal.dot(point(z, pin));
    if (const auto* fo = std::get_if<FixOmega>(&norm))
      f[dim + 3] = omega - fo->omega;
    else
      f[dim + 3] = z.squaredNorm() / static_cast<double>(n) - std::pow(std::get<FixScale>(norm).rho, 2);

    const double res = f.head(dim).norm();
    if (res <= opts.tolerance && f.tail(4).cwiseAbs().maxCoeff() <= opts.tolerance) {
      out.z = Configuration(z);
      out.omega = omega;
      out.residual_norm = res;
      out.iterations = it;
      return out;
    }
    if (it == opts.max_iterations) break;

    Mat jac = Mat::Zero(rows, dim + 1);
    jac.topLeftCorner(dim, dim) = h0_hessian(sys, z) + omega * sys.vorticity_matrix();
    jac.block(0, dim, dim, 1) = sys.apply_vorticity(z);
    for (Eigen::Index k = 0; k < n; ++k) jac.block<2, 2>(dim, 2 * k) = sys.strength(k) * Mat2::Identity();
    jac.block<1, 2>(dim + 2, 2 * pin) = pin_normal.transpose();
    if (std::holds_alternative<FixOmega>(norm))
      jac(dim + 3, dim) = 1.0;
    else
      jac.block(dim + 3, 0, 1, dim) = (2.0 / static_cast<double>(n)) * z.transpose();

    Eigen::ColPivHouseholderQR<Mat> qr(jac);
    qr.setThreshold(1e-12);
    if (qr.rank() < dim + 1)
      throw SingularJacobian("equilibrium Jacobian has rank " + std::to_string(qr.rank()) + " < " +
                             std::to_string(dim + 1));
    const Vec step = qr.solve(-f);
    z += step.head(dim);
    omega += step[dim];
    detail::require_distinct(sys, z);
  }
  throw NoConvergence("relative equilibrium Newton iteration did not reach tolerance");
}

inline Mat stability_matrix(const VortexSystem& sys, const RelativeEquilibrium& eq) {
  const Vec& z = eq.z.coords();
  Mat inner = sys.vorticity_matrix().inverse() * h0_hessian(sys, z);
  inner.diagonal().array() += eq.omega;
  return symplectic_matrix(sys.size()) * inner;
}

/// Real dimension of the 2 pi/|omega|-periodic solutions of w' = A w: the geometric
/// multiplicities (SVD rank of A - i k |omega| I) summed over lattice points i |omega| Z
/// carrying an eigenvalue. Eigenvalues within (tol, 10 tol] of a lattice point whose
/// shifted matrix is nonsingular are ambiguous.
inline int periodic_solution_count(const Mat& a, double omega, double tol = 1e-8) {
  if (a.rows() != a.cols() || a.rows() % 2 != 0) throw InvalidArgument("stability matrix must be square, even-sized");
  if (omega == 0.0) throw InvalidArgument("omega must be nonzero");
  if (!(tol > 0.0)) throw InvalidArgument("tolerance must be positive");
  const double w = std::abs(omega);

  Eigen::EigenSolver<Mat> es(a, false);
  const CVec ev = es.eigenvalues();
  const double norm_a = a.cols() ? Eigen::JacobiSVD<Mat>(a).singularValues()(0) : 0.0;
  const double rank_tol = 1e-8 * std::max(norm_a, w);

  double max_im = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) max_im = std::max(max_im, std::abs(ev[i].imag()));
  const int kmax = static_cast<int>(std::floor(max_im / w)) + 1;

  int count = 0;
  for (int k = -kmax; k <= kmax; ++k) {
    const std::complex<double> lambda(0.0, k * w);
    CMat shifted = a.cast<std::complex<double>>();
    shifted.diagonal().array() -= lambda;
    const Eigen::VectorXd sv = Eigen::JacobiSVD<CMat>(shifted).singularValues();
    int nullity = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv[i] <= rank_tol) ++nullity;

    bool hit = false;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      const double d = std::abs(ev[i] - lambda);
      if (d <= tol) hit = true;
      else if (d <= 10.0 * tol && nullity == 0)
        throw ToleranceAmbiguity("eigenvalue " + std::to_string(ev[i].real()) + "+" + std::to_string(ev[i].imag()) +
                                 "i lies in the guard band of lattice point " + std::to_string(k) + " i|omega|");
    }
    if (nullity > 0 || hit) count += std::max(nullity, 1);
  }
  return count;
}

inline SpectralReport nondegeneracy(const VortexSystem& sys, const RelativeEquilibrium& eq, double tol = 1e-8) {
  const Mat a = stability_matrix(sys, eq);
  SpectralReport rep;
  rep.eigenvalues = Eigen::EigenSolver<Mat>(a, false).eigenvalues();
  rep.periodic_dimension = periodic_solution_count(a, eq.omega, tol);
  rep.nondegenerate = rep.periodic_dimension == 3;
  return rep;
}

/// Rescales to |omega| = 1: z -> sqrt|omega| z, so Z(t) = B_{sign omega}(t) z is 2 pi periodic.
inline RelativeEquilibrium normalized(const RelativeEquilibrium& eq) {
  RelativeEquilibrium out = eq;
  const double s = std::sqrt(std::abs(eq.omega));
  out.z = Configuration(s * eq.z.coords());
  out.omega = eq.omega > 0 ? 1.0 : -1.0;
  out.residual_norm = eq.residual_norm / s;
  return out;
}

/// The 2 pi-periodic loop of a relative equilibrium normalized to |omega| = 1.
inline FourierLoop equilibrium_loop(const RelativeEquilibrium& eq, int n) {
  const RelativeEquilibrium unit = normalized(eq);
  return FourierLoop::single_mode(unit.z.coords(), unit.omega > 0 ? 1 : -1, n);
}

}  // namespace nvortex
