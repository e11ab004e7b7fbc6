#pragma once

// Kirchhoff-Onsager energy H0, the domain Hamiltonian H_Omega = H0 - F and the
// scaled Hamiltonian H_r(u) = H0(u) - F(a0 + r u) + F(a0), with analytic first
// and second derivatives. Pair sums run over ordered pairs j != k.

#include "nvortex/system.hpp"

#include <optional>
#include <sstream>

namespace nvortex {

struct EnergyReport {
  double value = 0.0;
  Vec gradient;
  std::optional<Mat> hessian;
};

namespace detail {

inline void require_size(const VortexSystem& sys, const Vec& z) {
  if (z.size() != sys.dim()) {
    std::ostringstream os;
    os << "configuration has " << z.size() << " coordinates, system needs " << sys.dim();
    throw InvalidArgument(os.str());
  }
}

inline void require_distinct(const VortexSystem& sys, const Vec& z) {
  require_size(sys, z);
  for (Eigen::Index j = 0; j < sys.size(); ++j)
    for (Eigen::Index k = j + 1; k < sys.size(); ++k)
      if ((point(z, j) - point(z, k)).norm() < sys.collision_eps()) {
        std::ostringstream os;
        os << "vortices " << j + 1 << " and " << k + 1 << " are closer than " << sys.collision_eps();
        throw CollisionError(os.str());
      }
}

inline void require_in_domain(const DomainModel& dom, const Vec& z) {
  for (Eigen::Index k = 0; k < z.size() / 2; ++k)
    if (!dom.contains(point(z, k))) {
      std::ostringstream os;
      os << "vortex " << k + 1 << " at (" << z[2 * k] << ", " << z[2 * k + 1] << ") is outside " << dom.name();
      throw OutsideDomainError(os.str());
    }
}

}  // namespace detail

inline double h0_energy(const VortexSystem& sys, const Vec& z) {
  detail::require_distinct(sys, z);
  double s = 0.0;
  for (Eigen::Index j = 0; j < sys.size(); ++j)
    for (Eigen::Index k = j + 1; k < sys.size(); ++k)
      s += sys.strength(j) * sys.strength(k) * std::log((point(z, j) - point(z, k)).norm());
  return -s / kPi;
}

/// grad_{z_j} H0 = -(1/pi) sum_{k != j} Gamma_j Gamma_k (z_j - z_k) / |z_j - z_k|^2.
inline Vec h0_gradient(const VortexSystem& sys, const Vec& z) {
  detail::require_distinct(sys, z);
  Vec g = Vec::Zero(sys.dim());
  for (Eigen::Index j = 0; j < sys.size(); ++j)
    for (Eigen::Index k = j + 1; k < sys.size(); ++k) {
      const Vec2 d = point(z, j) - point(z, k);
      const Vec2 f = -(sys.strength(j) * sys.strength(k) / kPi) * d / d.squaredNorm();
      g.segment<2>(2 * j) += f;
      g.segment<2>(2 * k) -= f;
    }
  return g;
}

inline Mat h0_hessian(const VortexSystem& sys, const Vec& z) {
  detail::require_distinct(sys, z);
  Mat h = Mat::Zero(sys.dim(), sys.dim());
  for (Eigen::Index j = 0; j < sys.size(); ++j)
    for (Eigen::Index k = j + 1; k < sys.size(); ++k) {
      const Vec2 d = point(z, j) - point(z, k);
      const double r2 = d.squaredNorm();
      // Hessian of log|d| is (I - 2 d d^T / |d|^2) / |d|^2.
      const Mat2 kern = (Mat2::Identity() - 2.0 * d * d.transpose() / r2) / r2;
      const Mat2 b = -(sys.strength(j) * sys.strength(k) / kPi) * kern;
      h.block<2, 2>(2 * j, 2 * j) += b;
      h.block<2, 2>(2 * k, 2 * k) += b;
      h.block<2, 2>(2 * j, 2 * k) -= b;
      h.block<2, 2>(2 * k, 2 * j) -= b;
    }
  return h;
}

// Regular part F(z) = sum_{j,k} Gamma_j Gamma_k g(z_j, z_k), diagonal terms included.
// F is smooth on Omega^N, including coincident points.

inline double f_energy(const VortexSystem& sys, const Vec& z) {
  detail::require_size(sys, z);
  const auto& dom = sys.domain();
  if (!dom.has_regular_part()) return 0.0;
  detail::require_in_domain(dom, z);
  double s = 0.0;
  for (Eigen::Index j = 0; j < sys.size(); ++j)
    for (Eigen::Index k = 0; k < sys.size(); ++k)
      s += sys.strength(j) * sys.strength(k) * dom.g(point(z, j), point(z, k));
  return s;
}

inline Vec f_gradient(const VortexSystem& sys, const Vec& z) {
  detail::require_size(sys, z);
  Vec g = Vec::Zero(sys.dim());
  const auto& dom = sys.domain();
  if (!dom.has_regular_part()) return g;
  detail::require_in_domain(dom, z);
  for (Eigen::Index i = 0; i < sys.size(); ++i)
    for (Eigen::Index k = 0; k < sys.size(); ++k)
      g.segment<2>(2 * i) += 2.0 * sys.strength(i) * sys.strength(k) * dom.grad_x(point(z, i), point(z, k));
  return g;
}

inline Mat f_hessian(const VortexSystem& sys, const Vec& z) {
  detail::require_size(sys, z);
  Mat h = Mat::Zero(sys.dim(), sys.dim());
  const auto& dom = sys.domain();
  if (!dom.has_regular_part()) return h;
  detail::require_in_domain(dom, z);
  for (Eigen::Index i = 0; i < sys.size(); ++i) {
    const Vec2 zi = point(z, i);
    for (Eigen::Index k = 0; k < sys.size(); ++k) {
      const double c = 2.0 * sys.strength(i) * sys.strength(k);
      h.block<2, 2>(2 * i, 2 * i) += c * dom.hess_xx(zi, point(z, k));
      h.block<2, 2>(2 * i, 2 * k) += c * dom.hess_xy(zi, point(z, k));
    }
  }
  return h;
}

/// H_Omega = H0 - F with derivatives. For the whole plane this is H0 exactly.
inline EnergyReport domain_energy(const VortexSystem& sys, const Vec& z, bool with_hessian = false) {
  detail::require_distinct(sys, z);
  detail::require_in_domain(sys.domain(), z);
  EnergyReport rep;
  rep.value = h0_energy(sys, z);
  rep.gradient = h0_gradient(sys, z);
  if (with_hessian) rep.hessian = h0_hessian(sys, z);
  if (sys.domain().has_regular_part()) {
    rep.value -= f_energy(sys, z);
    rep.gradient -= f_gradient(sys, z);
    if (with_hessian) *rep.hessian -= f_hessian(sys, z);
  }
  return rep;
}

/// Diagonal configuration (a, ..., a).
inline Vec diagonal(const Vec2& a, Eigen::Index n) {
  Vec z(2 * n);
  for (Eigen::Index k = 0; k < n; ++k) z.segment<2>(2 * k) = a;
  return z;
}

/// H_r(u) = H0(u) - F(a0^ + r u) + F(a0^). Gradient: grad H0(u) - r (grad F)(a0^ + r u).
inline EnergyReport hr_energy(const VortexSystem& sys, double r, const Vec& u, const Vec2& a0 = Vec2::Zero(),
                              bool with_hessian = false) {
  if (r < 0.0) throw InvalidArgument("scale r must be nonnegative");
  detail::require_distinct(sys, u);
  EnergyReport rep;
  rep.value = h0_energy(sys, u);
  rep.gradient = h0_gradient(sys, u);
  if (with_hessian) rep.hessian = h0_hessian(sys, u);
  if (r > 0.0 && sys.domain().has_regular_part()) {
    const Vec center = diagonal(a0, sys.size());
    const Vec z = center + r * u;
    detail::require_in_domain(sys.domain(), z);
    rep.value += -f_energy(sys, z) + f_energy(sys, center);
    rep.gradient -= r * f_gradient(sys, z);
    if (with_hessian) *rep.hessian -= r * r * f_hessian(sys, z);
  }
  return rep;
}

/// z_dot_k = Gamma_k^{-1} J grad_{z_k} H for a given gradient.
inline Vec velocity_from_gradient(const VortexSystem& sys, const Vec& grad) {
  return sys.apply_inverse_vorticity(apply_jn(grad));
}

/// Physical flow in the system's domain (H_Omega; H0 for the plane).
inline Vec vector_field(const VortexSystem& sys, const Vec& z) {
  return velocity_from_gradient(sys, domain_energy(sys, z).gradient);
}

/// Scaled flow: H0 when r == 0, H_r otherwise.
inline Vec vector_field(const VortexSystem& sys, const Vec& u, double r, const Vec2& a0 = Vec2::Zero()) {
  return velocity_from_gradient(sys, hr_energy(sys, r, u, a0).gradient);
}

}  // namespace nvortex
