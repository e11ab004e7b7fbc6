#pragma once

#include "nvortex/nvortex.hpp"

#include <gtest/gtest.h>

#include <random>

namespace testsupport {

using namespace nvortex;

inline std::mt19937_64& rng() {
  static std::mt19937_64 gen(20241018);
  return gen;
}

inline double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng()); }

/// Random configuration in a box with pairwise distances at least `sep`.
inline Vec random_config(Eigen::Index n, double half_width = 1.0, double sep = 0.2) {
  while (true) {
    Vec z(2 * n);
    for (Eigen::Index i = 0; i < 2 * n; ++i) z[i] = uniform(-half_width, half_width);
    if (Configuration(z).min_pair_distance() >= sep) return z;
  }
}

/// Random configuration inside the disc of radius `radius`.
inline Vec random_disc_config(Eigen::Index n, double radius, double sep) {
  while (true) {
    Vec z(2 * n);
    for (Eigen::Index k = 0; k < n; ++k) {
      const double r = radius * std::sqrt(uniform(0.0, 1.0)), a = uniform(0.0, kTwoPi);
      z.segment<2>(2 * k) = Vec2(r * std::cos(a), r * std::sin(a));
    }
    if (Configuration(z).min_pair_distance() >= sep) return z;
  }
}

inline std::vector<double> random_strengths(Eigen::Index n, double lo = 0.5, double hi = 2.0) {
  std::vector<double> g(static_cast<std::size_t>(n));
  for (auto& v : g) v = uniform(lo, hi) * (uniform(0.0, 1.0) < 0.3 ? -1.0 : 1.0);
  return g;
}

/// Central-difference gradient of a scalar function.
template <class F>
Vec fd_gradient(F&& f, const Vec& x, double h = 1e-6) {
  Vec g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vec p = x, m = x;
    p[i] += h;
    m[i] -= h;
    g[i] = (f(p) - f(m)) / (2.0 * h);
  }
  return g;
}

/// Central-difference Jacobian of a vector function.
template <class F>
Mat fd_jacobian(F&& f, const Vec& x, double h = 1e-6) {
  const Vec f0 = f(x);
  Mat jac(f0.size(), x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vec p = x, m = x;
    p[i] += h;
    m[i] -= h;
    jac.col(i) = (f(p) - f(m)) / (2.0 * h);
  }
  return jac;
}

inline double rel_err(const Vec& a, const Vec& b) { return (a - b).norm() / std::max(1e-300, b.norm()); }
inline double rel_err(const Mat& a, const Mat& b) { return (a - b).norm() / std::max(1e-300, b.norm()); }

/// Random loop with geometric decay in k around a base configuration.
inline FourierLoop random_loop(const Vec& base, int n, double amp) {
  FourierLoop u = FourierLoop::constant(base, n);
  for (int k = -n; k <= n; ++k)
    for (Eigen::Index i = 0; i < u.block(); ++i) u.mode(k)[i] += amp * uniform(-1.0, 1.0) / (1.0 + k * k);
  return u;
}

/// Two-vortex relative equilibrium with unit-rate rotation for the given strengths.
inline RelativeEquilibrium pair_equilibrium(double g1, double g2, double s) {
  const VortexSystem sys({g1, g2});
  const double total = g1 + g2;
  Vec z(4);
  z << g2 * s / total, 0.0, -g1 * s / total, 0.0;
  return solve_equilibrium(sys, z, FixOmega{total / (kPi * s * s)});
}

}  // namespace testsupport
