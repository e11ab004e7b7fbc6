#pragma once

// Critical points of the Robin function and winding numbers of planar fields.

#include "nvortex/hamiltonian.hpp"

#include <functional>
#include <vector>

namespace nvortex {

struct CriticalPointReport {
  Vec2 location = Vec2::Zero();
  double gradient_norm = 0.0;
  Mat2 hessian = Mat2::Zero();
  int brouwer_index = 0;
  bool stable = false;
  bool nondegenerate = false;
};

using PlanarField = std::function<Vec2(const Vec2&)>;

/// Winding number of `field` around the circle |a - center| = eps, by angle accumulation.
/// The sample count doubles (from `samples`) until every angle increment is below pi/4.
inline int winding_number(const PlanarField& field, const Vec2& center, double eps, int samples = 256) {
  if (!(eps > 0.0)) throw InvalidArgument("contour radius must be positive");
  if (samples < 256) samples = 256;
  for (int attempt = 0; attempt < 8; ++attempt, samples *= 2) {
    std::vector<Vec2> values(static_cast<std::size_t>(samples));
    double scale = 0.0;
    for (int i = 0; i < samples; ++i) {
      const double t = kTwoPi * i / samples;
      values[static_cast<std::size_t>(i)] = field(center + eps * Vec2(std::cos(t), std::sin(t)));
      scale = std::max(scale, values[static_cast<std::size_t>(i)].norm());
    }
    for (const auto& v : values)
      if (!(v.norm() > 1e-14 * std::max(scale, 1e-300)) || !std::isfinite(v.norm()))
        throw ZeroOnContour("field vanishes (or is not finite) on the contour");

    double total = 0.0;
    bool resolved = true;
    for (int i = 0; i < samples; ++i) {
      const Vec2& a = values[static_cast<std::size_t>(i)];
      const Vec2& b = values[static_cast<std::size_t>((i + 1) % samples)];
      const double d = std::atan2(a.x() * b.y() - a.y() * b.x(), a.dot(b));
      if (std::abs(d) > kPi / 4.0) resolved = false;
      total += d;
    }
    if (!resolved) continue;
    const double w = total / kTwoPi;
    const double rounded = std::round(w);
    if (std::abs(w - rounded) > 0.1) throw AmbiguousWinding("winding " + std::to_string(w) + " is not near an integer");
    return static_cast<int>(rounded);
  }
  throw AmbiguousWinding("angle increments not resolved after refinement");
}

/// Brouwer index of grad h at a0 over the circle of radius eps.
inline int brouwer_index(const DomainModel& dom, const Vec2& a0, double eps, int samples = 256) {
  if (!dom.has_regular_part()) throw PreconditionError("the whole plane has no isolated Robin critical points");
  if (dom.boundary_distance(a0) <= eps) throw OutsideDomainError("index contour leaves the domain");
  return winding_number([&](const Vec2& a) { return dom.robin_gradient(a); }, a0, eps, samples);
}

namespace detail {

inline double index_radius(const DomainModel& dom, const Vec2& a, const std::vector<CriticalPointReport>& others) {
  double eps = std::min(0.1, 0.5 * dom.boundary_distance(a));
  for (const auto& o : others)
    if (o.location != a) eps = std::min(eps, 0.5 * (o.location - a).norm());
  return eps;
}

}  // namespace detail

/// Newton on grad h from a grid_n x grid_n lattice of seeds in [lo, hi]; roots deduplicated.
inline std::vector<CriticalPointReport> find_critical_points(const DomainModel& dom, const Vec2& lo, const Vec2& hi,
                                                             int grid_n = 11) {
  std::vector<CriticalPointReport> found;
  if (!dom.has_regular_part()) return found;
  if (grid_n < 1) throw InvalidArgument("grid_n must be positive");
  for (int i = 0; i < grid_n; ++i)
    for (int j = 0; j < grid_n; ++j) {
      const double si = grid_n == 1 ? 0.5 : static_cast<double>(i) / (grid_n - 1);
      const double sj = grid_n == 1 ? 0.5 : static_cast<double>(j) / (grid_n - 1);
      Vec2 a(lo.x() + si * (hi.x() - lo.x()), lo.y() + sj * (hi.y() - lo.y()));
      if (!dom.contains(a)) continue;
      bool converged = false;
      for (int it = 0; it < 60; ++it) {
        const Vec2 g = dom.robin_gradient(a);
        if (g.norm() <= 1e-10) {
          converged = true;
          break;
        }
        const Mat2 h = dom.robin_hessian(a);
        if (std::abs(h.determinant()) < 1e-300) break;
        Vec2 step = -h.partialPivLu().solve(g);
        // keep iterates inside the domain
        double lambda = 1.0;
        while (!dom.contains(a + lambda * step) && lambda > 1e-8) lambda *= 0.5;
        if (!dom.contains(a + lambda * step)) break;
        a += lambda * step;
        if (!std::isfinite(a.norm()) || a.norm() > 1e8) break;
      }
      if (!converged) continue;
      if (a.x() < lo.x() - 1e-9 || a.x() > hi.x() + 1e-9 || a.y() < lo.y() - 1e-9 || a.y() > hi.y() + 1e-9) continue;
      bool duplicate = false;
      for (const auto& f : found)
        if ((f.location - a).norm() < 1e-8) duplicate = true;
      if (duplicate) continue;
      CriticalPointReport rep;
      rep.location = a;
      rep.gradient_norm = dom.robin_gradient(a).norm();
      rep.hessian = dom.robin_hessian(a);
      found.push_back(rep);
    }
  for (auto& rep : found) {
    const double eps = detail::index_radius(dom, rep.location, found);
    rep.brouwer_index = brouwer_index(dom, rep.location, eps);
    const double hscale = std::max(1.0, rep.hessian.cwiseAbs().maxCoeff());
    rep.nondegenerate = std::abs(rep.hessian.determinant()) > 1e-10 * hscale * hscale;
    rep.stable = rep.brouwer_index != 0;
  }
  return found;
}

/// Checks grad_{z_j} F(c^) = Gamma_j (sum Gamma) grad h(c) and
/// P_D grad F(c^) = (1/N)(sum Gamma)^2 (grad h(c))^; returns the larger max-norm discrepancy.
inline double f_gradient_identity_check(const VortexSystem& sys, const Vec2& c) {
  sys.domain().require_inside(c);
  const Eigen::Index n = sys.size();
  const Vec grad = f_gradient(sys, diagonal(c, n));
  const Vec2 gh = sys.domain().has_regular_part() ? sys.domain().robin_gradient(c) : Vec2::Zero();
  const double total = sys.total_vorticity();
  double err = 0.0;
  Vec2 mean = Vec2::Zero();
  for (Eigen::Index j = 0; j < n; ++j) {
    const Vec2 lhs = grad.segment<2>(2 * j);
    err = std::max(err, (lhs - sys.strength(j) * total * gh).cwiseAbs().maxCoeff());
    mean += lhs / static_cast<double>(n);
  }
  err = std::max(err, (mean - total * total / static_cast<double>(n) * gh).cwiseAbs().maxCoeff());
  return err;
}

}  // namespace nvortex
