#pragma once

#include "nvortex/domain.hpp"
#include "nvortex/errors.hpp"
#include "nvortex/linalg.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

namespace nvortex {

/// N point vortices with strengths Gamma_k != 0 living in a domain.
class VortexSystem {
public:
  static constexpr double kDefaultCollisionEps = 1e-12;

  explicit VortexSystem(std::vector<double> strengths, DomainModel domain = DomainModel::plane(),
                        double collision_eps = kDefaultCollisionEps)
      : strengths_(std::move(strengths)), domain_(domain), collision_eps_(collision_eps) {
    if (strengths_.empty()) throw InvalidArgument("a vortex system needs at least one vortex");
    for (double g : strengths_)
      if (g == 0.0 || !std::isfinite(g)) throw InvalidArgument("vortex strengths must be finite and nonzero");
    if (!(collision_eps_ > 0.0)) throw InvalidArgument("collision epsilon must be positive");
  }

  Eigen::Index size() const { return static_cast<Eigen::Index>(strengths_.size()); }
  Eigen::Index dim() const { return 2 * size(); }
  double strength(Eigen::Index k) const { return strengths_[static_cast<std::size_t>(k)]; }
  const std::vector<double>& strengths() const { return strengths_; }
  const DomainModel& domain() const { return domain_; }
  double collision_eps() const { return collision_eps_; }

  double total_vorticity() const { return std::accumulate(strengths_.begin(), strengths_.end(), 0.0); }

  /// M_Gamma w = (Gamma_1 w_1, ..., Gamma_N w_N).
  Vec apply_vorticity(const Vec& w) const {
    Vec out(w.size());
    for (Eigen::Index k = 0; k < size(); ++k) out.segment<2>(2 * k) = strength(k) * w.segment<2>(2 * k);
    return out;
  }
  Vec apply_inverse_vorticity(const Vec& w) const {
    Vec out(w.size());
    for (Eigen::Index k = 0; k < size(); ++k) out.segment<2>(2 * k) = w.segment<2>(2 * k) / strength(k);
    return out;
  }
  Mat vorticity_matrix() const {
    Vec d(dim());
    for (Eigen::Index k = 0; k < size(); ++k) d.segment<2>(2 * k).setConstant(strength(k));
    return d.asDiagonal();
  }

  /// Sum_k Gamma_k z_k.
  Vec2 center_of_vorticity(const Vec& z) const {
    Vec2 c = Vec2::Zero();
    for (Eigen::Index k = 0; k < size(); ++k) c += strength(k) * point(z, k);
    return c;
  }
  /// Sum_k Gamma_k |z_k|^2.
  double angular_impulse(const Vec& z) const {
    double s = 0.0;
    for (Eigen::Index k = 0; k < size(); ++k) s += strength(k) * point(z, k).squaredNorm();
    return s;
  }

  VortexSystem with_domain(DomainModel d) const { return VortexSystem(strengths_, d, collision_eps_); }

private:
  std::vector<double> strengths_;
  DomainModel domain_;
  double collision_eps_;
};

/// A point of R^{2N} read as N planar positions, interleaved (x1, y1, ..., xN, yN).
class Configuration {
public:
  Configuration() = default;
  explicit Configuration(Vec z) : z_(std::move(z)) {
    if (z_.size() % 2 != 0) throw InvalidArgument("configuration length must be even");
  }
  static Configuration from_points(const std::vector<Vec2>& pts) {
    Vec z(2 * static_cast<Eigen::Index>(pts.size()));
    for (std::size_t k = 0; k < pts.size(); ++k) z.segment<2>(2 * static_cast<Eigen::Index>(k)) = pts[k];
    return Configuration(std::move(z));
  }

  const Vec& coords() const { return z_; }
  Eigen::Index size() const { return z_.size() / 2; }
  Vec2 operator[](Eigen::Index k) const { return point(z_, k); }

  double min_pair_distance() const {
    double m = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < size(); ++j)
      for (Eigen::Index k = j + 1; k < size(); ++k) m = std::min(m, ((*this)[j] - (*this)[k]).norm());
    return m;
  }

private:
  Vec z_;
};

/// Regular N-gon of the given radius, vertex k at angle 2 pi k / N (k = 0..N-1).
inline Configuration regular_polygon(Eigen::Index n, double radius = 1.0, double phase = 0.0) {
  Vec z(2 * n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double a = phase + kTwoPi * static_cast<double>(k) / static_cast<double>(n);
    z.segment<2>(2 * k) = radius * Vec2(std::cos(a), std::sin(a));
  }
  return Configuration(z);
}

}  // namespace nvortex
