#pragma once

// Model planar domains with explicit regular parts g of the Dirichlet Green's
// function G(x, y) = -(1/2pi) log|x - y| - g(x, y).
//
// Sign convention: g(x, y) + (1/2pi) log|x - y| vanishes on the boundary, so the
// Robin function h(a) = g(a, a) tends to +infinity at the boundary.

#include "nvortex/errors.hpp"
#include "nvortex/linalg.hpp"

#include <limits>
#include <string>
#include <variant>

namespace nvortex {

namespace domains {

/// Data of g = -(1/4pi) log Q(x, y) for a quadratic Q built from an image point.
struct ImageQuadratic {
  double q;
  Vec2 grad_x;
  Vec2 grad_y;
  Mat2 hess_xx;  // d^2 Q / dx dx
  Mat2 hess_xy;  // d^2 Q / dx_a dy_b
};

struct Plane {
  static constexpr const char* name = "plane";
  bool contains(const Vec2&) const { return true; }
  double boundary_distance(const Vec2&) const { return std::numeric_limits<double>::infinity(); }
  double inradius() const { return std::numeric_limits<double>::infinity(); }
};

/// Unit disc; the image of y is y / |y|^2, Q = 1 - 2 x.y + |x|^2 |y|^2.
struct UnitDisc {
  static constexpr const char* name = "unit_disc";
  bool contains(const Vec2& x) const { return x.squaredNorm() < 1.0; }
  double boundary_distance(const Vec2& x) const { return 1.0 - x.norm(); }
  double inradius() const { return 1.0; }

  ImageQuadratic quadratic(const Vec2& x, const Vec2& y) const {
    const double xx = x.squaredNorm(), yy = y.squaredNorm();
    ImageQuadratic d;
    d.q = 1.0 - 2.0 * x.dot(y) + xx * yy;
    d.grad_x = -2.0 * y + 2.0 * yy * x;
    d.grad_y = -2.0 * x + 2.0 * xx * y;
    d.hess_xx = 2.0 * yy * Mat2::Identity();
    d.hess_xy = -2.0 * Mat2::Identity() + 4.0 * x * y.transpose();
    return d;
  }
};

/// Upper half plane {y > 0}; the image of y is its reflection.
struct UpperHalfPlane {
  static constexpr const char* name = "half_plane";
  bool contains(const Vec2& x) const { return x.y() > 0.0; }
  double boundary_distance(const Vec2& x) const { return x.y(); }
  double inradius() const { return std::numeric_limits<double>::infinity(); }

  ImageQuadratic quadratic(const Vec2& x, const Vec2& y) const {
    const double dx = x.x() - y.x(), sy = x.y() + y.y();
    ImageQuadratic d;
    d.q = dx * dx + sy * sy;
    d.grad_x = Vec2(2.0 * dx, 2.0 * sy);
    d.grad_y = Vec2(-2.0 * dx, 2.0 * sy);
    d.hess_xx = 2.0 * Mat2::Identity();
    d.hess_xy << -2.0, 0.0, 0.0, 2.0;
    return d;
  }
};

}  // namespace domains

/// A planar domain together with the regular part g of its Green's function.
class DomainModel {
public:
  enum class Kind { Plane, UnitDisc, HalfPlane };

  DomainModel() : model_(domains::Plane{}) {}
  static DomainModel plane() { return DomainModel(domains::Plane{}); }
  static DomainModel unit_disc() { return DomainModel(domains::UnitDisc{}); }
  static DomainModel half_plane() { return DomainModel(domains::UpperHalfPlane{}); }

  /// Accepts "plane", "unit_disc" and "half_plane".
  static DomainModel from_name(const std::string& name) {
    if (name == "plane") return plane();
    if (name == "unit_disc" || name == "disc") return unit_disc();
    if (name == "half_plane") return half_plane();
    if (name == "annulus") throw InvalidArgument("annulus domains are not implemented");
    throw InvalidArgument("unknown domain kind '" + name + "'");
  }

  Kind kind() const { return static_cast<Kind>(model_.index()); }
  std::string name() const {
    return std::visit([](const auto& m) { return std::string(m.name); }, model_);
  }
  /// False for the whole plane, where g vanishes identically.
  bool has_regular_part() const { return kind() != Kind::Plane; }

  bool contains(const Vec2& x) const {
    return std::visit([&](const auto& m) { return m.contains(x); }, model_);
  }
  double boundary_distance(const Vec2& x) const {
    return std::visit([&](const auto& m) { return m.boundary_distance(x); }, model_);
  }
  double inradius() const {
    return std::visit([](const auto& m) { return m.inradius(); }, model_);
  }

  double g(const Vec2& x, const Vec2& y) const {
    if (!has_regular_part()) return 0.0;
    return -std::log(quadratic(x, y).q) / (4.0 * kPi);
  }
  Vec2 grad_x(const Vec2& x, const Vec2& y) const {
    if (!has_regular_part()) return Vec2::Zero();
    const auto d = quadratic(x, y);
    return -d.grad_x / (4.0 * kPi * d.q);
  }
  Mat2 hess_xx(const Vec2& x, const Vec2& y) const {
    if (!has_regular_part()) return Mat2::Zero();
    const auto d = quadratic(x, y);
    return -(d.hess_xx / d.q - d.grad_x * d.grad_x.transpose() / (d.q * d.q)) / (4.0 * kPi);
  }
  Mat2 hess_xy(const Vec2& x, const Vec2& y) const {
    if (!has_regular_part()) return Mat2::Zero();
    const auto d = quadratic(x, y);
    return -(d.hess_xy / d.q - d.grad_x * d.grad_y.transpose() / (d.q * d.q)) / (4.0 * kPi);
  }

  /// h(a) = g(a, a).
  double robin(const Vec2& a) const {
    require_inside(a);
    return g(a, a);
  }
  Vec2 robin_gradient(const Vec2& a) const {
    require_inside(a);
    return 2.0 * grad_x(a, a);
  }
  Mat2 robin_hessian(const Vec2& a) const {
    require_inside(a);
    return 2.0 * (hess_xx(a, a) + hess_xy(a, a));
  }

  void require_inside(const Vec2& a) const {
    if (!contains(a))
      throw OutsideDomainError("point (" + std::to_string(a.x()) + ", " + std::to_string(a.y()) +
                               ") is not in " + name());
  }

private:
  using Variant = std::variant<domains::Plane, domains::UnitDisc, domains::UpperHalfPlane>;
  explicit DomainModel(Variant m) : model_(m) {}

  domains::ImageQuadratic quadratic(const Vec2& x, const Vec2& y) const {
    return std::visit(
        [&](const auto& m) -> domains::ImageQuadratic {
          if constexpr (requires { m.quadratic(x, y); }) {
            return m.quadratic(x, y);
          } else {
            return {1.0, Vec2::Zero(), Vec2::Zero(), Mat2::Zero(), Mat2::Zero()};
          }
        },
        model_);
  }

  Variant model_;
};

}  // namespace nvortex
