#pragma once

// Truncated Fourier loops u(t) = sum_{|k|<=n} B_k(t) alpha_k with B_k(t) = e^{-k J_N t},
// i.e. alpha_k is rotated counter-clockwise by k t. The H^1 inner product on these
// coefficients is <u, v>_X = 2 pi sum_k (1 + k^2) <alpha_k, beta_k>.

#include "nvortex/symmetry.hpp"

#include <vector>

namespace nvortex {

class FourierLoop {
public:
  FourierLoop() = default;
  FourierLoop(int n, Eigen::Index points) : n_(n), points_(points), coeffs_(Vec::Zero((2 * n + 1) * 2 * points)) {
    if (n < 0) throw InvalidArgument("truncation order must be nonnegative");
    if (points < 1) throw InvalidArgument("loop needs at least one point");
  }
  FourierLoop(int n, Eigen::Index points, Vec coeffs) : FourierLoop(n, points) {
    if (coeffs.size() != coeffs_.size()) throw InvalidArgument("coefficient vector has the wrong length");
    coeffs_ = std::move(coeffs);
  }

  static FourierLoop constant(const Vec& c, int n) {
    FourierLoop u(n, c.size() / 2);
    u.mode(0) = c;
    return u;
  }
  /// Single mode B_k(t) alpha.
  static FourierLoop single_mode(const Vec& alpha, int k, int n) {
    if (std::abs(k) > n) throw InvalidArgument("mode outside truncation");
    FourierLoop u(n, alpha.size() / 2);
    u.mode(k) = alpha;
    return u;
  }

  int order() const { return n_; }
  Eigen::Index points() const { return points_; }
  Eigen::Index block() const { return 2 * points_; }
  Eigen::Index dim() const { return coeffs_.size(); }
  const Vec& coeffs() const { return coeffs_; }
  Vec& coeffs() { return coeffs_; }

  static Eigen::Index offset(int k, int n, Eigen::Index block) { return (k + n) * block; }
  Eigen::VectorBlock<Vec> mode(int k) { return coeffs_.segment(offset(k, n_, block()), block()); }
  Eigen::VectorBlock<const Vec> mode(int k) const { return coeffs_.segment(offset(k, n_, block()), block()); }

  /// Default collocation size 4n + 4.
  static int default_nodes(int n) { return 4 * n + 4; }

  Vec evaluate(double t) const {
    Vec out = Vec::Zero(block());
    for (int k = -n_; k <= n_; ++k) out += rotate_all(mode(k), k * t);
    return out;
  }
  /// Column j holds u(2 pi j / m).
  Mat sample(int m) const {
    Mat out(block(), m);
    for (int j = 0; j < m; ++j) out.col(j) = evaluate(kTwoPi * j / m);
    return out;
  }
  /// Trapezoid projection onto modes |k| <= n; exact for trigonometric polynomials of degree < m - n.
  static FourierLoop from_samples(const Mat& values, int n) {
    const int m = static_cast<int>(values.cols());
    FourierLoop u(n, values.rows() / 2);
    for (int k = -n; k <= n; ++k) {
      Vec acc = Vec::Zero(values.rows());
      for (int j = 0; j < m; ++j) acc += rotate_all(values.col(j), -k * kTwoPi * j / m);
      u.mode(k) = acc / m;
    }
    return u;
  }

  /// Same loop, truncation changed (modes beyond the new order are dropped).
  FourierLoop retruncated(int n) const {
    FourierLoop u(n, points_);
    for (int k = -std::min(n, n_); k <= std::min(n, n_); ++k) u.mode(k) = mode(k);
    return u;
  }

  double inner_x(const FourierLoop& v) const {
    check_compatible(v);
    double s = 0.0;
    for (int k = -n_; k <= n_; ++k) s += (1.0 + k * k) * mode(k).dot(v.mode(k));
    return kTwoPi * s;
  }
  double norm_x() const { return std::sqrt(inner_x(*this)); }
  double inner_l2(const FourierLoop& v) const {
    check_compatible(v);
    return kTwoPi * coeffs_.dot(v.coeffs_);
  }

  /// u'(t): mode k goes to -k J_N alpha_k.
  FourierLoop derivative() const {
    FourierLoop d(n_, points_);
    for (int k = -n_; k <= n_; ++k) d.mode(k) = -static_cast<double>(k) * apply_jn(mode(k));
    return d;
  }
  /// (theta * u)(t) = u(t + theta).
  FourierLoop shifted(double theta) const {
    FourierLoop s(n_, points_);
    for (int k = -n_; k <= n_; ++k) s.mode(k) = rotate_all(mode(k), k * theta);
    return s;
  }
  /// Orthogonal projection P_D onto constant diagonal loops (a, ..., a).
  FourierLoop diagonal_part() const {
    FourierLoop p(n_, points_);
    Vec2 mean = Vec2::Zero();
    for (Eigen::Index j = 0; j < points_; ++j) mean += mode(0).segment<2>(2 * j);
    mean /= static_cast<double>(points_);
    for (Eigen::Index j = 0; j < points_; ++j) p.mode(0).segment<2>(2 * j) = mean;
    return p;
  }
  /// Sum_{|k| > n/2} (1 + k^2)|alpha_k|^2 / ||u||^2, a resolution diagnostic.
  double tail_energy_fraction() const {
    double tail = 0.0, total = 0.0;
    for (int k = -n_; k <= n_; ++k) {
      const double e = (1.0 + k * k) * mode(k).squaredNorm();
      total += e;
      if (2 * std::abs(k) > n_) tail += e;
    }
    return total > 0.0 ? tail / total : 0.0;
  }

  FourierLoop operator+(const FourierLoop& o) const {
    check_compatible(o);
    return {n_, points_, coeffs_ + o.coeffs_};
  }
  FourierLoop operator-(const FourierLoop& o) const {
    check_compatible(o);
    return {n_, points_, coeffs_ - o.coeffs_};
  }
  FourierLoop operator*(double s) const { return {n_, points_, s * coeffs_}; }

  void check_compatible(const FourierLoop& o) const {
    if (o.n_ != n_ || o.points_ != points_) throw InvalidArgument("loops have different truncation or size");
  }

private:
  int n_ = 0;
  Eigen::Index points_ = 0;
  Vec coeffs_;
};

/// Diagonal of X-inner-product weights 2 pi (1 + k^2), one entry per coefficient.
inline Vec x_weights(int n, Eigen::Index points) {
  Vec w(FourierLoop(n, points).dim());
  const Eigen::Index b = 2 * points;
  for (int k = -n; k <= n; ++k) w.segment(FourierLoop::offset(k, n, b), b).setConstant(kTwoPi * (1.0 + k * k));
  return w;
}

/// Fixed-point space X^gamma = {u : gamma * u = u}.
class SymmetrySubspace {
public:
  explicit SymmetrySubspace(SymmetryElement gamma) : gamma_(std::move(gamma)) {}

  const SymmetryElement& gamma() const { return gamma_; }

  FourierLoop apply(const FourierLoop& u) const {
    if (static_cast<Eigen::Index>(gamma_.size()) != u.points()) throw InvalidArgument("symmetry size mismatch");
    FourierLoop out(u.order(), u.points());
    for (int k = -u.order(); k <= u.order(); ++k)
      out.mode(k) = gamma_.permute(rotate_all(u.mode(k), k * gamma_.theta()));
    return out;
  }

  /// Average over the cyclic group generated by gamma; orthogonal for the H^1 product.
  FourierLoop project(const FourierLoop& u) const {
    FourierLoop acc = u;
    FourierLoop g = u;
    for (int i = 1; i < gamma_.order(); ++i) {
      g = apply(g);
      acc = acc + g;
    }
    return acc * (1.0 / gamma_.order());
  }

  /// Strength-checked projection.
  FourierLoop project(const VortexSystem& sys, const FourierLoop& u) const {
    gamma_.check_strengths(sys);
    return project(u);
  }

  bool contains(const FourierLoop& u, double tol) const {
    return (apply(u) - u).coeffs().cwiseAbs().maxCoeff() <= tol * std::max(1.0, u.coeffs().cwiseAbs().maxCoeff());
  }

  /// Orthonormal basis (Euclidean on coefficients, equivalently H^1-orthogonal) of X^gamma cap X_n.
  Mat basis(int n, Eigen::Index points) const {
    const Eigen::Index b = 2 * points;
    std::vector<Mat> per_mode;
    Eigen::Index total = 0;
    for (int k = -n; k <= n; ++k) {
      Mat proj = Mat::Zero(b, b);
      // projector restricted to the mode-k coefficient block
      for (Eigen::Index c = 0; c < b; ++c) {
        Vec cur = Vec::Unit(b, c);
        Vec acc = cur;
        for (int i = 1; i < gamma_.order(); ++i) {
          cur = gamma_.permute(rotate_all(cur, k * gamma_.theta()));
          acc += cur;
        }
        proj.col(c) = acc / gamma_.order();
      }
      Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (proj + proj.transpose()));
      Mat cols(b, 0);
      for (Eigen::Index i = 0; i < b; ++i)
        if (es.eigenvalues()(i) > 0.5) {
          cols.conservativeResize(b, cols.cols() + 1);
          cols.col(cols.cols() - 1) = es.eigenvectors().col(i);
        }
      total += cols.cols();
      per_mode.push_back(cols);
    }
    Mat q = Mat::Zero((2 * n + 1) * b, total);
    Eigen::Index col = 0;
    for (int k = -n; k <= n; ++k) {
      const Mat& c = per_mode[static_cast<std::size_t>(k + n)];
      q.block(FourierLoop::offset(k, n, b), col, b, c.cols()) = c;
      col += c.cols();
    }
    return q;
  }

private:
  SymmetryElement gamma_;
};

/// Loop-level distance of u to the orbit S^1 * ref: min over theta of ||theta * u - ref||_X.
/// Coarse scan followed by golden-section refinement. Returns {distance, theta}.
inline std::pair<double, double> orbit_distance(const FourierLoop& u, const FourierLoop& ref, int scan = 256) {
  u.check_compatible(ref);
  auto dist2 = [&](double th) {
    const FourierLoop d = u.shifted(th) - ref;
    return d.inner_x(d);
  };
  double best = std::numeric_limits<double>::infinity(), best_t = 0.0;
  const double h = kTwoPi / scan;
  for (int i = 0; i < scan; ++i) {
    const double t = h * i;
    const double v = dist2(t);
    if (v < best) {
      best = v;
      best_t = t;
    }
  }
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = best_t - h, b = best_t + h;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = dist2(c), fd = dist2(d);
  for (int it = 0; it < 80 && (b - a) > 1e-14; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = dist2(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = dist2(d);
    }
  }
  const double t = 0.5 * (a + b);
  const double v = dist2(t);
  if (v < best) {
    best = v;
    best_t = t;
  }
  return {std::sqrt(std::max(0.0, best)), best_t};
}

}  // namespace nvortex
