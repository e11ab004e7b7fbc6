#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

namespace nvortex {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Flat interleaved layout (x1, y1, ..., xN, yN) throughout.
inline Vec2 point(const Vec& z, Eigen::Index k) { return z.segment<2>(2 * k); }

/// J = [[0, 1], [-1, 0]].
inline Mat2 symplectic2() {
  Mat2 j;
  j << 0.0, 1.0, -1.0, 0.0;
  return j;
}

/// J v for v in R^2.
inline Vec2 apply_j(const Vec2& v) { return {v.y(), -v.x()}; }

/// J_N w, blockwise J.
inline Vec apply_jn(const Vec& w) {
  Vec out(w.size());
  for (Eigen::Index k = 0; k + 1 < w.size(); k += 2) {
    out[k] = w[k + 1];
    out[k + 1] = -w[k];
  }
  return out;
}

inline Mat symplectic_matrix(Eigen::Index n_points) {
  Mat j = Mat::Zero(2 * n_points, 2 * n_points);
  for (Eigen::Index k = 0; k < n_points; ++k) j.block<2, 2>(2 * k, 2 * k) = symplectic2();
  return j;
}

/// e^{-phi J} on R^2: counter-clockwise rotation by phi.
inline Mat2 rotation(double phi) {
  Mat2 r;
  const double c = std::cos(phi), s = std::sin(phi);
  r << c, -s, s, c;
  return r;
}

/// e^{-phi J_N} w, every point rotated counter-clockwise by phi.
inline Vec rotate_all(const Vec& w, double phi) {
  const double c = std::cos(phi), s = std::sin(phi);
  Vec out(w.size());
  for (Eigen::Index k = 0; k + 1 < w.size(); k += 2) {
    out[k] = c * w[k] - s * w[k + 1];
    out[k + 1] = s * w[k] + c * w[k + 1];
  }
  return out;
}

inline bool is_symmetric(const Mat& m, double rel_tol) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

/// Orthonormal basis of the orthogonal complement of span(columns of `v`).
inline Mat orthogonal_complement(const Mat& v, double tol = 1e-12) {
  const Eigen::Index dim = v.rows();
  if (v.cols() == 0) return Mat::Identity(dim, dim);
  Eigen::JacobiSVD<Mat> svd(v, Eigen::ComputeFullU);
  Eigen::Index rank = 0;
  const double smax = svd.singularValues()(0);
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > tol * std::max(1.0, smax)) ++rank;
  return svd.matrixU().rightCols(dim - rank);
}

}  // namespace nvortex
