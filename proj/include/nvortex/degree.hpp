#pragma once

// S^1-equivariant degree for gradient maps: linear maps on isotypical
// decompositions, multiplicativity, orbit magnitudes and the Galerkin limit
// on truncated loop spaces.

#include "nvortex/periodic.hpp"
#include "nvortex/robin.hpp"

#include <map>
#include <optional>

namespace nvortex {

/// Finitely supported integer sequence (d_k)_{k >= 0}; zero entries are not stored.
class DegreeVector {
public:
  DegreeVector() = default;
  DegreeVector(std::initializer_list<int> values) {
    int k = 0;
    for (int v : values) set(k++, v);
  }

  int operator[](int k) const {
    const auto it = entries_.find(k);
    return it == entries_.end() ? 0 : it->second;
  }
  void set(int k, int v) {
    if (k < 0) throw InvalidArgument("degree index must be nonnegative");
    if (v == 0)
      entries_.erase(k);
    else
      entries_[k] = v;
  }
  const std::map<int, int>& entries() const { return entries_; }
  int max_index() const { return entries_.empty() ? 0 : entries_.rbegin()->first; }

  bool operator==(const DegreeVector& o) const { return entries_ == o.entries_; }

  static DegreeVector unit() { return {1}; }

private:
  std::map<int, int> entries_;
};

/// One block L_k of an equivariant symmetric map. For k >= 1 the block acts on
/// V_k ~ sum of copies of R^2[k]; `generator` is the infinitesimal rotation
/// (d/d theta of the action at theta = 0, divided by k). Empty generator: the
/// standard one, -J on consecutive pairs.
struct IsotypicalBlock {
  int k = 0;
  Mat matrix;
  Mat generator;
};

class IsotypicalMap {
public:
  IsotypicalMap() = default;
  explicit IsotypicalMap(std::vector<IsotypicalBlock> blocks) {
    for (auto& b : blocks) add(std::move(b));
  }

  void add(IsotypicalBlock b) {
    if (b.k < 0) throw InvalidArgument("isotypical index must be nonnegative");
    if (b.matrix.rows() != b.matrix.cols()) throw InvalidArgument("block must be square");
    if (b.k >= 1 && b.matrix.rows() % 2 != 0) throw InvalidArgument("blocks V_k with k >= 1 are even-dimensional");
    if (!is_symmetric(b.matrix, 1e-12)) throw InvalidArgument("block is not symmetric");
    if (b.k >= 1) {
      if (b.generator.size() == 0) b.generator = -symplectic_matrix(b.matrix.rows() / 2);
      if (b.generator.rows() != b.matrix.rows() || b.generator.cols() != b.matrix.cols())
        throw InvalidArgument("rotation generator has the wrong size");
      const double scale = std::max(1.0, b.matrix.cwiseAbs().maxCoeff());
      if ((b.generator * b.matrix - b.matrix * b.generator).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw InvalidArgument("block does not commute with the rotation action");
    }
    for (auto& existing : blocks_)
      if (existing.k == b.k) {
        // merge into a block-diagonal block of the same type
        existing = merge(existing, b);
        return;
      }
    blocks_.push_back(std::move(b));
  }

  const std::vector<IsotypicalBlock>& blocks() const { return blocks_; }

  /// Block-diagonal sum of two maps.
  IsotypicalMap direct_sum(const IsotypicalMap& o) const {
    IsotypicalMap out = *this;
    for (const auto& b : o.blocks_) out.add(b);
    return out;
  }

private:
  static IsotypicalBlock merge(const IsotypicalBlock& a, const IsotypicalBlock& b) {
    const Eigen::Index na = a.matrix.rows(), nb = b.matrix.rows();
    IsotypicalBlock m{a.k, Mat::Zero(na + nb, na + nb), Mat()};
    m.matrix.topLeftCorner(na, na) = a.matrix;
    m.matrix.bottomRightCorner(nb, nb) = b.matrix;
    if (a.k >= 1) {
      m.generator = Mat::Zero(na + nb, na + nb);
      m.generator.topLeftCorner(na, na) = a.generator;
      m.generator.bottomRightCorner(nb, nb) = b.generator;
    }
    return m;
  }

  std::vector<IsotypicalBlock> blocks_;
};

namespace detail {

struct BlockSpectrum {
  int sign = 1;
  int morse = 0;
};

inline BlockSpectrum block_spectrum(const IsotypicalBlock& b, double threshold) {
  BlockSpectrum s;
  if (b.matrix.rows() == 0) return s;
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Mat>(b.matrix, Eigen::EigenvaluesOnly).eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (std::abs(ev[i]) <= threshold)
      throw SingularBlock("block k=" + std::to_string(b.k) + " has eigenvalue " + std::to_string(ev[i]));
    if (ev[i] < 0.0) ++s.morse;
  }
  s.sign = s.morse % 2 == 0 ? 1 : -1;
  if (b.k >= 1 && s.morse % 2 != 0)
    throw InvalidArgument("Morse index of an equivariant block must be even");
  return s;
}

}  // namespace detail

/// d_0 = sign det L_0 (1 if V_0 = 0); d_k = (1/2) d_0 mu_k for k >= 1.
inline DegreeVector linear_degree(const IsotypicalMap& map, double threshold = 1e-10) {
  int sign0 = 1;
  std::map<int, int> morse;
  for (const auto& b : map.blocks()) {
    const auto s = detail::block_spectrum(b, threshold);
    if (b.k == 0)
      sign0 = s.sign;
    else if (b.matrix.rows() > 0)
      morse[b.k] += s.morse;
  }
  DegreeVector d;
  d.set(0, sign0);
  for (const auto& [k, mu] : morse) d.set(k, sign0 * mu / 2);
  return d;
}

/// c_0 = a_0 b_0, c_k = a_k b_0 + a_0 b_k.
inline DegreeVector multiply_degrees(const DegreeVector& a, const DegreeVector& b) {
  DegreeVector c;
  c.set(0, a[0] * b[0]);
  const int top = std::max(a.max_index(), b.max_index());
  for (int k = 1; k <= top; ++k) c.set(k, a[k] * b[0] + a[0] * b[k]);
  return c;
}

/// |d_k| of a non-degenerate orbit with isotropy Z_k is 1; the slice Jacobian must be invertible.
inline int orbit_degree_magnitude(const Mat& slice_jacobian, int isotropy_k, double threshold = 1e-10) {
  if (isotropy_k < 1) throw InvalidArgument("orbit isotropy index must be at least 1");
  if (slice_jacobian.rows() != slice_jacobian.cols()) throw InvalidArgument("slice Jacobian must be square");
  if (slice_jacobian.rows() == 0) return 1;
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Mat>(slice_jacobian).singularValues();
  const double smin = sv[sv.size() - 1];
  if (smin <= threshold * std::max(1.0, sv[0]))
    throw DegenerateOrbit("slice Jacobian is singular (smallest singular value " + std::to_string(smin) + ")");
  return 1;
}

/// Isotypical decomposition of a map on X_n: V_0 = constant loops, V_k = modes +-k.
/// `jacobian` must be in H^1-orthonormal coordinates (see symmetric_jacobian).
inline IsotypicalMap loop_isotypical_map(const Mat& jacobian, int n, Eigen::Index points) {
  const Eigen::Index b = 2 * points;
  if (jacobian.rows() != (2 * n + 1) * b || jacobian.cols() != jacobian.rows())
    throw InvalidArgument("Jacobian size does not match the truncation");
  const Mat sym = 0.5 * (jacobian + jacobian.transpose());
  if ((sym - jacobian).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, jacobian.cwiseAbs().maxCoeff()))
    throw InvalidArgument("loop Jacobian is not symmetric in H^1 coordinates");
  for (int k = -n; k <= n; ++k)
    for (int l = -n; l <= n; ++l)
      if (std::abs(k) != std::abs(l) &&
          sym.block(FourierLoop::offset(k, n, b), FourierLoop::offset(l, n, b), b, b).cwiseAbs().maxCoeff() >
              1e-9 * std::max(1.0, sym.cwiseAbs().maxCoeff()))
        throw InvalidArgument("loop Jacobian couples different isotypical components");

  IsotypicalMap map;
  map.add({0, sym.block(FourierLoop::offset(0, n, b), FourierLoop::offset(0, n, b), b, b), Mat()});
  const Mat jn = symplectic_matrix(points);
  for (int k = 1; k <= n; ++k) {
    Mat blk(2 * b, 2 * b);
    const Eigen::Index pk = FourierLoop::offset(k, n, b), mk = FourierLoop::offset(-k, n, b);
    blk.topLeftCorner(b, b) = sym.block(pk, pk, b, b);
    blk.topRightCorner(b, b) = sym.block(pk, mk, b, b);
    blk.bottomLeftCorner(b, b) = sym.block(mk, pk, b, b);
    blk.bottomRightCorner(b, b) = sym.block(mk, mk, b, b);
    // mode k rotates by +k theta (generator -J_N), mode -k by -k theta
    Mat gen = Mat::Zero(2 * b, 2 * b);
    gen.topLeftCorner(b, b) = -jn;
    gen.bottomRightCorner(b, b) = jn;
    map.add({k, blk, gen});
  }
  return map;
}

/// sdeg(L + P_0, X_n): d_0 = 1 and d_k = N for 1 <= k <= n.
inline DegreeVector reference_degree(const VortexSystem& sys, int n) {
  const LoopProblem prob{sys.with_domain(DomainModel::plane()), 0.0, Vec2::Zero()};
  Mat lp = Mat::Zero((2 * n + 1) * sys.dim(), (2 * n + 1) * sys.dim());
  for (int k = -n; k <= n; ++k) {
    const Eigen::Index o = FourierLoop::offset(k, n, sys.dim());
    for (Eigen::Index a = 0; a < sys.size(); ++a)
      lp.block<2, 2>(o + 2 * a, o + 2 * a) =
          (k == 0 ? 1.0 : -(static_cast<double>(k) / (1.0 + k * k)) * sys.strength(a)) * Mat2::Identity();
  }
  return linear_degree(loop_isotypical_map(lp, n, sys.size()));
}

/// Truncated degree of L - P_n A for the quadratic Hamiltonian H(u) = (1/2) u^T A u,
/// normalized by d_0 * sdeg(L + P_0, X_n), evaluated at n and 2n.
inline DegreeVector galerkin_linear_degree(const VortexSystem& sys, const Mat& a, int n = 4) {
  if (a.rows() != sys.dim() || a.cols() != sys.dim()) throw InvalidArgument("Hamiltonian matrix has the wrong size");
  if (!is_symmetric(a, 1e-12)) throw InvalidArgument("Hamiltonian matrix must be symmetric");
  auto at = [&](int order) {
    const Eigen::Index b = sys.dim();
    Mat jac = Mat::Zero((2 * order + 1) * b, (2 * order + 1) * b);
    for (int k = -order; k <= order; ++k) {
      const Eigen::Index o = FourierLoop::offset(k, order, b);
      jac.block(o, o, b, b) = -a / (1.0 + k * k);
      for (Eigen::Index j = 0; j < sys.size(); ++j)
        jac.block<2, 2>(o + 2 * j, o + 2 * j) -= (static_cast<double>(k) / (1.0 + k * k)) * sys.strength(j) * Mat2::Identity();
    }
    const DegreeVector raw = linear_degree(loop_isotypical_map(jac, order, sys.size()));
    const DegreeVector ref = reference_degree(sys, order);
    DegreeVector out;
    out.set(0, raw[0]);
    for (int k = 1; k <= order; ++k) out.set(k, raw[k] - raw[0] * ref[k]);
    return out;
  };
  const DegreeVector coarse = at(n);
  const DegreeVector fine = at(2 * n);
  if (!(coarse == fine)) throw TruncationUnstable("Galerkin degree changes between n and 2n");
  return fine;
}

/// |d_1(Phi_0 restricted to D^perp, N_delta)| from the slice Jacobian at Z (or within X^gamma).
inline int relative_equilibrium_orbit_degree(const VortexSystem& sys, const RelativeEquilibrium& eq, int n = 4,
                                             const SymmetryElement* gamma = nullptr) {
  return orbit_degree_magnitude(orbit_slice_jacobian(sys, eq, n, gamma), 1);
}

/// Index radius used when none is given: a tenth of the distance to the boundary, at most 0.1.
inline double default_index_radius(const DomainModel& dom, const Vec2& a0) {
  return std::min(0.1, 0.1 * dom.boundary_distance(a0));
}

/// |orbit degree| x deg(grad h, B_eps(a0), 0); nonzero certifies the degree hypothesis for (a0, Z).
inline int proposition_5_1_product(const VortexSystem& sys, const DomainModel& dom, const Vec2& a0,
                                   const RelativeEquilibrium& eq, std::optional<double> eps = std::nullopt,
                                   const SymmetryElement* gamma = nullptr) {
  if (!dom.has_regular_part()) throw PreconditionError("the whole plane has no admissible a0 (h vanishes)");
  if (!dom.contains(a0)) throw OutsideDomainError("a0 is not in the domain");
  const int magnitude = relative_equilibrium_orbit_degree(sys.with_domain(DomainModel::plane()), eq, 4, gamma);
  return magnitude * brouwer_index(dom, a0, eps.value_or(default_index_radius(dom, a0)));
}

/// Same product with an explicit planar field in place of grad h.
inline int proposition_5_1_product(const Mat& slice_jacobian, const PlanarField& field, const Vec2& a0, double eps) {
  return orbit_degree_magnitude(slice_jacobian, 1) * winding_number(field, a0, eps);
}

}  // namespace nvortex
