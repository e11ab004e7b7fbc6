#include "support.hpp"

#include <complex>

using namespace nvortex;
using namespace testsupport;

namespace {

/// Real form of a random Hermitian m x m matrix on interleaved pairs; commutes with -J on pairs.
Mat random_equivariant_block(Eigen::Index m, double min_abs_eig) {
  while (true) {
    Eigen::MatrixXcd h(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j <= i; ++j) {
        const std::complex<double> c(uniform(-1, 1), i == j ? 0.0 : uniform(-1, 1));
        h(i, j) = c;
        h(j, i) = std::conj(c);
      }
    Mat out(2 * m, 2 * m);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j) {
        const double a = h(i, j).real(), b = h(i, j).imag();
        out.block<2, 2>(2 * i, 2 * j) << a, -b, b, a;
      }
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Mat>(out).eigenvalues();
    if (ev.cwiseAbs().minCoeff() >= min_abs_eig) return out;
  }
}

Mat random_matrix(Eigen::Index r, Eigen::Index c) {
  Mat a(r, c);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = uniform(-1.0, 1.0);
  return a;
}

Mat random_symmetric(Eigen::Index d, double min_abs_eig) {
  while (true) {
    Mat a = random_matrix(d, d);
    a = (0.5 * (a + a.transpose())).eval();
    if (d == 0 || Eigen::SelfAdjointEigenSolver<Mat>(a).eigenvalues().cwiseAbs().minCoeff() >= min_abs_eig) return a;
  }
}

IsotypicalMap random_map(int max_k) {
  IsotypicalMap map;
  const auto d0 = static_cast<Eigen::Index>(uniform(0.0, 3.99));
  if (d0 > 0) map.add({0, random_symmetric(d0, 0.05), Mat()});
  for (int k = 1; k <= max_k; ++k)
    if (uniform(0.0, 1.0) < 0.7) map.add({k, random_equivariant_block(1 + static_cast<Eigen::Index>(uniform(0, 2.99)), 0.05), Mat()});
  return map;
}

/// Oracle: d_0 from the determinant of the assembled map, d_k from eigenvalue counts.
DegreeVector degree_oracle(const IsotypicalMap& map) {
  double det = 1.0;
  bool has_v0 = false;
  for (const auto& b : map.blocks())
    if (b.k == 0) {
      has_v0 = b.matrix.rows() > 0;
      det *= b.matrix.determinant();
    }
  const int d0 = has_v0 ? (det > 0 ? 1 : -1) : 1;
  DegreeVector d;
  d.set(0, d0);
  for (const auto& b : map.blocks())
    if (b.k >= 1) {
      const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Mat>(b.matrix).eigenvalues();
      const int mu = static_cast<int>((ev.array() < 0.0).count());
      d.set(b.k, d0 * mu / 2);
    }
  return d;
}

}  // namespace

TEST(DegreeVector, SparseAccess) {
  DegreeVector d{1, 0, 2};
  EXPECT_EQ(d[0], 1);
  EXPECT_EQ(d[1], 0);
  EXPECT_EQ(d[2], 2);
  EXPECT_EQ(d[99], 0);
  EXPECT_EQ(d.entries().size(), 2u);
  EXPECT_EQ(d.max_index(), 2);
  d.set(2, 0);
  EXPECT_EQ(d.max_index(), 0);
  EXPECT_THROW(d.set(-1, 1), InvalidArgument);
}

TEST(LinearDegree, FormulaExamples) {
  // identity on V_0 + V_1 of dims 1 and 2
  IsotypicalMap id({{0, Mat::Identity(1, 1), Mat()}, {1, Mat::Identity(2, 2), Mat()}});
  EXPECT_EQ(linear_degree(id), (DegreeVector{1}));
  // -id on V_1 only
  IsotypicalMap neg({{1, -Mat::Identity(2, 2), Mat()}});
  EXPECT_EQ(linear_degree(neg), (DegreeVector{1, 1}));
  // diag(-1) on V_0 and -id on V_2
  IsotypicalMap mixed({{0, -Mat::Identity(1, 1), Mat()}, {2, -Mat::Identity(2, 2), Mat()}});
  EXPECT_EQ(linear_degree(mixed), (DegreeVector{-1, 0, -1}));
}

TEST(LinearDegree, RejectsInvalidBlocks) {
  Mat nonsym(2, 2);
  nonsym << 1, 2, 0, 1;
  EXPECT_THROW(IsotypicalMap({{0, nonsym, Mat()}}), InvalidArgument);
  Mat noncommuting(2, 2);
  noncommuting << 1, 0, 0, 2;
  EXPECT_THROW(IsotypicalMap({{1, noncommuting, Mat()}}), InvalidArgument);
  EXPECT_THROW(IsotypicalMap({{1, Mat::Identity(3, 3), Mat()}}), InvalidArgument);
  IsotypicalMap singular({{1, Mat::Zero(2, 2), Mat()}});
  EXPECT_THROW(linear_degree(singular), SingularBlock);
  IsotypicalMap singular0({{0, Mat::Zero(1, 1), Mat()}});
  EXPECT_THROW(linear_degree(singular0), SingularBlock);
}

TEST(LinearDegree, RandomizedAgainstOracleWithEvenMorseIndices) {
  for (int trial = 0; trial < 50; ++trial) {
    const IsotypicalMap map = random_map(4);
    for (const auto& b : map.blocks())
      if (b.k >= 1) {
        const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Mat>(b.matrix).eigenvalues();
        EXPECT_EQ((ev.array() < 0.0).count() % 2, 0);
      }
    EXPECT_EQ(linear_degree(map), degree_oracle(map)) << "trial " << trial;
  }
}

TEST(MultiplyDegrees, FormulaAndAlgebra) {
  const DegreeVector a{1, 1}, b{-1, 0, 2};
  EXPECT_EQ(multiply_degrees(a, b), (DegreeVector{-1, -1, 2}));
  EXPECT_EQ(multiply_degrees(a, DegreeVector::unit()), a);
  const DegreeVector c{-1, 3, 0, 1};
  EXPECT_EQ(multiply_degrees(a, c), multiply_degrees(c, a));
  EXPECT_EQ(multiply_degrees(multiply_degrees(a, b), c), multiply_degrees(a, multiply_degrees(b, c)));
}

TEST(MultiplyDegrees, ProductOfBlockDiagonalMaps) {
  for (int trial = 0; trial < 50; ++trial) {
    const IsotypicalMap m1 = random_map(3), m2 = random_map(3);
    EXPECT_EQ(linear_degree(m1.direct_sum(m2)), multiply_degrees(linear_degree(m1), linear_degree(m2)))
        << "trial " << trial;
  }
}

TEST(LinearDegree, HomotopyInvariance) {
  for (int trial = 0; trial < 10; ++trial) {
    const Mat l0 = random_symmetric(2, 0.5), l1 = random_equivariant_block(2, 0.5);
    const Mat p0 = 0.2 * random_symmetric(2, 0.0), p1 = 0.2 * random_equivariant_block(2, 0.0);
    // perturbations smaller than half the spectral gap keep every sample invertible
    const double g0 = Eigen::SelfAdjointEigenSolver<Mat>(l0).eigenvalues().cwiseAbs().minCoeff();
    const double g1 = Eigen::SelfAdjointEigenSolver<Mat>(l1).eigenvalues().cwiseAbs().minCoeff();
    const double s0 = 0.5 * g0 / std::max(1e-12, p0.operatorNorm()), s1 = 0.5 * g1 / std::max(1e-12, p1.operatorNorm());
    const DegreeVector ref = linear_degree(IsotypicalMap({{0, l0, Mat()}, {1, l1, Mat()}}));
    for (int i = 0; i < 10; ++i) {
      const double s = i / 9.0;
      const IsotypicalMap m({{0, l0 + s * s0 * p0, Mat()}, {1, l1 + s * s1 * p1, Mat()}});
      EXPECT_EQ(linear_degree(m), ref);
    }
  }
}

TEST(GalerkinDegree, ScalarOscillatorCrossings) {
  // H = (a/2)|u|^2 for one unit vortex: d_k = [a > -k] + [a > k] - 1
  const VortexSystem sys({1.0});
  for (double a : {0.5, 1.5, 2.5, -0.5, -1.5, -3.5}) {
    const DegreeVector d = galerkin_linear_degree(sys, a * Mat::Identity(2, 2), 4);
    EXPECT_EQ(d[0], 1) << a;
    for (int k = 1; k <= 8; ++k)
      EXPECT_EQ(d[k], (a > -k ? 1 : 0) + (a > k ? 1 : 0) - 1) << "a=" << a << " k=" << k;
  }
  EXPECT_THROW(galerkin_linear_degree(sys, 5.5 * Mat::Identity(2, 2), 4), TruncationUnstable);
  EXPECT_THROW(galerkin_linear_degree(sys, Mat::Identity(3, 3), 4), InvalidArgument);
}

TEST(GalerkinDegree, ReferenceDegreeCountsVortices) {
  for (Eigen::Index n : {1, 2, 4}) {
    const VortexSystem sys(std::vector<double>(static_cast<std::size_t>(n), 1.0));
    const DegreeVector ref = reference_degree(sys, 3);
    EXPECT_EQ(ref[0], 1);
    for (int k = 1; k <= 3; ++k) EXPECT_EQ(ref[k], n);
  }
}

TEST(LoopIsotypicalMap, RejectsModeCoupling) {
  const VortexSystem sys({1.0, 1.0});
  const auto eq = solve_equilibrium(sys, regular_polygon(2).coords(), FixScale{1.0});
  const LoopProblem prob{sys, 0.0, Vec2::Zero()};
  const Mat jac = symmetric_jacobian(prob, equilibrium_loop(eq, 3));
  EXPECT_THROW(loop_isotypical_map(jac, 3, 2), InvalidArgument);
  EXPECT_THROW(loop_isotypical_map(Mat::Identity(5, 5), 3, 2), InvalidArgument);
}

TEST(OrbitDegree, MagnitudeIsOne) {
  EXPECT_EQ(orbit_degree_magnitude(random_symmetric(5, 0.1), 1), 1);
  EXPECT_EQ(orbit_degree_magnitude(random_matrix(4, 4) + 4.0 * Mat::Identity(4, 4), 2), 1);
  EXPECT_THROW(orbit_degree_magnitude(Mat::Zero(3, 3), 1), DegenerateOrbit);
  EXPECT_THROW(orbit_degree_magnitude(Mat::Identity(2, 2), 0), InvalidArgument);
  EXPECT_THROW(orbit_degree_magnitude(Mat::Identity(2, 3), 1), InvalidArgument);
}

TEST(OrbitDegree, RelativeEquilibria) {
  const VortexSystem pair({1.0, 1.0});
  const auto eq2 = solve_equilibrium(pair, regular_polygon(2).coords(), FixScale{1.0});
  const Mat slice = orbit_slice_jacobian(pair, eq2, 4);
  // rank oracle: full rank on the slice
  Eigen::FullPivLU<Mat> lu(slice);
  EXPECT_EQ(lu.rank(), slice.rows());
  EXPECT_EQ(relative_equilibrium_orbit_degree(pair, eq2), 1);

  // the unit triangle is degenerate in X but not in X^gamma
  const VortexSystem tri({1.0, 1.0, 1.0});
  const auto eq3 = solve_equilibrium(tri, regular_polygon(3).coords(), FixScale{1.0});
  EXPECT_THROW(relative_equilibrium_orbit_degree(tri, eq3), DegenerateOrbit);
  const auto gamma = SymmetryElement::cyclic(3);
  EXPECT_EQ(relative_equilibrium_orbit_degree(tri, eq3, 4, &gamma), 1);
}

TEST(Certificate, DiscPairAtCenter) {
  const VortexSystem pair({1.0, 1.0});
  const auto eq = solve_equilibrium(pair, regular_polygon(2).coords(), FixScale{1.0});
  const auto disc = DomainModel::unit_disc();
  EXPECT_EQ(proposition_5_1_product(pair, disc, Vec2::Zero(), eq), 1);
  for (double eps : {0.05, 0.1, 0.2}) EXPECT_EQ(proposition_5_1_product(pair, disc, Vec2::Zero(), eq, eps), 1);
  // a circle around a regular point encloses no zero
  EXPECT_EQ(proposition_5_1_product(pair, disc, Vec2(0.5, 0.0), eq, 0.2), 0);
  EXPECT_THROW(proposition_5_1_product(pair, DomainModel::plane(), Vec2::Zero(), eq), PreconditionError);
  EXPECT_THROW(proposition_5_1_product(pair, disc, Vec2(2.0, 0.0), eq), OutsideDomainError);
}

TEST(Certificate, SyntheticIndexZeroField) {
  const VortexSystem pair({1.0, 1.0});
  const auto eq = solve_equilibrium(pair, regular_polygon(2).coords(), FixScale{1.0});
  const Mat slice = orbit_slice_jacobian(pair, eq, 4);
  // (x^2, y) has an isolated zero of index 0 at the origin
  const PlanarField fold = [](const Vec2& a) { return Vec2(a.x() * a.x(), a.y()); };
  EXPECT_EQ(proposition_5_1_product(slice, fold, Vec2::Zero(), 0.3), 0);
  const PlanarField source = [](const Vec2& a) { return a; };
  EXPECT_EQ(proposition_5_1_product(slice, source, Vec2::Zero(), 0.3), 1);
}
