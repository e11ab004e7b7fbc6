#include "support.hpp"

using namespace nvortex;
using namespace testsupport;

namespace {

double laplacian_x(const DomainModel& dom, const Vec2& x, const Vec2& y, double h) {
  double s = -4.0 * dom.g(x, y);
  for (const Vec2& d : {Vec2(h, 0), Vec2(-h, 0), Vec2(0, h), Vec2(0, -h)}) s += dom.g(x + d, y);
  return s / (h * h);
}

}  // namespace

TEST(Domains, FactoryNamesAndAnnulus) {
  EXPECT_EQ(DomainModel::from_name("unit_disc").name(), "unit_disc");
  EXPECT_EQ(DomainModel::from_name("half_plane").name(), "half_plane");
  EXPECT_FALSE(DomainModel::from_name("plane").has_regular_part());
  EXPECT_THROW(DomainModel::from_name("annulus"), InvalidArgument);
  EXPECT_THROW(DomainModel::from_name("square"), InvalidArgument);
}

TEST(Domains, RegularPartIsSymmetric) {
  for (const auto& dom : {DomainModel::unit_disc(), DomainModel::half_plane()})
    for (int trial = 0; trial < 200; ++trial) {
      Vec2 x = random_disc_config(1, 0.95, 0.0).head<2>(), y = random_disc_config(1, 0.95, 0.0).head<2>();
      if (dom.kind() == DomainModel::Kind::HalfPlane) {
        x.y() = std::abs(x.y()) + 0.01;
        y.y() = std::abs(y.y()) + 0.01;
      }
      EXPECT_NEAR(dom.g(x, y), dom.g(y, x), 1e-10);
    }
}

TEST(Domains, DiscGreenBoundaryCollocationAndHarmonicity) {
  const auto dom = DomainModel::unit_disc();
  for (int trial = 0; trial < 10; ++trial) {
    const Vec2 y = random_disc_config(1, 0.9, 0.0).head<2>();
    std::vector<double> vals;
    for (int i = 0; i < 64; ++i) {
      const double t = kTwoPi * i / 64;
      // approach the boundary point from inside to stay in the domain
      const Vec2 x = (1.0 - 1e-13) * Vec2(std::cos(t), std::sin(t));
      vals.push_back(dom.g(x, y) + std::log((x - y).norm()) / kTwoPi);
    }
    const auto [lo, hi] = std::minmax_element(vals.begin(), vals.end());
    EXPECT_LT(*hi - *lo, 1e-8);
    const Vec2 x = random_disc_config(1, 0.7, 0.0).head<2>();
    EXPECT_LT(std::abs(laplacian_x(dom, x, y, 1e-3)), 1e-6);
  }
}

TEST(Domains, HalfPlaneGreenBoundaryCollocationAndHarmonicity) {
  const auto dom = DomainModel::half_plane();
  const Vec2 y(0.3, 0.8);
  std::vector<double> vals;
  for (int i = 0; i < 64; ++i) {
    const Vec2 x(-3.0 + 6.0 * i / 63.0, 1e-14);
    vals.push_back(dom.g(x, y) + std::log((x - y).norm()) / kTwoPi);
  }
  const auto [lo, hi] = std::minmax_element(vals.begin(), vals.end());
  EXPECT_LT(*hi - *lo, 1e-8);
  EXPECT_LT(std::abs(laplacian_x(dom, Vec2(-0.4, 1.3), y, 1e-3)), 1e-6);
}

TEST(Domains, DiscRobinFunction) {
  const auto dom = DomainModel::unit_disc();
  EXPECT_LT(dom.robin_gradient(Vec2::Zero()).norm(), 1e-15);
  const Mat2 h = dom.robin_hessian(Vec2::Zero());
  EXPECT_LT((h - Mat2::Identity() / kPi).norm(), 1e-14);
  // finite-difference check of gradient and Hessian at a generic point
  const Vec2 a(0.3, -0.2);
  const Vec fd = fd_gradient([&](const Vec& x) { return dom.robin(Vec2(x[0], x[1])); }, Vec(a));
  EXPECT_LT((dom.robin_gradient(a) - Vec2(fd)).norm(), 1e-8);
  const Mat fdh = fd_jacobian([&](const Vec& x) { return Vec(dom.robin_gradient(Vec2(x[0], x[1]))); }, Vec(a));
  EXPECT_LT((dom.robin_hessian(a) - Mat2(fdh)).norm(), 1e-7);
  // radial symmetry and blow-up at the boundary
  for (double rho : {0.2, 0.5, 0.9}) {
    std::vector<double> vals;
    for (int i = 0; i < 16; ++i) vals.push_back(dom.robin(rho * Vec2(std::cos(0.4 * i), std::sin(0.4 * i))));
    const auto [lo, hi] = std::minmax_element(vals.begin(), vals.end());
    EXPECT_LT(*hi - *lo, 1e-10);
  }
  double prev = dom.robin(Vec2(0.9, 0));
  for (double rho : {0.99, 0.999, 0.9999, 0.99999}) {
    const double v = dom.robin(Vec2(rho, 0));
    EXPECT_GT(v, prev);
    prev = v;
  }
  EXPECT_GT(prev, 1.5);
  EXPECT_THROW(dom.robin(Vec2(1.2, 0)), OutsideDomainError);
}

TEST(Domains, HalfPlaneRobinHasNoCriticalPoint) {
  const auto dom = DomainModel::half_plane();
  for (int trial = 0; trial < 100; ++trial) {
    const Vec2 a(uniform(-5, 5), uniform(0.01, 5));
    EXPECT_GT(dom.robin_gradient(a).norm(), 0.0);
    EXPECT_NEAR(dom.robin(a), -std::log(2.0 * a.y()) / kTwoPi, 1e-13);
  }
  EXPECT_TRUE(find_critical_points(dom, Vec2(-2, 0.1), Vec2(2, 4)).empty());
}

TEST(CriticalPoints, DiscHasOneStableMinimum) {
  const auto pts = find_critical_points(DomainModel::unit_disc(), Vec2(-0.9, -0.9), Vec2(0.9, 0.9));
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_LT(pts[0].location.norm(), 1e-10);
  EXPECT_LE(pts[0].gradient_norm, 1e-10);
  EXPECT_EQ(pts[0].brouwer_index, 1);
  EXPECT_TRUE(pts[0].stable);
  EXPECT_TRUE(pts[0].nondegenerate);
}

TEST(CriticalPoints, PlaneIsEmpty) {
  EXPECT_TRUE(find_critical_points(DomainModel::plane(), Vec2(-1, -1), Vec2(1, 1)).empty());
}

TEST(BrouwerIndex, DiscOriginIndependentOfRadius) {
  for (double eps : {0.05, 0.1, 0.2}) EXPECT_EQ(brouwer_index(DomainModel::unit_disc(), Vec2::Zero(), eps), 1);
  // a large circle encloses the single zero
  EXPECT_EQ(brouwer_index(DomainModel::unit_disc(), Vec2::Zero(), 0.95), 1);
  // a circle that misses the zero
  EXPECT_EQ(brouwer_index(DomainModel::unit_disc(), Vec2(0.5, 0), 0.2), 0);
  EXPECT_THROW(brouwer_index(DomainModel::plane(), Vec2::Zero(), 0.1), PreconditionError);
}

TEST(BrouwerIndex, TestFields) {
  EXPECT_EQ(winding_number([](const Vec2& a) { return Vec2(a.x(), -a.y()); }, Vec2::Zero(), 0.3), -1);
  EXPECT_EQ(winding_number([](const Vec2& a) { return Vec2(a.x() * a.x() - a.y() * a.y(), 2 * a.x() * a.y()); },
                           Vec2::Zero(), 1.0),
            2);
  EXPECT_THROW(winding_number([](const Vec2& a) { return Vec2(a.x() - 1.0, a.y()); }, Vec2::Zero(), 1.0),
               ZeroOnContour);
}

TEST(FGradientIdentity, HoldsForDiscConfigurations) {
  EXPECT_LE(f_gradient_identity_check(VortexSystem({1.0, 2.0, 3.0}, DomainModel::unit_disc()), Vec2::Zero()), 1e-12);
  EXPECT_LE(f_gradient_identity_check(VortexSystem({1.0, 2.0}, DomainModel::unit_disc()), Vec2(0.3, 0.1)), 1e-9);
  EXPECT_LE(f_gradient_identity_check(VortexSystem({1.0, -1.0}, DomainModel::unit_disc()), Vec2(0.3, 0.1)), 1e-9);
  EXPECT_LE(f_gradient_identity_check(VortexSystem({1.0, -1.5, 2.0}, DomainModel::half_plane()), Vec2(0.3, 0.7)), 1e-9);
  // finite-difference oracle on F for the P_D identity at c = (0.3, 0.1)
  const VortexSystem sys({1.0, 2.0}, DomainModel::unit_disc());
  const Vec2 c(0.3, 0.1);
  const Vec fd = fd_gradient([&](const Vec& z) { return f_energy(sys, z); }, diagonal(c, 2));
  const Vec2 gh = DomainModel::unit_disc().robin_gradient(c);
  EXPECT_LT((point(fd, 0) - 1.0 * 3.0 * gh).norm(), 1e-8);
  EXPECT_LT((point(fd, 1) - 2.0 * 3.0 * gh).norm(), 1e-8);
  EXPECT_THROW(f_gradient_identity_check(sys, Vec2(1.5, 0)), OutsideDomainError);
}
