#include "support.hpp"

#include "nvortex/io.hpp"

#include <sstream>

using namespace nvortex;
using namespace testsupport;

namespace {

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string line; std::getline(is, line);) out.push_back(line);
  return out;
}

std::vector<double> csv_row(const std::string& line) {
  std::vector<double> out;
  std::istringstream is(line);
  for (std::string cell; std::getline(is, cell, ',');) out.push_back(std::stod(cell));
  return out;
}

Branch small_branch() {
  const VortexSystem sys({1.0, 1.0}, DomainModel::unit_disc());
  const auto eq = solve_equilibrium(VortexSystem({1.0, 1.0}), regular_polygon(2).coords(), FixScale{1.0});
  const FourierLoop z = equilibrium_loop(eq, 4);
  const LoopProblem base{sys, 0.05, Vec2::Zero()};
  return continue_branch(base, seed_branch(base, z), z, 0.1);
}

}  // namespace

TEST(LoopJson, BitExactRoundTrip) {
  const FourierLoop u = random_loop(random_config(3), 5, 0.37);
  const std::string text = io::loop_json(u).dump();
  const FourierLoop back = io::loop_from_json(io::json::parse(text));
  ASSERT_EQ(back.order(), 5);
  ASSERT_EQ(back.points(), 3);
  for (Eigen::Index i = 0; i < u.dim(); ++i) EXPECT_EQ(back.coeffs()[i], u.coeffs()[i]);
  const auto j = io::json::parse(text);
  EXPECT_EQ(j.at("coefficients").size(), 11u);
  // fixed k-order: entry 0 is k = -n
  EXPECT_EQ(j.at("coefficients")[0][0].get<double>(), u.mode(-5)[0]);
}

TEST(LoopJson, RejectsMalformedInput) {
  auto j = io::loop_json(random_loop(random_config(2), 2, 0.1));
  j["coefficients"].erase(0);
  EXPECT_THROW(io::loop_from_json(j), InvalidArgument);
  j = io::loop_json(random_loop(random_config(2), 2, 0.1));
  j["N"] = 3;
  EXPECT_THROW(io::loop_from_json(j), InvalidArgument);
}

TEST(DegreeJson, SparseMap) {
  DegreeVector d{-1, 0, 2};
  d.set(7, 3);
  const auto j = io::degree_json(d);
  EXPECT_EQ(j.dump(), R"({"0":-1,"2":2,"7":3})");
  EXPECT_EQ(io::degree_from_json(j), d);
}

TEST(SpectralJson, EigenvaluesAsPairs) {
  const VortexSystem sys({1.0, 1.0});
  const auto eq = solve_equilibrium(sys, regular_polygon(2).coords(), FixScale{1.0});
  const auto rep = nondegeneracy(sys, eq);
  const auto j = io::spectral_json(rep);
  ASSERT_EQ(j.at("eigenvalues").size(), 4u);
  for (const auto& e : j.at("eigenvalues")) EXPECT_EQ(e.size(), 2u);
  EXPECT_EQ(j.at("periodic_dimension"), 3);
  EXPECT_TRUE(j.at("nondegenerate").get<bool>());
  EXPECT_TRUE(j.at("gamma_periodic_dimension").is_null());
}

TEST(BranchExport, JsonLinesAndCsv) {
  const Branch br = small_branch();
  std::ostringstream jl, csv;
  io::write_branch_jsonl(jl, br);
  io::write_branch_csv(csv, br);
  const auto jlines = lines(jl.str());
  ASSERT_EQ(jlines.size(), br.points.size());
  for (std::size_t i = 0; i < jlines.size(); ++i) {
    const auto j = io::json::parse(jlines[i]);
    EXPECT_EQ(j.at("r").get<double>(), br.points[i].r);
    const FourierLoop u = io::loop_from_json(j.at("loop"));
    EXPECT_EQ(u.coeffs(), br.points[i].u.coeffs());
  }
  const auto clines = lines(csv.str());
  ASSERT_EQ(clines.size(), br.points.size() + 1);
  EXPECT_EQ(clines[0].rfind("r,residual,", 0), 0u);
  for (std::size_t i = 0; i < br.points.size(); ++i) {
    const auto row = csv_row(clines[i + 1]);
    ASSERT_EQ(row.size(), 8u);
    EXPECT_EQ(row[0], br.points[i].r);
    EXPECT_EQ(row[4], br.points[i].diagnostics.diagonal_norm);
  }
}

TEST(BranchExport, Deterministic) {
  std::ostringstream a, b;
  io::write_branch_jsonl(a, small_branch());
  io::write_branch_jsonl(b, small_branch());
  EXPECT_EQ(a.str(), b.str());
}

TEST(DiagnosticsJson, NonFiniteMarginsBecomeNull) {
  BranchDiagnostics d;
  d.min_pair_distance = std::numeric_limits<double>::infinity();
  d.boundary_margin = 0.5;
  const auto j = io::diagnostics_json(d);
  EXPECT_TRUE(j.at("min_pair_distance").is_null());
  EXPECT_EQ(j.at("boundary_margin").get<double>(), 0.5);
}

TEST(TrajectoryCsv, HeaderAndRows) {
  const VortexSystem sys({1.0, 1.0});
  IntegratorConfig cfg;
  cfg.record_steps = true;
  const Trajectory traj = integrate(sys, regular_polygon(2).coords(), 1.0, cfg);
  std::ostringstream os;
  io::write_trajectory_csv(os, traj);
  const auto ls = lines(os.str());
  ASSERT_EQ(ls.size(), traj.times.size() + 1);
  EXPECT_EQ(ls[0], "t,x1,y1,x2,y2");
  const auto last = csv_row(ls.back());
  EXPECT_EQ(last[0], traj.times.back());
  for (int c = 0; c < 4; ++c) EXPECT_EQ(last[static_cast<std::size_t>(c + 1)], traj.final_state()[c]);
}

TEST(LoopCsv, PhysicalCoordinates) {
  const VortexSystem sys({1.0, 1.0}, DomainModel::unit_disc());
  const LoopProblem p{sys, 0.1, Vec2(0.2, 0.0)};
  const FourierLoop u = random_loop(random_config(2), 3, 0.1);
  std::ostringstream os;
  io::write_loop_csv(os, p, u, 16);
  const auto ls = lines(os.str());
  ASSERT_EQ(ls.size(), 17u);
  const auto row = csv_row(ls[5]);
  const Vec z = physical_state(p, u, row[0]);
  for (int c = 0; c < 4; ++c) EXPECT_NEAR(row[static_cast<std::size_t>(c + 1)], z[c], 1e-15);
  EXPECT_NEAR(row[0], kTwoPi * 4.0 / 16.0 * 0.01, 1e-16);
}
