// nvortex: command-line driver. One command per process, one JSON config per run.

#include "nvortex/io.hpp"
#include "nvortex/nvortex.hpp"

#include <CLI11.hpp>
#include <boost/version.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace nvortex;

namespace {

constexpr const char* kVersion = "0.1.0";

enum ExitCode { kOk = 0, kConfigError = 2, kNumericalFailure = 3, kInfeasible = 4 };

struct KeySpec {
  const char* section;
  const char* key;
  const char* type;  // number, integer, bool, string, array, object
  const char* fallback;
  const char* help;
};

// every accepted config key
const std::vector<KeySpec>& schema() {
  static const std::vector<KeySpec> keys = {
      {"system", "strengths", "array", "required", "vortex strengths Gamma_k (nonzero)"},
      {"system", "collision_eps", "number", "1e-12", "pair distance below which configurations count as collisions"},
      {"domain", "kind", "string", "plane", "plane | unit_disc | half_plane"},
      {"output", "dir", "string", "nvortex_out", "output directory (overridden by NVORTEX_OUTPUT_DIR)"},
      {"symmetry", "cyclic", "bool", "false", "use gamma = ((1 2 ... N), 2 pi/N)"},
      {"symmetry", "sigma", "array", "-", "1-based images sigma(1..N) of a permutation"},
      {"symmetry", "theta", "number", "0", "time shift of gamma in radians, a multiple of 2 pi/ord(sigma)"},
      {"integration", "initial", "array", "required", "initial positions x1,y1,...,xN,yN"},
      {"integration", "t_end", "number", "required", "final time (negative integrates backward)"},
      {"integration", "method", "string", "dopri5", "dopri5 | implicit_midpoint"},
      {"integration", "abs_tol", "number", "1e-12", "absolute tolerance"},
      {"integration", "rel_tol", "number", "1e-10", "relative tolerance"},
      {"integration", "max_step", "number", "1e-2", "largest time step (fixed step of implicit_midpoint)"},
      {"integration", "collision_floor", "number", "1e-9", "distance that ends the run with a collision event"},
      {"integration", "record_steps", "bool", "true", "write every accepted step, otherwise endpoints only"},
      {"equilibrium", "initial", "array", "regular polygon", "initial guess x1,y1,...,xN,yN"},
      {"equilibrium", "omega", "number", "-", "fix the angular velocity (1/time)"},
      {"equilibrium", "scale", "number", "1", "fix the rms distance from the center of vorticity (length); used when omega is absent"},
      {"equilibrium", "tolerance", "number", "1e-10", "residual tolerance"},
      {"equilibrium", "max_iterations", "integer", "50", "Newton iteration cap"},
      {"equilibrium", "spectral_tol", "number", "1e-8", "lattice matching tolerance for periodic solution counts"},
      {"equilibrium", "gamma_n", "integer", "8", "Fourier truncation for the gamma-restricted kernel count"},
      {"spectrum", "z", "array", "required", "relative equilibrium positions x1,y1,...,xN,yN"},
      {"spectrum", "omega", "number", "required", "angular velocity (1/time)"},
      {"spectrum", "tolerance", "number", "1e-8", "lattice matching tolerance"},
      {"robin", "lo", "array", "domain dependent", "lower corner of the seed box"},
      {"robin", "hi", "array", "domain dependent", "upper corner of the seed box"},
      {"robin", "grid", "integer", "11", "seeds per side"},
      {"periodic", "a0", "array", "[0,0]", "critical point of the Robin function"},
      {"periodic", "r", "number", "0.05", "scale r; period is 2 pi r^2"},
      {"periodic", "n", "integer", "32", "Fourier truncation order"},
      {"periodic", "tolerance", "number", "1e-10", "acceptance threshold on ||Phi_r||_X"},
      {"periodic", "max_iterations", "integer", "30", "Newton iteration cap"},
      {"periodic", "trust_radius", "number", "0 (off)", "largest Newton step in the X norm"},
      {"periodic", "samples", "integer", "128", "nodes in the sampled loop CSV"},
      {"periodic", "verify_closure", "bool", "true", "integrate one period and report the closure error"},
      {"continuation", "r_start", "number", "1e-2 inradius / diameter", "seed scale"},
      {"continuation", "r_target", "number", "required", "scale to continue to"},
      {"continuation", "initial_step", "number", "0.01", "first step in r"},
      {"continuation", "min_step", "number", "1e-6", "smallest step before giving up"},
      {"continuation", "max_step", "number", "0.05", "largest step"},
      {"continuation", "growth", "number", "1.5", "step growth after easy corrections"},
      {"continuation", "max_halvings", "integer", "12", "step halvings per point"},
      {"continuation", "max_points", "integer", "2000", "point budget"},
      {"continuation", "pseudo_arclength", "bool", "false", "arclength predictor-corrector (passes folds)"},
      {"continuation", "boundary_fraction", "number", "1e-3", "BoundaryApproach threshold as a fraction of the inradius"},
      {"continuation", "u_cap", "number", "1e3", "Unbounded threshold on ||u||_X"},
      {"continuation", "r_cap", "number", "1e3", "Unbounded threshold on r"},
      {"continuation", "seed_delta", "number", "0.5", "largest seed distance to S^1*Z"},
      {"continuation", "anomaly_factor", "number", "10", "SingularLimitAnomaly growth factor"},
      {"continuation", "verify_closure", "bool", "true", "integrate one period at every point"},
      {"continuation", "smoothness", "bool", "false", "run the secant-slope smoothness check"},
      {"degree", "a0", "array", "[0,0]", "critical point of the Robin function"},
      {"degree", "eps", "number", "min(0.1, dist(a0, boundary)/10)", "index contour radius (length)"},
      {"degree", "blocks", "array", "-", "isotypical blocks [{k, matrix}] for the linear degree formula"},
  };
  return keys;
}

const std::vector<std::string>& sections() {
  static const std::vector<std::string> s = {"system",      "domain",   "output", "symmetry", "integration",
                                             "equilibrium", "spectrum", "robin",  "periodic", "continuation",
                                             "degree"};
  return s;
}

std::string help_text() {
  std::ostringstream os;
  os << "Config keys (JSON object of sections; unknown keys are rejected):\n";
  std::string current;
  for (const auto& k : schema()) {
    if (current != k.section) {
      current = k.section;
      os << "  [" << current << "]\n";
    }
    os << "    " << std::left << std::setw(18) << k.key << std::setw(9) << k.type << " default " << k.fallback
       << "\n      " << k.help << "\n";
  }
  return os.str();
}

bool type_matches(const json& v, const std::string& type) {
  if (type == "number") return v.is_number();
  if (type == "integer") return v.is_number_integer();
  if (type == "bool") return v.is_boolean();
  if (type == "string") return v.is_string();
  if (type == "array") return v.is_array();
  return v.is_object();
}

void validate(const json& cfg) {
  if (!cfg.is_object()) throw InvalidArgument("config must be a JSON object");
  for (const auto& [name, body] : cfg.items()) {
    if (std::find(sections().begin(), sections().end(), name) == sections().end())
      throw InvalidArgument("unknown config section '" + name + "'");
    if (!body.is_object()) throw InvalidArgument("section '" + name + "' must be an object");
    for (const auto& [key, value] : body.items()) {
      const auto it = std::find_if(schema().begin(), schema().end(),
                                   [&](const KeySpec& k) { return name == k.section && key == k.key; });
      if (it == schema().end()) throw InvalidArgument("unknown key '" + name + "." + key + "'");
      if (!type_matches(value, it->type))
        throw InvalidArgument("key '" + name + "." + key + "' must be of type " + it->type);
      if (value.is_number() && std::string(it->type) != "integer" && key.find("tol") != std::string::npos &&
          !(value.get<double>() > 0.0))
        throw InvalidArgument("tolerance '" + name + "." + key + "' must be positive");
    }
  }
}

// typed section access with defaults
class Section {
public:
  Section(const json& cfg, const std::string& name) : name_(name) {
    if (cfg.contains(name)) body_ = cfg.at(name);
  }
  bool has(const std::string& k) const { return body_.contains(k); }
  template <class T>
  T get(const std::string& k, T fallback) const {
    return has(k) ? body_.at(k).get<T>() : fallback;
  }
  template <class T>
  T require(const std::string& k) const {
    if (!has(k)) throw InvalidArgument("missing required key '" + name_ + "." + k + "'");
    return body_.at(k).get<T>();
  }
  Vec vec(const std::string& k) const { return io::vec_from_json(body_.at(k)); }
  Vec2 point2(const std::string& k, const Vec2& fallback) const {
    if (!has(k)) return fallback;
    const Vec v = vec(k);
    if (v.size() != 2) throw InvalidArgument("key '" + name_ + "." + k + "' must have two entries");
    return {v[0], v[1]};
  }
  void positive(const std::string& k, double v) const {
    if (!(v > 0.0)) throw InvalidArgument("key '" + name_ + "." + k + "' must be positive");
  }

private:
  std::string name_;
  json body_ = json::object();
};

struct Context {
  json cfg;
  fs::path out;
  VortexSystem sys{std::vector<double>{1.0}};
  json manifest_extra = json::object();
};

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

void write_json(const fs::path& p, const json& j) {
  std::ofstream f(p);
  if (!f) throw InvalidArgument("cannot write " + p.string());
  f << j.dump(2) << '\n';
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p);
  if (!f) throw InvalidArgument("cannot write " + p.string());
  return f;
}

VortexSystem build_system(const json& cfg) {
  const Section sys(cfg, "system");
  const Section dom(cfg, "domain");
  const auto strengths = sys.require<std::vector<double>>("strengths");
  return VortexSystem(strengths, DomainModel::from_name(dom.get<std::string>("kind", "plane")),
                      sys.get<double>("collision_eps", 1e-12));
}

Vec coords_for(const VortexSystem& sys, const Vec& v, const std::string& what) {
  if (v.size() != sys.dim()) throw InvalidArgument(what + " must have 2N = " + std::to_string(sys.dim()) + " entries");
  return v;
}

std::optional<SymmetryElement> build_symmetry(const json& cfg, const VortexSystem& sys) {
  if (!cfg.contains("symmetry")) return std::nullopt;
  const Section s(cfg, "symmetry");
  if (s.get<bool>("cyclic", false)) {
    if (s.has("sigma")) throw InvalidArgument("symmetry.cyclic and symmetry.sigma are exclusive");
    return SymmetryElement::cyclic(static_cast<std::size_t>(sys.size()));
  }
  if (!s.has("sigma")) return std::nullopt;
  auto sigma = s.require<std::vector<int>>("sigma");
  if (static_cast<Eigen::Index>(sigma.size()) != sys.size()) throw InvalidArgument("symmetry.sigma must have N entries");
  for (int& v : sigma) --v;
  return SymmetryElement(sigma, s.get<double>("theta", 0.0));
}

RelativeEquilibrium build_equilibrium(const json& cfg, const VortexSystem& sys) {
  const Section e(cfg, "equilibrium");
  const VortexSystem plane = sys.with_domain(DomainModel::plane());
  const Vec guess = e.has("initial") ? coords_for(sys, e.vec("initial"), "equilibrium.initial")
                                     : regular_polygon(sys.size()).coords();
  Normalization norm = FixScale{e.get<double>("scale", 1.0)};
  if (e.has("omega")) norm = FixOmega{e.get<double>("omega", 1.0)};
  EquilibriumSolverOptions opts;
  opts.tolerance = e.get<double>("tolerance", 1e-10);
  opts.max_iterations = e.get<int>("max_iterations", 50);
  return solve_equilibrium(plane, guess, norm, opts);
}

// --- commands ------------------------------------------------------------

void cmd_simulate(Context& ctx) {
  const Section s(ctx.cfg, "integration");
  IntegratorConfig ic;
  const auto method = s.get<std::string>("method", "dopri5");
  if (method == "implicit_midpoint")
    ic.method = IntegratorConfig::Method::ImplicitMidpoint;
  else if (method != "dopri5")
    throw InvalidArgument("integration.method must be dopri5 or implicit_midpoint");
  ic.abs_tol = s.get<double>("abs_tol", ic.abs_tol);
  ic.rel_tol = s.get<double>("rel_tol", ic.rel_tol);
  ic.max_step = s.get<double>("max_step", ic.max_step);
  ic.collision_floor = s.get<double>("collision_floor", ic.collision_floor);
  ic.record_steps = s.get<bool>("record_steps", true);
  const Vec z0 = coords_for(ctx.sys, s.vec("initial"), "integration.initial");
  const Trajectory traj = integrate(ctx.sys, z0, s.require<double>("t_end"), ic);

  auto f = open_out(ctx.out / "trajectory.csv");
  io::write_trajectory_csv(f, traj);
  json summary{{"end", to_string(traj.end)},
               {"detail", traj.detail},
               {"t_final", traj.times.back()},
               {"final_state", io::vec_json(traj.final_state())},
               {"steps", traj.times.size()}};
  if (!ctx.sys.domain().has_regular_part()) {
    const auto d = invariant_drift(ctx.sys, traj);
    summary["drift"] = {{"energy", d.energy}, {"center_of_vorticity", d.center_of_vorticity},
                        {"angular_impulse", d.angular_impulse}};
  }
  write_json(ctx.out / "simulate.json", summary);
}

void cmd_equilibrium(Context& ctx) {
  const Section e(ctx.cfg, "equilibrium");
  const VortexSystem plane = ctx.sys.with_domain(DomainModel::plane());
  const auto eq = build_equilibrium(ctx.cfg, ctx.sys);
  SpectralReport rep = nondegeneracy(plane, eq, e.get<double>("spectral_tol", 1e-8));
  if (const auto gamma = build_symmetry(ctx.cfg, ctx.sys))
    rep.gamma_periodic_dimension = gamma_periodic_count(plane, eq, *gamma, e.get<int>("gamma_n", 8));
  write_json(ctx.out / "equilibrium.json", {{"equilibrium", io::equilibrium_json(eq)},
                                            {"spectrum", io::spectral_json(rep)},
                                            {"total_vorticity", ctx.sys.total_vorticity()}});
}

void cmd_spectrum(Context& ctx) {
  const Section s(ctx.cfg, "spectrum");
  const VortexSystem plane = ctx.sys.with_domain(DomainModel::plane());
  RelativeEquilibrium eq;
  eq.z = Configuration(coords_for(ctx.sys, s.vec("z"), "spectrum.z"));
  eq.omega = s.require<double>("omega");
  eq.residual_norm = equilibrium_residual(plane, eq.z.coords(), eq.omega).norm();
  const Mat a = stability_matrix(plane, eq);
  SpectralReport rep = nondegeneracy(plane, eq, s.get<double>("tolerance", 1e-8));
  json rows = json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) rows.push_back(io::vec_json(a.row(i).transpose()));
  write_json(ctx.out / "spectrum.json",
             {{"residual_norm", eq.residual_norm}, {"stability_matrix", rows}, {"spectrum", io::spectral_json(rep)}});
}

void cmd_robin(Context& ctx) {
  const Section s(ctx.cfg, "robin");
  const auto& dom = ctx.sys.domain();
  Vec2 lo(-0.9, -0.9), hi(0.9, 0.9);
  if (dom.kind() == DomainModel::Kind::HalfPlane) {
    lo = Vec2(-2.0, 0.1);
    hi = Vec2(2.0, 4.0);
  }
  lo = s.point2("lo", lo);
  hi = s.point2("hi", hi);
  const auto points = find_critical_points(dom, lo, hi, s.get<int>("grid", 11));
  json list = json::array();
  for (const auto& c : points) list.push_back(io::critical_point_json(c));
  write_json(ctx.out / "robin.json", {{"domain", dom.name()}, {"critical_points", list}});
}

NewtonOptions newton_options(const Section& s) {
  NewtonOptions o;
  o.tolerance = s.get<double>("tolerance", o.tolerance);
  o.max_iterations = s.get<int>("max_iterations", o.max_iterations);
  o.max_step = s.get<double>("trust_radius", 0.0);
  return o;
}

void cmd_solve_periodic(Context& ctx) {
  const Section s(ctx.cfg, "periodic");
  const auto eq = build_equilibrium(ctx.cfg, ctx.sys);
  const int n = s.get<int>("n", 32);
  if (n < 1) throw InvalidArgument("periodic.n must be at least 1");
  const double r = s.get<double>("r", 0.05);
  if (r < 0.0) throw InvalidArgument("periodic.r must be nonnegative");
  const LoopProblem p{ctx.sys, r, s.point2("a0", Vec2::Zero())};
  const FourierLoop z = equilibrium_loop(eq, n);
  const auto gamma = build_symmetry(ctx.cfg, ctx.sys);
  std::optional<SymmetrySubspace> sym;
  if (gamma) {
    gamma->check_strengths(ctx.sys);
    sym.emplace(*gamma);
  }
  const auto res = newton_periodic(p, z, PhaseCondition(z), sym ? &*sym : nullptr, newton_options(s));
  json out{{"r", r},
           {"n", n},
           {"omega", eq.omega},
           {"residual", res.residual},
           {"iterations", res.iterations},
           {"period", kTwoPi * r * r}};
  if (r > 0.0) {
    out["diagnostics"] = io::diagnostics_json(branch_diagnostics(p, res.u, z));
    if (s.get<bool>("verify_closure", true)) out["closure_error"] = closure_error(p, res.u);
  }
  write_json(ctx.out / "periodic.json", out);
  write_json(ctx.out / "loop.json", io::loop_json(res.u));
  auto f = open_out(ctx.out / "loop.csv");
  io::write_loop_csv(f, p, res.u, s.get<int>("samples", 128));
}

void cmd_continue(Context& ctx) {
  const Section s(ctx.cfg, "continuation");
  const Section per(ctx.cfg, "periodic");
  const auto eq = build_equilibrium(ctx.cfg, ctx.sys);
  const int n = per.get<int>("n", 32);
  if (n < 1) throw InvalidArgument("periodic.n must be at least 1");
  const FourierLoop z = equilibrium_loop(eq, n);
  const Vec2 a0 = per.point2("a0", Vec2::Zero());

  ContinuationConfig cc;
  cc.initial_step = s.get<double>("initial_step", cc.initial_step);
  cc.min_step = s.get<double>("min_step", cc.min_step);
  cc.max_step = s.get<double>("max_step", cc.max_step);
  cc.growth = s.get<double>("growth", cc.growth);
  cc.max_halvings = s.get<int>("max_halvings", cc.max_halvings);
  cc.max_points = s.get<int>("max_points", cc.max_points);
  cc.pseudo_arclength = s.get<bool>("pseudo_arclength", false);
  cc.boundary_fraction = s.get<double>("boundary_fraction", cc.boundary_fraction);
  cc.u_cap = s.get<double>("u_cap", cc.u_cap);
  cc.r_cap = s.get<double>("r_cap", cc.r_cap);
  cc.seed_delta = s.get<double>("seed_delta", cc.seed_delta);
  cc.anomaly_factor = s.get<double>("anomaly_factor", cc.anomaly_factor);
  cc.newton = newton_options(per);

  const double r_start = s.get<double>("r_start", default_r_start(ctx.sys.domain(), z));
  s.positive("r_start", r_start);
  const auto gamma = build_symmetry(ctx.cfg, ctx.sys);
  std::optional<SymmetrySubspace> sym;
  if (gamma) {
    gamma->check_strengths(ctx.sys);
    sym.emplace(*gamma);
  }
  const LoopProblem base{ctx.sys, r_start, a0};
  const BranchPoint seed = seed_branch(base, z, cc, sym ? &*sym : nullptr);
  const Branch br = continue_branch(base, seed, z, s.require<double>("r_target"), cc, sym ? &*sym : nullptr);

  {
    auto f = open_out(ctx.out / "branch.jsonl");
    io::write_branch_jsonl(f, br);
  }
  {
    auto f = open_out(ctx.out / "branch.csv");
    io::write_branch_csv(f, br);
  }
  json summary{{"termination", to_string(br.termination)},
               {"detail", br.detail},
               {"points", br.points.size()},
               {"r_first", br.points.front().r},
               {"r_last", br.points.back().r},
               {"omega", eq.omega}};
  if (s.get<bool>("verify_closure", true)) {
    double worst = 0.0;
    json errs = json::array();
    for (const auto& pt : br.points) {
      const double e = closure_error(base.with_r(pt.r), pt.u);
      errs.push_back(e);
      worst = std::max(worst, e);
    }
    summary["closure_errors"] = errs;
    summary["max_closure_error"] = worst;
  }
  if (s.get<bool>("smoothness", false) && br.points.size() >= 2) {
    const auto rep = branch_smoothness_check(br, 3, 0.05, sym ? &*sym : nullptr);
    json samples = json::array();
    for (const auto& sm : rep.samples)
      samples.push_back({{"r", sm.r}, {"ratio", sm.ratio}, {"trivially_smooth", sm.trivially_smooth}, {"passed", sm.passed}});
    summary["smoothness"] = {{"passed", rep.passed}, {"samples", samples}};
  }
  write_json(ctx.out / "branch.json", summary);
}

IsotypicalMap blocks_from_json(const json& blocks) {
  IsotypicalMap map;
  for (const auto& b : blocks) {
    if (!b.is_object() || !b.contains("k") || !b.contains("matrix"))
      throw InvalidArgument("degree.blocks entries need k and matrix");
    const auto rows = b.at("matrix").get<std::vector<std::vector<double>>>();
    Mat m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != rows.size()) throw InvalidArgument("degree block matrix must be square");
      for (std::size_t j = 0; j < rows.size(); ++j)
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    map.add({b.at("k").get<int>(), m, Mat()});
  }
  return map;
}

void cmd_degree(Context& ctx) {
  const Section s(ctx.cfg, "degree");
  json out = json::object();
  if (s.has("blocks")) out["linear_degree"] = io::degree_json(linear_degree(blocks_from_json(ctx.cfg["degree"]["blocks"])));
  if (ctx.cfg.contains("equilibrium") || ctx.sys.domain().has_regular_part()) {
    const auto& dom = ctx.sys.domain();
    const Vec2 a0 = s.point2("a0", Vec2::Zero());
    if (!dom.has_regular_part()) throw PreconditionError("the whole plane has no admissible a0 (h vanishes)");
    const double eps = s.get<double>("eps", default_index_radius(dom, a0));
    s.positive("eps", eps);
    const auto eq = build_equilibrium(ctx.cfg, ctx.sys);
    const auto gamma = build_symmetry(ctx.cfg, ctx.sys);
    const VortexSystem plane = ctx.sys.with_domain(DomainModel::plane());
    const int magnitude = relative_equilibrium_orbit_degree(plane, eq, 4, gamma ? &*gamma : nullptr);
    const int index = brouwer_index(dom, a0, eps);
    out["orbit_degree_magnitude"] = magnitude;
    out["brouwer_index"] = index;
    out["eps"] = eps;
    out["product"] = magnitude * index;
    out["certificate"] = magnitude * index != 0;
  }
  write_json(ctx.out / "degree.json", out);
}

int exit_code(const Error& e) {
  switch (e.category()) {
    case Error::Category::Config: return kConfigError;
    case Error::Category::Numerical: return kNumericalFailure;
    case Error::Category::Infeasible: return kInfeasible;
  }
  return kNumericalFailure;
}

int run(const std::string& command, const std::string& config_path) {
  const auto started = std::chrono::steady_clock::now();
  Context ctx;
  std::string raw;
  {
    std::ifstream f(config_path);
    if (!f) throw InvalidArgument("cannot read config " + config_path);
    std::stringstream ss;
    ss << f.rdbuf();
    raw = ss.str();
  }
  try {
    ctx.cfg = json::parse(raw);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("config is not valid JSON: ") + e.what());
  }
  validate(ctx.cfg);
  try {
    ctx.sys = build_system(ctx.cfg);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config value has the wrong type: ") + e.what());
  }

  std::string dir = Section(ctx.cfg, "output").get<std::string>("dir", "nvortex_out");
  if (const char* env = std::getenv("NVORTEX_OUTPUT_DIR"); env && *env) dir = env;
  ctx.out = dir;
  std::error_code ec;
  fs::create_directories(ctx.out, ec);
  if (ec) throw InvalidArgument("cannot create output directory " + dir + ": " + ec.message());

  static const std::map<std::string, void (*)(Context&)> commands = {
      {"simulate", cmd_simulate},     {"equilibrium", cmd_equilibrium}, {"spectrum", cmd_spectrum},
      {"robin", cmd_robin},           {"solve-periodic", cmd_solve_periodic}, {"continue", cmd_continue},
      {"degree", cmd_degree}};
  try {
    commands.at(command)(ctx);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config value has the wrong type: ") + e.what());
  }

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  std::ostringstream hash;
  hash << std::hex << std::setw(16) << std::setfill('0') << fnv1a(ctx.cfg.dump());
  write_json(ctx.out / "manifest.json",
             {{"command", command},
              {"config_path", config_path},
              {"config_hash_fnv1a64", hash.str()},
              {"versions",
               {{"nvortex", kVersion},
                {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                              std::to_string(EIGEN_MINOR_VERSION)},
                {"boost", BOOST_LIB_VERSION},
                {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                      std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                      std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                {"compiler", __VERSION__}}},
              {"wall_time_s", wall}});
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Point vortex relative equilibria, periodic orbits and branch tracing"};
  app.footer(help_text());
  app.require_subcommand(1);
  std::string config;
  const std::vector<std::pair<std::string, std::string>> cmds = {
      {"simulate", "integrate the vortex equations"},
      {"equilibrium", "solve for a relative equilibrium and report its spectrum"},
      {"spectrum", "stability matrix analysis of a given relative equilibrium"},
      {"robin", "critical points of the Robin function and their indices"},
      {"solve-periodic", "one Newton solve of the scaled periodic problem"},
      {"continue", "trace the branch of periodic solutions in r"},
      {"degree", "linear degree and the nonzero-degree certificate"}};
  for (const auto& [name, desc] : cmds) {
    auto* sub = app.add_subcommand(name, desc);
    sub->add_option("config", config, "JSON config file")->required();
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, config);
  } catch (const Error& e) {
    std::cerr << "nvortex " << command << ": " << e.what() << '\n';
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "nvortex " << command << ": " << e.what() << '\n';
    return kNumericalFailure;
  }
}
