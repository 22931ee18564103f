#include "cli.hpp"

#include "spslab/error.hpp"
#include "spslab/families.hpp"
#include "spslab/parallel.hpp"
#include "spslab/radialgrid.hpp"
#include "spslab/regime.hpp"
#include "spslab/riesz.hpp"
#include "spslab/solver.hpp"
#include "spslab/verify.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <tuple>

namespace spslab::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Residual threshold asserted on every converged solve.
constexpr double kResidualTol = 1e-3;

int code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::nonconvergence:
    case ErrorKind::boundary_mass:
    case ErrorKind::singular:
      return kNonconvergence;
    case ErrorKind::assertion: return kAssertion;
    case ErrorKind::io: return kIo;
    default: return kUsage;
  }
}

std::string timestamp() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorKind::io, "cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

json load_json(const fs::path& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    fail(ErrorKind::invalid_argument, path.string() + ": " + e.what());
  }
}

std::string number_text(const json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  require(v.is_number(), ErrorKind::invalid_argument, key + " must be a number or a string");
  return v.dump();
}

template <class T>
T get_as(const json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    fail(ErrorKind::invalid_argument, "config key '" + key + "' has the wrong type");
  }
}

json rational_or_null(const std::optional<Rational>& r) {
  return r ? json(to_string(*r)) : json(nullptr);
}

// (N, alpha, p, q) as typed, parsed exactly by Number.
struct ParamText {
  int n = 3;
  std::string alpha = "2", p = "2", q = "4";

  Params params() const {
    Params pr;
    pr.n = n;
    pr.alpha = Number::parse(alpha);
    pr.p = Number::parse(p);
    pr.q = Number::parse(q);
    pr.validate();
    return pr;
  }
  void add_to(CLI::App* app) {
    app->add_option("--n", n, "dimension N")->capture_default_str();
    app->add_option("--alpha", alpha, "Riesz order, 0 < alpha < N")->capture_default_str();
    app->add_option("--p", p, "Coulomb exponent, p >= 1")->capture_default_str();
    app->add_option("--q", q, "L^q exponent, q >= 1")->capture_default_str();
  }
  // Returns false when the key is not a parameter.
  bool apply(const std::string& key, const json& v) {
    if (key == "n") n = get_as<int>(v, key);
    else if (key == "alpha") alpha = number_text(v, key);
    else if (key == "p") p = number_text(v, key);
    else if (key == "q") q = number_text(v, key);
    else return false;
    return true;
  }
  json to_json() const { return {{"n", n}, {"alpha", alpha}, {"p", p}, {"q", q}}; }
};

struct GridText {
  int m = 2048;
  double r_min = 1e-4, r_max = 1e4;

  void add_to(CLI::App* app) {
    app->add_option("--m", m, "radial nodes")->capture_default_str();
    app->add_option("--r-min", r_min, "inner radius of the log grid")->capture_default_str();
    app->add_option("--r-max", r_max, "outer radius of the log grid")->capture_default_str();
  }
  bool apply(const std::string& key, const json& v) {
    if (key == "m") m = get_as<int>(v, key);
    else if (key == "r_min") r_min = get_as<double>(v, key);
    else if (key == "r_max") r_max = get_as<double>(v, key);
    else return false;
    return true;
  }
  json to_json() const { return {{"m", m}, {"r_min", r_min}, {"r_max", r_max}}; }
};

KernelPtr kernel_for(int n, double alpha, const GridText& g, const std::string& cache_dir) {
  static std::mutex mu;
  static std::map<std::tuple<int, double, int, double, double>, KernelPtr> cache;
  std::lock_guard lock(mu);
  auto key = std::tuple{n, alpha, g.m, g.r_min, g.r_max};
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  KernelOptions opts;
  opts.cache_dir = cache_dir;
  auto k = assemble_kernel(RadialGrid::make(g.r_min, g.r_max, g.m, n), alpha, opts);
  cache.emplace(key, k);
  return k;
}

struct Global {
  std::string out = ".";
  int threads = 0;
  std::string cache_dir;  // empty: SPSLAB_CACHE_DIR
};

// One invocation: output directory, echoed settings, files written.
struct Run {
  std::string command;
  std::vector<std::string> args;
  fs::path dir;
  json settings = json::object();
  std::vector<std::string> outputs;

  void write(const std::string& name, const std::string& content) {
    write_atomic(dir / name, content);
    outputs.push_back(name);
  }
  void manifest(int code, const std::string& message) {
    json j;
    j["schema"] = kSchemaVersion;
    j["command"] = command;
    j["args"] = args;
    j["version"] = version();
    j["timestamp"] = timestamp();
    j["settings"] = settings;
    j["outputs"] = outputs;
    j["exit_code"] = code;
    j["message"] = message;
    write_atomic(dir / "manifest.json", j.dump(2) + "\n");
  }
};

// ---------------------------------------------------------------- regime

struct RegimeSetup {
  ParamText pt;
  std::string p_range, q_range;  // lo:hi:count
};

std::vector<Number> exact_range(const std::string& text, const std::string& fallback) {
  if (text.empty()) return {Number::parse(fallback)};
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string s; std::getline(ss, s, ':');) parts.push_back(s);
  require(parts.size() == 3, ErrorKind::invalid_argument, "range '" + text + "' is not lo:hi:count");
  Number lo = Number::parse(parts[0]), hi = Number::parse(parts[1]);
  int count = 0;
  try {
    count = std::stoi(parts[2]);
  } catch (const std::exception&) {
    fail(ErrorKind::invalid_argument, "range count '" + parts[2] + "' is not an integer");
  }
  require(count >= 1, ErrorKind::invalid_argument, "range count must be positive");
  std::vector<Number> out;
  for (int i = 0; i < count; ++i) {
    if (count == 1) {
      out.push_back(lo);
    } else if (lo.is_exact() && hi.is_exact()) {
      out.push_back(Number::exact(lo.rational() + (hi.rational() - lo.rational()) * i / (count - 1)));
    } else {
      out.push_back(Number(lo.value() + (hi.value() - lo.value()) * i / (count - 1)));
    }
  }
  return out;
}

json exponents_json(const Exponents& e) {
  json j;
  j["theta"] = e.theta ? json(*e.theta) : json(nullptr);
  j["sigma"] = e.sigma ? json(*e.sigma) : json(nullptr);
  j["q_sobolev"] = e.q_sobolev.infinite ? json("inf") : json(e.q_sobolev.value);
  j["q_cs"] = e.q_cs;
  j["q_rad"] = e.q_rad ? json(*e.q_rad) : json(nullptr);
  j["c_star"] = e.c_star ? json(*e.c_star) : json(nullptr);
  j["beta_interval"] = e.beta_interval ? json({e.beta_interval->first, e.beta_interval->second}) : json(nullptr);
  j["exact"] = {{"theta", rational_or_null(e.theta_exact)},
                {"q_sobolev", rational_or_null(e.q_sobolev_exact)},
                {"q_cs", rational_or_null(e.q_cs_exact)},
                {"q_rad", rational_or_null(e.q_rad_exact)}};
  return j;
}

json regime_json(const RegimeReport& r) {
  return {{"classification", to_string(r.classification)},
          {"flags", {{"Q", r.q}, {"Q0", r.q0}, {"Qrad", r.qrad}, {"Qrad0", r.qrad0}, {"Qrad3", r.qrad3}, {"P", r.p}}},
          {"annotation", r.annotation},
          {"exact", r.exact}};
}

int cmd_regime(const RegimeSetup& s, Run& run, std::ostream& out) {
  run.settings = s.pt.to_json();
  run.settings["p_range"] = s.p_range;
  run.settings["q_range"] = s.q_range;

  if (s.p_range.empty() && s.q_range.empty()) {
    Params pr = s.pt.params();
    auto rep = classify(pr);
    json j = regime_json(rep);
    j["params"] = s.pt.to_json();
    j["exponents"] = exponents_json(critical_exponents(pr));
    run.write("regime.json", j.dump(2) + "\n");
    out << to_string(rep.classification) << "\n";
    if (!rep.annotation.empty()) out << "  " << rep.annotation << "\n";
    return kOk;
  }

  auto ps = exact_range(s.p_range, s.pt.p);
  auto qs = exact_range(s.q_range, s.pt.q);
  Params base = s.pt.params();

  std::ostringstream grid;
  grid << "p,q,classification,Q,Q0,Qrad,Qrad0,Qrad3,P,annotation\n";
  for (const auto& p : ps)
    for (const auto& q : qs) {
      Params pr = base;
      pr.p = p;
      pr.q = q;
      pr.validate();
      auto r = classify(pr);
      grid << p.str() << "," << q.str() << "," << to_string(r.classification) << "," << r.q << "," << r.q0
           << "," << r.qrad << "," << r.qrad0 << "," << r.qrad3 << "," << r.p << ","
           << csv_field(r.annotation) << "\n";
    }

  // Critical exponents as functions of p; empty cells where one does not exist.
  std::ostringstream curves;
  curves << "p,q_cs,q_rad,q_sobolev,q_cs_exact,q_rad_exact,q_sobolev_exact\n";
  for (const auto& p : ps) {
    Params pr = base;
    pr.p = p;
    pr.validate();
    auto e = critical_exponents(pr);
    auto exact = [](const std::optional<Rational>& r) { return r ? to_string(*r) : std::string(); };
    curves << p.str() << "," << fmt(e.q_cs) << "," << (e.q_rad ? fmt(*e.q_rad) : "") << ","
           << (e.q_sobolev.infinite ? "inf" : fmt(e.q_sobolev.value)) << "," << exact(e.q_cs_exact) << ","
           << exact(e.q_rad_exact) << "," << (e.q_sobolev.infinite ? "inf" : exact(e.q_sobolev_exact)) << "\n";
  }
  run.write("regime_grid.csv", grid.str());
  run.write("regime_curves.csv", curves.str());
  out << ps.size() * qs.size() << " points, " << ps.size() << " curve rows\n";
  return kOk;
}

// ---------------------------------------------------------------- solve

struct SolveSetup {
  ParamText pt;
  GridText grid;
  SolverConfig cfg;
  std::string init = "gaussian";
  std::string config_file;

  void add_to(CLI::App* app) {
    pt.add_to(app);
    grid.add_to(app);
    app->add_option("--c", cfg.c, "constraint int |u|^q = c")->capture_default_str();
    app->add_option("--init", init, "initial profile")
        ->check(CLI::IsMember({"gaussian", "annular"}))
        ->capture_default_str();
    app->add_option("--width", cfg.init.width, "initial profile width")->capture_default_str();
    app->add_option("--center", cfg.init.center, "annular centre")->capture_default_str();
    app->add_option("--step0", cfg.step0)->capture_default_str();
    app->add_option("--backtrack", cfg.backtrack_factor, "line search factor")->capture_default_str();
    app->add_option("--tol-grad", cfg.tol_grad)->capture_default_str();
    app->add_option("--tol-energy", cfg.tol_energy)->capture_default_str();
    app->add_option("--max-iter", cfg.max_iter)->capture_default_str();
    app->add_option("--seed", cfg.seed)->capture_default_str();
    app->add_option("--dilation", cfg.dilation, "dilation step each iteration")->capture_default_str();
    app->add_option("--boundary-mass-tol", cfg.boundary_mass_tol)->capture_default_str();
  }

  void apply(const json& flat) {
    require(flat.is_object(), ErrorKind::invalid_argument, "solve config must be a JSON object");
    for (const auto& [key, v] : flat.items()) {
      if (pt.apply(key, v) || grid.apply(key, v)) continue;
      if (key == "c") cfg.c = get_as<double>(v, key);
      else if (key == "init") init = get_as<std::string>(v, key);
      else if (key == "width") cfg.init.width = get_as<double>(v, key);
      else if (key == "center") cfg.init.center = get_as<double>(v, key);
      else if (key == "step0") cfg.step0 = get_as<double>(v, key);
      else if (key == "backtrack_factor") cfg.backtrack_factor = get_as<double>(v, key);
      else if (key == "tol_grad") cfg.tol_grad = get_as<double>(v, key);
      else if (key == "tol_energy") cfg.tol_energy = get_as<double>(v, key);
      else if (key == "max_iter") cfg.max_iter = get_as<int>(v, key);
      else if (key == "seed") cfg.seed = get_as<std::uint64_t>(v, key);
      else if (key == "dilation") cfg.dilation = get_as<bool>(v, key);
      else if (key == "boundary_mass_tol") cfg.boundary_mass_tol = get_as<double>(v, key);
      else fail(ErrorKind::invalid_argument, "unknown solve config key '" + key + "'");
    }
  }

  SolverConfig config() const {
    SolverConfig c = cfg;
    require(init == "gaussian" || init == "annular", ErrorKind::invalid_argument,
            "init must be gaussian or annular");
    c.init.kind = init == "gaussian" ? InitKind::gaussian : InitKind::annular;
    c.validate();
    return c;
  }

  json to_json() const {
    json j = pt.to_json();
    j.update(grid.to_json());
    auto c = cfg.to_json();
    j["c"] = c["c"];
    j["init"] = init;
    j["width"] = cfg.init.width;
    j["center"] = cfg.init.center;
    for (const char* k : {"step0", "backtrack_factor", "tol_grad", "tol_energy", "max_iter", "seed", "dilation",
                          "boundary_mass_tol"})
      j[k] = c[k];
    return j;
  }
};

struct SolveOutcome {
  int code = kOk;
  std::string message;
  json result;
  std::string profile;
};

SolveOutcome solve_once(const SolveSetup& s, const Global& g) {
  Params pr = s.pt.params();
  auto cfg = s.config();
  auto k = kernel_for(pr.n, pr.alpha.value(), s.grid, g.cache_dir);
  auto res = minimize(pr, k, cfg);
  SolveOutcome o;
  o.result = res.to_json();
  o.result["grid"] = s.grid.to_json();
  o.profile = to_csv(res.u);
  if (!res.converged) {
    o.code = kNonconvergence;
    o.message = res.message.empty() ? "did not converge" : res.message;
  } else if (std::max({res.residuals.el, res.residuals.nehari, res.residuals.pohozaev}) > kResidualTol) {
    o.code = kAssertion;
    o.message = "residual above " + fmt(kResidualTol);
  }
  return o;
}

int cmd_solve(const SolveSetup& s, const Global& g, Run& run, std::ostream& out, std::string& message) {
  run.settings = s.to_json();
  auto o = solve_once(s, g);
  run.write("result.json", o.result.dump(2) + "\n");
  run.write("profile.csv", o.profile);
  const auto& r = o.result;
  out << "converged " << r["converged"] << "  M_c " << fmt(r["m_c"]) << "  mu " << fmt(r["mu"]) << "\n"
      << "residuals el " << fmt(r["residuals"]["el"]) << "  nehari " << fmt(r["residuals"]["nehari"])
      << "  pohozaev " << fmt(r["residuals"]["pohozaev"]) << "\n";
  message = o.message;
  return o.code;
}

// ---------------------------------------------------------------- sweep

// Flat solve config where any value may be a list; the cartesian product is run.
int cmd_sweep(const std::string& config_file, const Global& g, Run& run, std::ostream& out, std::string& message) {
  json cfg = load_json(config_file);
  require(cfg.is_object(), ErrorKind::invalid_argument, "sweep config must be a JSON object");
  run.settings = cfg;

  std::vector<std::string> keys, swept;
  for (const auto& [k, v] : cfg.items()) {
    keys.push_back(k);
    if (v.is_array()) {
      require(!v.empty(), ErrorKind::invalid_argument, "sweep list '" + k + "' is empty");
      swept.push_back(k);
    }
  }
  std::vector<json> points{json::object()};
  for (const auto& k : keys) {
    std::vector<json> next;
    const json& v = cfg[k];
    for (const auto& p : points) {
      if (v.is_array()) {
        for (const auto& x : v) {
          json q = p;
          q[k] = x;
          next.push_back(q);
        }
      } else {
        json q = p;
        q[k] = v;
        next.push_back(q);
      }
    }
    points = std::move(next);
  }

  // Validate every point before any work starts.
  std::vector<SolveSetup> setups(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    setups[i].apply(points[i]);
    setups[i].pt.params();
    setups[i].config();
  }
  run.settings["defaults"] = SolveSetup{}.to_json();

  const int count = static_cast<int>(points.size());
  std::vector<SolveOutcome> outcomes(count);
  auto name = [](int i) {
    std::ostringstream os;
    os << "points/" << std::setw(3) << std::setfill('0') << i;
    return os.str();
  };
  parallel_for(
      count,
      [&](int i) {
        try {
          outcomes[i] = solve_once(setups[i], g);
        } catch (const Error& e) {
          outcomes[i].code = code_for(e.kind());
          outcomes[i].message = e.what();
          return;
        }
        fs::path dir = run.dir / name(i);
        std::error_code ec;
        fs::create_directories(dir, ec);
        require(!ec, ErrorKind::io, "cannot create " + dir.string());
        write_atomic(dir / "result.json", outcomes[i].result.dump(2) + "\n");
        write_atomic(dir / "profile.csv", outcomes[i].profile);
      },
      g.threads);

  std::ostringstream csv;
  csv << "index";
  for (const auto& k : swept) csv << "," << k;
  csv << ",exit_code,converged,m_c,mu,el,nehari,pohozaev,iterations,message\n";
  int code = kOk;
  int failed = 0;
  for (int i = 0; i < count; ++i) {
    const auto& o = outcomes[i];
    csv << i;
    for (const auto& k : swept) csv << "," << csv_field(points[i][k].is_string() ? points[i][k].get<std::string>() : points[i][k].dump());
    csv << "," << o.code;
    if (o.result.is_null()) {
      csv << ",,,,,,,";
    } else {
      const auto& r = o.result;
      csv << "," << r["converged"] << "," << fmt(r["m_c"]) << "," << fmt(r["mu"]) << ","
          << fmt(r["residuals"]["el"]) << "," << fmt(r["residuals"]["nehari"]) << ","
          << fmt(r["residuals"]["pohozaev"]) << "," << r["iterations"];
      run.outputs.push_back(name(i) + "/result.json");
      run.outputs.push_back(name(i) + "/profile.csv");
    }
    csv << "," << csv_field(o.message) << "\n";
    if (o.code != kOk) {
      ++failed;
      if (code == kOk) code = o.code;
    }
  }
  run.write("sweep.csv", csv.str());
  out << count << " points, " << failed << " failed\n";
  if (failed > 0) message = std::to_string(failed) + " of " + std::to_string(count) + " points failed";
  return code;
}

// ---------------------------------------------------------------- family

struct FamilySetup {
  std::string kind;
  ParamText pt;
  std::string range;
  FamilySpec spec;  // scalar knobs only; kind, params and range come from the fields above
  int m = 512;
  double slope_tolerance = 0.05;
  std::string config_file;

  void add_to(CLI::App* app) {
    app->add_option("kind", kind, "sobolev_scaling, annular, vanishing_chain, cube_array, cantor_cascade, "
                                  "translated_bumps or log_tail");
    pt.add_to(app);
    app->add_option("--R,--range", range, "family parameter list, e.g. 4,8,...,256");
    app->add_option("--chain-r", spec.chain_r, "vanishing_chain base radius")->capture_default_str();
    app->add_option("--d", spec.lattice_d, "cube_array lattice dimension, 0 = smallest admissible")
        ->capture_default_str();
    app->add_option("--rho", spec.rho, "cantor_cascade contraction")->capture_default_str();
    app->add_option("--copies", spec.copies, "translated_bumps copies")->capture_default_str();
    app->add_option("--delta", spec.delta, "log_tail exponent")->capture_default_str();
    app->add_option("--m", m, "radial nodes per member")->capture_default_str();
    app->add_option("--slope-tol", slope_tolerance, "slope tolerance")->capture_default_str();
  }

  void apply(const json& flat) {
    require(flat.is_object(), ErrorKind::invalid_argument, "family config must be a JSON object");
    for (const auto& [key, v] : flat.items()) {
      if (pt.apply(key, v)) continue;
      if (key == "kind") kind = get_as<std::string>(v, key);
      else if (key == "range") {
        if (v.is_string()) {
          range = v.get<std::string>();
        } else {
          range.clear();
          for (double x : get_as<std::vector<double>>(v, key)) range += (range.empty() ? "" : ",") + fmt(x);
        }
      } else if (key == "chain_r") spec.chain_r = get_as<double>(v, key);
      else if (key == "lattice_d") spec.lattice_d = get_as<int>(v, key);
      else if (key == "rho") spec.rho = get_as<double>(v, key);
      else if (key == "copies") spec.copies = get_as<int>(v, key);
      else if (key == "delta") spec.delta = get_as<double>(v, key);
      else if (key == "m") m = get_as<int>(v, key);
      else if (key == "slope_tolerance") slope_tolerance = get_as<double>(v, key);
      else fail(ErrorKind::invalid_argument, "unknown family config key '" + key + "'");
    }
  }

  FamilySpec build() const {
    require(!kind.empty(), ErrorKind::invalid_argument, "family kind is required");
    FamilySpec s = spec;
    std::string k = kind;
    std::replace(k.begin(), k.end(), '-', '_');
    s.kind = family_kind_from_string(k);
    s.params = pt.params();
    s.range = range.empty() ? std::vector<double>{} : parse_list(range);
    s.validate();
    return s;
  }
};

int cmd_family(const FamilySetup& f, const Global& g, Run& run, std::ostream& out, std::string& message) {
  FamilySpec spec = f.build();
  FamilyOptions opts;
  opts.m = f.m;
  opts.threads = g.threads;
  opts.slope_tolerance = f.slope_tolerance;
  run.settings = spec.to_json();
  run.settings["m"] = f.m;
  run.settings["slope_tolerance"] = f.slope_tolerance;

  auto rep = run_family(spec, opts);
  run.write("family.json", rep.to_json().dump(2) + "\n");
  run.write("family.csv", rep.to_csv());
  out << to_string(rep.kind) << " " << spec.params.str() << ", " << rep.members.size() << " members\n";
  for (const auto& s : rep.slopes)
    out << "  slope " << s.quantity << ": fitted " << fmt(s.fitted) << ", predicted " << fmt(s.predicted)
        << (s.ok ? "  ok" : "  FAIL") << "\n";
  for (const auto& [k, v] : rep.verdicts) out << "  " << k << ": " << (v ? "ok" : "FAIL") << "\n";
  if (!rep.passed()) {
    message = "family checks failed";
    return kAssertion;
  }
  return kOk;
}

// ---------------------------------------------------------------- verify

struct VerifySetup {
  std::string suite;
  ParamText pt;
  GridText grid{1024, 1e-4, 1e4};
  std::string preset = "all";
  std::string profile;  // CSV written by solve; default e^{-r^2}
  double gamma = 0.75, delta = 0.75, beta = 1.0;
  std::string r_max_list = "1e2,1e3,1e4";
  std::string r_list = "0.5,1,2,4,8";
  int samples = 200;
  std::uint64_t seed = 1;
  bool groundstate = false;

  void add_to(CLI::App* app) {
    app->add_option("suite", suite, "brezis-lieb, average, weighted-log, log-tail, power, decay or interpolation")
        ->required()
        ->check(CLI::IsMember({"brezis-lieb", "average", "weighted-log", "log-tail", "power", "decay", "interpolation"}));
    pt.add_to(app);
    grid.add_to(app);
    app->add_option("--preset", preset, "brezis-lieb preset or all")->capture_default_str();
    app->add_option("--profile", profile, "radial profile CSV (r,u) from solve");
    app->add_option("--gamma", gamma, "log weight exponent")->capture_default_str();
    app->add_option("--delta", delta, "log tail exponent")->capture_default_str();
    app->add_option("--rmax", r_max_list, "log-tail truncation radii")->capture_default_str();
    app->add_option("--beta", beta, "power weight exponent")->capture_default_str();
    app->add_option("--R", r_list, "power weight radii")->capture_default_str();
    app->add_option("--samples", samples, "random profiles for interpolation")->capture_default_str();
    app->add_option("--seed", seed)->capture_default_str();
    app->add_flag("--groundstate", groundstate, "profile is a groundstate: assert an interior maximum");
  }

  json to_json() const {
    json j = pt.to_json();
    j.update(grid.to_json());
    j["suite"] = suite;
    j["preset"] = preset;
    j["profile"] = profile;
    j["gamma"] = gamma;
    j["delta"] = delta;
    j["rmax"] = r_max_list;
    j["beta"] = beta;
    j["R"] = r_list;
    j["samples"] = samples;
    j["seed"] = seed;
    j["groundstate"] = groundstate;
    return j;
  }
};

RadialFunction read_profile(const std::string& path, int n) {
  std::istringstream in(read_file(path));
  std::string line;
  std::getline(in, line);
  require(line.rfind("r,u", 0) == 0, ErrorKind::invalid_argument, path + ": expected header r,u");
  std::vector<double> r, u;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto comma = line.find(',');
    require(comma != std::string::npos, ErrorKind::invalid_argument, path + ": malformed row");
    try {
      r.push_back(std::stod(line.substr(0, comma)));
      u.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      fail(ErrorKind::invalid_argument, path + ": malformed row '" + line + "'");
    }
  }
  require(r.size() >= 2, ErrorKind::invalid_argument, path + ": fewer than two rows");
  auto g = RadialGrid::make(r.front(), r.back(), static_cast<int>(r.size()), n);
  for (std::size_t j = 0; j < r.size(); ++j)
    require(std::fabs(g->r(static_cast<int>(j)) - r[j]) <= 1e-10 * r[j], ErrorKind::invalid_argument,
            path + ": radii are not a log grid");
  return RadialFunction(g, u);
}

int cmd_verify(const VerifySetup& v, const Global& g, Run& run, std::ostream& out, std::string& message) {
  run.settings = v.to_json();
  Params pr = v.pt.params();
  const double p = pr.p.value();
  std::vector<VerifyReport> reports;

  auto kernel = [&](const RadialFunction* u) {
    if (!u) return kernel_for(pr.n, pr.alpha.value(), v.grid, g.cache_dir);
    GridText gt{u->m(), u->grid->r_min(), u->grid->r_max()};
    return kernel_for(pr.n, pr.alpha.value(), gt, g.cache_dir);
  };
  std::optional<RadialFunction> loaded;
  if (!v.profile.empty()) loaded = read_profile(v.profile, pr.n);
  auto k = kernel(loaded ? &*loaded : nullptr);
  RadialFunction u = loaded ? *loaded : RadialFunction::sample(k->grid_ptr(), [](double r) { return std::exp(-r * r); });

  if (v.suite == "brezis-lieb") {
    auto names = v.preset == "all" ? brezis_lieb_presets() : std::vector<std::string>{v.preset};
    for (const auto& name : names) reports.push_back(brezis_lieb_preset(name, pr, v.grid.m));
  } else if (v.suite == "average") {
    reports.push_back(check_average_estimate(u, p, *k));
  } else if (v.suite == "weighted-log") {
    reports.push_back(check_weighted_log(u, p, *k, v.gamma));
  } else if (v.suite == "log-tail") {
    reports.push_back(weighted_log_sweep(pr, v.gamma, v.delta, parse_list(v.r_max_list), v.grid.m));
  } else if (v.suite == "power") {
    reports.push_back(check_power_exterior(u, p, *k, v.beta, parse_list(v.r_list)));
  } else if (v.suite == "decay") {
    bool gs = v.groundstate;
    if (!loaded) {
      auto res = minimize(pr, k);
      require(res.converged, ErrorKind::nonconvergence, "groundstate solve did not converge: " + res.message);
      u = res.u;
      gs = true;
    }
    reports.push_back(check_radial_decay(u, pr, *k, gs));
  } else if (v.suite == "interpolation") {
    RunningMinimum best;
    reports.push_back(check_interpolation(u, pr, *k, &best));
    std::mt19937_64 rng(v.seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int i = 0; i < v.samples; ++i) {
      const int terms = 1 + static_cast<int>(3 * u01(rng));
      std::vector<std::array<double, 3>> t;
      for (int j = 0; j < terms; ++j) t.push_back({0.2 + 2 * u01(rng), 3 * u01(rng), 0.2 + 1.5 * u01(rng)});
      auto w = RadialFunction::sample(k->grid_ptr(), [&t](double r) {
        double s = 0.0;
        for (auto [a, c, wd] : t) s += a * std::exp(-(r - c) * (r - c) / (wd * wd));
        return s;
      });
      check_interpolation(w, pr, *k, &best);
    }
    VerifyReport summary;
    summary.check = "interpolation_minimum";
    summary.inequalities.push_back({"minimum_positive", best.value(), 0.0, true});
    summary.values["minimum"] = best.value();
    summary.values["samples"] = static_cast<double>(best.count());
    summary.metadata["argmin"] = best.label();
    reports.push_back(summary);
  }

  json j;
  j["suite"] = v.suite;
  j["reports"] = json::array();
  for (const auto& r : reports) j["reports"].push_back(r.to_json());
  run.write("verify.json", j.dump(2) + "\n");
  run.write("verify.csv", summary_csv(reports));

  int failed = 0;
  for (const auto& r : reports) {
    out << r.check;
    if (r.metadata.contains("preset")) out << " " << r.metadata["preset"].get<std::string>();
    out << (r.trivial ? " (trivial)" : "") << ": " << (r.passed() ? "pass" : "FAIL") << "\n";
    failed += !r.passed();
  }
  if (failed > 0) {
    message = std::to_string(failed) + " report(s) failed";
    return kAssertion;
  }
  return kOk;
}

}  // namespace

// ---------------------------------------------------------------- public

std::vector<double> parse_list(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string s; std::getline(ss, s, ',');) {
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
    parts.push_back(s);
  }
  auto num = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      double v = std::stod(s, &used);
      if (used == s.size() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    fail(ErrorKind::invalid_argument, "list entry '" + s + "' in '" + text + "' is not a number");
  };
  std::vector<double> out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i] != "...") {
      out.push_back(num(parts[i]));
      continue;
    }
    require(i == 2 && parts.size() == 4, ErrorKind::invalid_argument,
            "list '" + text + "': an ellipsis needs the form a,b,...,z");
    const double a = out[0], b = out[1], z = num(parts[3]);
    const double tol = 1e-9;
    bool geometric = false;
    if (a > 0 && b > 0 && z > 0 && b != a) {
      double k = std::log(z / a) / std::log(b / a);
      if (k > 1 && std::fabs(k - std::round(k)) < tol) {
        geometric = true;
        const int steps = static_cast<int>(std::round(k));
        for (int s = 2; s <= steps; ++s) out.push_back(a * std::pow(b / a, s));
        out.back() = z;
      }
    }
    if (!geometric) {
      require(b != a, ErrorKind::invalid_argument, "list '" + text + "': zero step");
      double k = (z - a) / (b - a);
      require(k > 1 && std::fabs(k - std::round(k)) < tol, ErrorKind::invalid_argument,
              "list '" + text + "': the progression does not reach the last entry");
      const int steps = static_cast<int>(std::round(k));
      for (int s = 2; s <= steps; ++s) out.push_back(a + s * (b - a));
      out.back() = z;
    }
    break;
  }
  require(!out.empty(), ErrorKind::invalid_argument, "empty list");
  return out;
}

void write_atomic(const fs::path& path, const std::string& content) {
  static std::atomic<unsigned> counter{0};
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    require(f.good(), ErrorKind::io, "cannot open " + tmp.string());
    f << content;
    f.flush();
    require(f.good(), ErrorKind::io, "cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(ErrorKind::io, "cannot rename into " + path.string());
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Riesz-Coulomb interpolation and groundstate lab"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  Global g;
  app.add_option("--out", g.out, "output directory")->capture_default_str();
  app.add_option("--threads", g.threads, "workers for sweeps and families, 0 = SPSLAB_THREADS or all cores")
      ->capture_default_str();
  app.add_option("--cache-dir", g.cache_dir, "kernel cache directory (default SPSLAB_CACHE_DIR)");

  RegimeSetup regime;
  auto* c_regime = app.add_subcommand("regime", "classify (N, alpha, p, q) or a (p, q) grid");
  regime.pt.add_to(c_regime);
  c_regime->add_option("--p-range", regime.p_range, "lo:hi:count, exact for rational ends");
  c_regime->add_option("--q-range", regime.q_range, "lo:hi:count, exact for rational ends");

  SolveSetup solve;
  auto* c_solve = app.add_subcommand("solve", "minimize E_* on the L^q sphere");
  solve.add_to(c_solve);
  c_solve->add_option("--config", solve.config_file, "flat JSON config; flags override it");

  FamilySetup family;
  auto* c_family = app.add_subcommand("family", "generate a test family and fit its rates");
  family.add_to(c_family);
  c_family->add_option("--config", family.config_file, "flat JSON config; flags override it");

  VerifySetup verify;
  auto* c_verify = app.add_subcommand("verify", "run a verification suite");
  verify.add_to(c_verify);

  std::string sweep_config;
  auto* c_sweep = app.add_subcommand("sweep", "solve over the cartesian product of a JSON config");
  c_sweep->add_option("config", sweep_config, "flat solve config, list values are swept")->required();

  std::string replay_manifest;
  auto* c_replay = app.add_subcommand("replay", "rerun the command recorded in a manifest");
  c_replay->add_option("manifest", replay_manifest)->required();

  std::vector<std::string> argv_store{"spslab"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());
  auto parse = [&] { app.parse(static_cast<int>(argv.size()), argv.data()); };

  try {
    parse();
    // Config values sit under the flags: load them, then parse again so given flags win.
    auto reparse = [&](auto& setup, const std::string& file) {
      if (file.empty()) return;
      using T = std::decay_t<decltype(setup)>;
      json cfg = load_json(file);
      setup = T{};
      setup.apply(cfg);
      app.clear();
      parse();
    };
    if (c_solve->parsed()) reparse(solve, solve.config_file);
    if (c_family->parsed()) reparse(family, family.config_file);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return code_for(e.kind());
  }

  if (c_replay->parsed()) {
    json m;
    try {
      m = load_json(replay_manifest);
    } catch (const Error& e) {
      err << "error: " << e.what() << "\n";
      return code_for(e.kind());
    }
    if (!m.contains("args") || !m["args"].is_array()) {
      err << "error: " << replay_manifest << " has no args\n";
      return kUsage;
    }
    std::vector<std::string> rerun;
    const auto recorded = m["args"].get<std::vector<std::string>>();
    for (std::size_t i = 0; i < recorded.size(); ++i) {
      if (recorded[i] == "--out") {
        ++i;
        continue;
      }
      if (recorded[i].rfind("--out=", 0) == 0) continue;
      rerun.push_back(recorded[i]);
    }
    rerun.insert(rerun.begin(), {"--out", g.out});
    return run(rerun, out, err);
  }

  Run r;
  r.args = args;
  r.dir = g.out;
  r.command = app.get_subcommands().front()->get_name();
  std::error_code ec;
  fs::create_directories(r.dir, ec);
  if (ec) {
    err << "error: cannot create output directory " << g.out << "\n";
    return kIo;
  }

  int code = kOk;
  std::string message;
  try {
    if (c_regime->parsed()) code = cmd_regime(regime, r, out);
    else if (c_solve->parsed()) code = cmd_solve(solve, g, r, out, message);
    else if (c_family->parsed()) code = cmd_family(family, g, r, out, message);
    else if (c_verify->parsed()) code = cmd_verify(verify, g, r, out, message);
    else if (c_sweep->parsed()) code = cmd_sweep(sweep_config, g, r, out, message);
  } catch (const Error& e) {
    code = code_for(e.kind());
    message = e.what();
  } catch (const std::exception& e) {
    code = kAssertion;
    message = e.what();
  }
  if (code != kOk) err << "error: " << message << "\n";
  try {
    r.manifest(code, message);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    if (code == kOk) code = kIo;
  }
  return code;
}

}  // namespace spslab::cli
