// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "cli.hpp"

#include "spslab/energy.hpp"
#include "spslab/families.hpp"
#include "spslab/radialgrid.hpp"
#include "spslab/regime.hpp"
#include "spslab/riesz.hpp"
#include "spslab/solver.hpp"
#include "spslab/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

using namespace spslab;
namespace fs = std::filesystem;

namespace {

Params params(int n, const char* a, const char* p, const char* q) {
  return Params{n, Number::parse(a), Number::parse(p), Number::parse(q)};
}

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

std::string num(double v, int digits = 4) {
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

KernelPtr kernel(double alpha, int m, int n = 3, double r_min = 1e-4, double r_max = 1e4) {
  static std::map<std::tuple<double, int, int, double, double>, KernelPtr> cache;
  auto key = std::tuple{alpha, m, n, r_min, r_max};
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto k = assemble_kernel(RadialGrid::make(r_min, r_max, m, n), alpha);
  cache.emplace(key, k);
  return k;
}

double sphere(int n) { return 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n); }

// Riesz normalization Gamma((N-alpha)/2) / (Gamma(alpha/2) pi^{N/2} 2^alpha).
double riesz_a(int n, double alpha) {
  return std::tgamma(0.5 * (n - alpha)) / (std::tgamma(0.5 * alpha) * std::pow(M_PI, 0.5 * n) * std::pow(2.0, alpha));
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

// ---------------------------------------------------------------- 1

Outcome exponent_algebra() {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst = 0.0;
  int points = 0;
  while (points < 10000) {
    int n = 2 + static_cast<int>(U(rng) * 5);
    double a = 0.05 + U(rng) * (n - 0.1), p = 1 + 4 * U(rng), q = 1 + 9 * U(rng);
    if (std::fabs((n + a) - p * (n - 2)) < 1e-3) continue;
    double th = theta_of(Params{n, a, p, q});
    double rhs = th * (0.5 - 1.0 / n) + (1 - th) * (n + a) / (2.0 * n * p);
    worst = std::max(worst, std::fabs(1 / q - rhs) / std::max(1.0, std::fabs(th)));
    ++points;
  }
  bool exact = true;
  std::uniform_int_distribution<int> small(1, 12);
  for (int k = 0; k < 300; ++k) {
    int n = 3 + k % 4;
    Rational a(small(rng), 4), p = 1 + Rational(small(rng), 5);
    if (a >= n || p * (n - 2) == a + n) continue;
    Params sob{n, Number::exact(a), Number::exact(p), Number::exact(Rational(2 * n, n - 2))};
    Params cs{n, Number::exact(a), Number::exact(p), Number::exact(2 * (2 * p + a) / (2 + a))};
    exact = exact && *theta_exact(sob) == 1 && *theta_exact(cs) == a / (2 * p + a);
  }
  auto e = critical_exponents(params(3, "2", "2", "4"));
  bool named = e.q_cs_exact && *e.q_cs_exact == 3 && e.q_rad_exact && *e.q_rad_exact == Rational(18, 7) &&
               e.q_sobolev_exact && *e.q_sobolev_exact == 6;
  return {worst <= 1e-14 && exact && named,
          "identity residual " + num(worst) + " on 10^4 points; exact theta " + (exact ? "ok" : "WRONG") +
              "; (3,2,2): q_cs=3, q_rad=18/7, q_sobolev=6 " + (named ? "ok" : "WRONG")};
}

// ---------------------------------------------------------------- 2

double mc_sphere_pair(int n, double alpha, double r, double s, long samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> v(n);
  double sum = 0.0;
  for (long k = 0; k < samples; ++k) {
    double nn = 0.0;
    for (int i = 0; i < n; ++i) {
      v[i] = g(rng);
      nn += v[i] * v[i];
    }
    double c = v[0] / std::sqrt(nn);
    sum += std::pow(r * r + s * s - 2 * r * s * c, -0.5 * (n - alpha));
  }
  return sphere(n) * sphere(n) * sum / samples;
}

Outcome kernel_correctness() {
  auto g = RadialGrid::make(1e-4, 1e4, 2048, 3);
  auto k = assemble_kernel(g, 2.0);
  const double c = riesz_a(3, 2.0) * sphere(3) * sphere(2) * 2;  // A_2 C_3
  double worst = 0.0;
  for (int i = 0; i < g->m(); ++i)
    for (int j = 0; j < g->m(); ++j) {
      double oracle = c * std::min(g->r(i), g->r(j)) / (g->r(i) * g->r(j));
      worst = std::max(worst, rel((*k)(i, j), oracle));
    }
  // Off-diagonal points keep the Monte-Carlo integrand bounded.
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double mc_worst = 0.0;
  std::string pts;
  for (int t = 0; t < 5; ++t) {
    int n = 2 + static_cast<int>(U(rng) * 4);
    double a = 0.2 + U(rng) * (n - 0.4), r = 0.2 + 4.8 * U(rng), s = 0.2 + 4.8 * U(rng);
    if (std::fabs(std::log(r / s)) < 0.3) {
      --t;
      continue;
    }
    double mc = mc_sphere_pair(n, a, r, s, 10'000'000, 7 + t);
    double e = rel(kernel_value(n, a, r, s), mc);
    mc_worst = std::max(mc_worst, e);
    pts += " N=" + std::to_string(n) + ",a=" + num(a, 3);
  }
  return {worst <= 1e-12 && mc_worst <= 5e-3, "closed form max rel " + num(worst) + "; Monte-Carlo max rel " +
                                                  num(mc_worst) + " at" + pts};
}

// ---------------------------------------------------------------- 3

Outcome coulomb_oracle() {
  // Smoothed indicator with a ramp in r^3 that keeps the unit-ball volume.
  const double eps = 0.01;
  auto f = [eps](double r) { return std::clamp((1 + eps - r * r * r) / (2 * eps), 0.0, 1.0); };
  // Newtonian self-energy by the shell theorem, trapezoid on a fine uniform mesh.
  const int cells = 200000;
  const double r_end = std::cbrt(1 + eps), h = r_end / cells;
  std::vector<double> rr(cells + 1), fv(cells + 1), inner(cells + 1, 0.0), outer(cells + 1, 0.0);
  for (int i = 0; i <= cells; ++i) {
    rr[i] = h * i;
    fv[i] = f(rr[i]);
  }
  for (int i = 1; i <= cells; ++i)
    inner[i] = inner[i - 1] + 0.5 * h * (fv[i - 1] * rr[i - 1] * rr[i - 1] + fv[i] * rr[i] * rr[i]);
  for (int i = cells - 1; i >= 0; --i) outer[i] = outer[i + 1] + 0.5 * h * (fv[i] * rr[i] + fv[i + 1] * rr[i + 1]);
  double shell = 0.0;
  for (int i = 1; i <= cells; ++i) {
    auto term = [&](int j) { return fv[j] * rr[j] * rr[j] * (inner[j] / rr[j] + outer[j]); };
    shell += 0.5 * h * ((i - 1 == 0 ? 0.0 : term(i - 1)) + term(i));
  }
  shell *= 4 * M_PI;  // (1/4pi) (4pi)^2

  // Monte-Carlo double integral of 1/|x-y| over the unit ball, times A_2 = 1/(4 pi).
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  auto draw = [&](double* x) {
    do {
      x[0] = U(rng), x[1] = U(rng), x[2] = U(rng);
    } while (x[0] * x[0] + x[1] * x[1] + x[2] * x[2] > 1);
  };
  const long samples = 4'000'000;
  double acc = 0.0;
  for (long i = 0; i < samples; ++i) {
    double x[3], y[3];
    draw(x);
    draw(y);
    acc += 1 / std::hypot(x[0] - y[0], x[1] - y[1], x[2] - y[2]);
  }
  const double vol = 4 * M_PI / 3;
  const double mc = acc / samples * vol * vol / (4 * M_PI);

  auto g = RadialGrid::make(1e-3, 4.0, 4096, 3);
  auto k = assemble_kernel(g, 2.0);
  const double v = coulomb_energy(RadialFunction::sample(g, f), 1.0, *k);
  const double exact = 8 * M_PI / 15;
  bool ok = rel(v, exact) <= 1e-2 && rel(v, shell) <= 1e-2 && rel(v, mc) <= 1e-2;
  return {ok, "V = " + num(v, 8) + ", shell theorem " + num(shell, 8) + ", Monte-Carlo " + num(mc, 6) +
                  ", indicator value 8pi/15 = " + num(exact, 8)};
}

// ---------------------------------------------------------------- 4

Outcome dilation_covariance() {
  double worst = 0.0;
  for (int n : {2, 3, 4})
    for (double a : {0.5, 1.0, 1.5}) {
      auto g = RadialGrid::make(1e-3, 1e3, 1024, n);
      auto k = assemble_kernel(g, a);
      // supported on [0.5, 2]
      auto u = RadialFunction::sample(g, [](double r) {
        double x = (r - 1.25) / 0.75;
        return std::fabs(x) < 1 ? std::pow(1 - x * x, 3) : 0.0;
      });
      const double d0 = dirichlet_energy(u), v0 = coulomb_energy(u, 2.0, *k), l0 = lq_power(u, 3.0);
      for (int s : {-200, -37, 50, 180}) {
        auto w = dilate(u, s);
        const double t = s * g->h();
        worst = std::max({worst, rel(dirichlet_energy(w), std::exp(t * (n - 2)) * d0),
                          rel(coulomb_energy(w, 2.0, *k), std::exp(t * (n + a)) * v0),
                          rel(lq_power(w, 3.0), std::exp(t * n) * l0)});
      }
    }
  return {worst <= 1e-6, "max rel error " + num(worst) + " over N in {2,3,4}, alpha in {0.5,1,1.5}, 4 shifts"};
}

// ---------------------------------------------------------------- 5

Outcome groundstate_identities() {
  bool ok = true;
  std::string d;
  for (const char* q : {"2.8", "3", "4", "5"}) {
    auto pr = params(3, "2", "2", q);
    auto coarse = minimize(pr, kernel(2.0, 1024));
    auto fine = minimize(pr, kernel(2.0, 2048));
    const auto& r = fine.residuals;
    bool good = fine.converged && coarse.converged && std::max({r.el, r.nehari, r.pohozaev}) <= 1e-3;
    bool halves = fine.residuals.el <= 0.5 * coarse.residuals.el &&
                  fine.residuals.nehari <= 0.5 * coarse.residuals.nehari &&
                  fine.residuals.pohozaev <= 0.5 * coarse.residuals.pohozaev;
    bool ratios = true;
    if (!is_cs_critical(pr)) {
      // mu-normalized Pohozaev ratios, from the Nehari and Pohozaev relations
      // Nehari D + V = mu L and Pohozaev (N-2)/2 D + (N+alpha)/(2p) V = mu (N/q) L, L = int |u|^q
      const double n = 3, a = 2, p = 2, qq = pr.q.value();
      const double det = (n + a) / (2 * p) - (n - 2) / 2;
      const double rd = ((n + a) / (2 * p) - n / qq) / det, rv = (n / qq - (n - 2) / 2) / det;
      const double fd = fine.energy.dirichlet / (fine.mu * fine.energy.lq_power);
      const double fv = fine.energy.coulomb / (fine.mu * fine.energy.lq_power);
      ratios = std::fabs(fd - rd) <= 1e-2 * std::fabs(rd) && std::fabs(fv - rv) <= 1e-2 * std::fabs(rv);
    }
    ok = ok && good && halves && ratios;
    d += std::string(" q=") + q + ": poh " + num(coarse.residuals.pohozaev, 2) + "->" + num(r.pohozaev, 2) +
         (good ? "" : " RESIDUAL") + (halves ? "" : " NO-HALVING") + (ratios ? "" : " RATIO");
  }
  return {ok, d.substr(1)};
}

// ---------------------------------------------------------------- 6

Outcome scaling_law() {
  auto k = kernel(2.0, 2048);
  auto r4 = scaling_law_check(params(3, "2", "2", "4"), k, {0.5, 1.0, 2.0});
  auto r3 = scaling_law_check(params(3, "2", "2", "3"), k, {0.5, 1.0, 2.0});
  // 2 sigma/q is 3/5 at (3,2,2,4) and 1 at q_cs
  bool ok = !r4.partial && !r3.partial && std::fabs(r4.predicted_slope - 0.6) < 1e-14 &&
            std::fabs(r4.slope - 0.6) <= 0.02 && std::fabs(r3.slope - 1.0) <= 0.02;
  return {ok, "q=4 slope " + num(r4.slope, 6) + " (0.6); q=3 slope " + num(r3.slope, 6) + " (1)"};
}

// ---------------------------------------------------------------- 7

Outcome eigenvalue_bound() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> ua(0.05, 2.95), up(1.0, 4.0);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    Params pr;
    pr.n = 3;
    pr.alpha = ua(rng);
    pr.p = up(rng);
    pr.q = q_cs_of(pr);
    worst = std::max(worst, std::fabs(mu_bound_identity(pr) - 1.0));
  }
  auto r = minimize(params(3, "2", "2", "3"), kernel(2.0, 2048));
  if (!r.converged) return {false, "groundstate at q_cs did not converge"};
  auto rep = mu_lower_bound_check(r);
  bool ok = worst <= 1e-12 && rep.mu >= rep.m1 * (1 - 1e-3);
  return {ok, "identity max |x-1| " + num(worst) + " over 50 (alpha,p); mu/M_1 = " + num(rep.mu / rep.m1, 8)};
}

// ---------------------------------------------------------------- 8

Outcome counterexample_rates() {
  std::vector<double> wide, narrow;
  for (int e = 4; e <= 12; e += 2) wide.push_back(std::pow(2.0, e));
  for (int e = 2; e <= 8; ++e) narrow.push_back(std::pow(2.0, e));
  auto flat = annular_family(params(3, "2", "2", "18/7"), wide);
  auto below = annular_family(params(3, "2", "2", "2.5"), narrow);
  const double lq = flat.slope("lq").fitted, quot = below.slope("quotient").fitted;
  auto chain = vanishing_chain(params(3, "2", "2", "3"), 256.0, {1, 2, 3, 4, 5});
  const double growth = chain.slope("lq_power_v").fitted;

  bool cubes = true;
  for (auto rep : {cube_array(params(3, "2", "6", "3"), {1, 2, 3, 4, 5, 6, 7, 8}, 2),
                   cube_array(params(4, "3", "7", "3"), {1, 2, 3, 4, 5, 6, 7, 8}, 2)})
    cubes = cubes && rep.passed();
  bool cantor = true;
  double mass_err = 0.0;
  for (auto rep : {cantor_cascade(2, 1.0, 0.45, 5), cantor_cascade(2, 1.5, 0.8, 5), cantor_cascade(3, 2.0, 0.8, 4)}) {
    cantor = cantor && rep.passed() && rep.verdicts.at("recursion_holds");
    for (double m : rep.column("mass")) mass_err = std::max(mass_err, std::fabs(m - 1.0));
  }
  bool ok = std::fabs(lq) <= 0.02 && quot < 0 && rel(growth, 2.0 / 7) <= 0.05 && cubes && cantor &&
            mass_err <= 1e-13;
  return {ok, "L^q rate at 18/7 " + num(lq, 3) + "; quotient slope at 2.5 " + num(quot, 3) + "; chain " +
                  num(growth, 4) + " vs 2/7; cube arrays " + (cubes ? "ok" : "FAIL") + "; Cantor " +
                  (cantor ? "ok" : "FAIL") + ", mass error " + num(mass_err, 2)};
}

// ---------------------------------------------------------------- 9

Outcome brezis_lieb() {
  bool ok = true;
  std::string d;
  for (auto pr : {params(3, "2", "2", "4"), params(3, "1", "2", "4"), params(2, "1", "2", "4")}) {
    auto esc = brezis_lieb_preset("escaping-bump", pr);
    const double scale = esc.values.at("scale");
    bool nonneg = esc.values.at("min_delta") >= -1e-6 * scale;
    bool vanish = std::fabs(esc.values.at("last_delta")) <= 1e-3 * scale && esc.verdicts.at("tail_monotone");
    ok = ok && esc.passed() && nonneg && vanish;
    d += " escape(N=" + std::to_string(pr.n) + ",a=" + pr.alpha.str() + ") last/scale " +
         num(esc.values.at("last_delta") / scale, 2) + ";";
  }
  for (auto pr : {params(2, "1", "2", "4"), params(3, "2", "2", "4")}) {
    auto c = brezis_lieb_preset("cantor", pr);
    bool gap = c.values.at("liminf_delta") >= 1e-2 * c.values.at("scale");
    ok = ok && c.passed() && gap;
    d += " cantor(N=" + std::to_string(pr.n) + ") gap/scale " +
         num(c.values.at("liminf_delta") / c.values.at("scale"), 3) + ";";
  }
  d.pop_back();
  return {ok, d.substr(1)};
}

// ---------------------------------------------------------------- 10

Outcome norm_axioms() {
  auto g = RadialGrid::make(1e-2, 30.0, 300, 3);
  auto k = assemble_kernel(g, 1.5);
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  auto random_fn = [&]() {
    double c = 0.3 + 3 * U(rng), w = 0.2 + U(rng), a = U(rng), sgn = U(rng) < 0.3 ? -1.0 : 1.0;
    return RadialFunction::sample(g, [=](double r) {
      return a * sgn * std::exp(-std::pow((r - c) / w, 2)) + (1 - a) * std::exp(-r * r / (1 + c));
    });
  };
  int tri = 0, hom = 0, clark = 0;
  for (int t = 0; t < 1000; ++t) {
    auto u = random_fn(), v = random_fn();
    std::vector<double> s(u.values), df(u.values);
    for (int j = 0; j < g->m(); ++j) {
      s[j] += v.values[j];
      df[j] -= v.values[j];
    }
    RadialFunction sum(g, s), diff(g, df);
    const double p = 1 + 3 * U(rng);
    const double nu = q_norm(u, p, *k), nv = q_norm(v, p, *k);
    if (q_norm(sum, p, *k) > (nu + nv) * (1 + 1e-12)) ++tri;
    const double c = 0.2 + 4 * U(rng);
    if (rel(q_norm(scale(u, -c), p, *k), c * nu) > 1e-12) ++hom;
    // Clarkson: Q(u+v) + Q(u-v) <= 2 (Q(u)^{1/(2p-1)} + Q(v)^{1/(2p-1)})^{2p-1}, Q the Coulomb energy
    const double pc = 1.5 + 2.5 * U(rng);
    const double eu = coulomb_energy(u, pc, *k), ev = coulomb_energy(v, pc, *k), e = 1 / (2 * pc - 1);
    const double bound = 2 * std::pow(std::pow(eu, e) + std::pow(ev, e), 2 * pc - 1);
    if (coulomb_energy(sum, pc, *k) + coulomb_energy(diff, pc, *k) > bound * (1 + 1e-12)) ++clark;
  }
  return {tri == 0 && hom == 0 && clark == 0, "1000 pairs: triangle " + std::to_string(tri) + ", homogeneity " +
                                                  std::to_string(hom) + ", Clarkson " + std::to_string(clark) +
                                                  " violations"};
}

// ---------------------------------------------------------------- 11

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome determinism() {
  fs::path base = fs::temp_directory_path() / ("spslab_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(base);
  std::ostringstream sink;
  struct Job {
    std::vector<std::string> args;
    std::vector<std::string> files;
  };
  std::vector<Job> jobs{
      {{"solve", "--q", "4", "--m", "1024"}, {"result.json", "profile.csv"}},
      {{"family", "annular", "--q", "2.5", "--R", "4,8,...,256"}, {"family.json", "family.csv"}},
      {{"verify", "brezis-lieb", "--preset", "escaping-bump"}, {"verify.json", "verify.csv"}},
  };
  bool ok = true;
  int compared = 0;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    fs::path a = base / ("a" + std::to_string(i)), b = base / ("b" + std::to_string(i));
    auto args = jobs[i].args;
    args.insert(args.begin(), {"--out", a.string()});
    ok = ok && cli::run(args, sink, sink) == 0;
    // second run from the first run's manifest
    ok = ok && cli::run({"--out", b.string(), "replay", (a / "manifest.json").string()}, sink, sink) == 0;
    for (const auto& f : jobs[i].files) {
      ok = ok && fs::exists(a / f) && slurp(a / f) == slurp(b / f);
      ++compared;
    }
  }
  fs::remove_all(base);
  return {ok, std::to_string(compared) + " outputs of solve, family and verify replayed from manifests"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"exponent algebra", exponent_algebra},   {"kernel correctness", kernel_correctness},
      {"Coulomb energy oracle", coulomb_oracle}, {"dilation covariance", dilation_covariance},
      {"groundstate identities", groundstate_identities}, {"scaling law", scaling_law},
      {"eigenvalue bound", eigenvalue_bound},   {"counterexample rates", counterexample_rates},
      {"Brezis-Lieb", brezis_lieb},             {"norm axioms", norm_axioms},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::cout << "criterion " << std::setw(2) << i + 1 << " " << (o.pass ? "PASS" : "FAIL") << "  "
              << criteria[i].name << ": " << o.detail << " [" << num(secs, 3) << " s]" << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
