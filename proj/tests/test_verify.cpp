#include "doctest.h"

#include "spslab/energy.hpp"
#include "spslab/error.hpp"
#include "spslab/families.hpp"
#include "spslab/solver.hpp"
#include "spslab/verify.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

using namespace spslab;

namespace {

Params params(int n, const char* a, const char* p, const char* q) {
  Params pr;
  pr.n = n;
  pr.alpha = Number::parse(a);
  pr.p = Number::parse(p);
  pr.q = Number::parse(q);
  return pr;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::assertion;
}

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

KernelPtr kernel(double alpha, int m = 1024, int n = 3, double r_min = 1e-4, double r_max = 1e4) {
  static std::map<std::tuple<double, int, int, double, double>, KernelPtr> cache;
  auto key = std::tuple{alpha, m, n, r_min, r_max};
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto k = assemble_kernel(RadialGrid::make(r_min, r_max, m, n), alpha);
  cache.emplace(key, k);
  return k;
}

template <class F>
double kronrod(F&& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-13);
}

// random positive profile: a few Gaussian shells
RadialFunction random_profile(const GridPtr& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const int terms = 1 + static_cast<int>(3 * u01(rng));
  std::vector<std::array<double, 3>> t;
  for (int i = 0; i < terms; ++i) t.push_back({0.2 + 2 * u01(rng), 3 * u01(rng), 0.2 + 1.5 * u01(rng)});
  return RadialFunction::sample(g, [t](double r) {
    double v = 0.0;
    for (auto [a, c, w] : t) v += a * std::exp(-(r - c) * (r - c) / (w * w));
    return v;
  });
}

}  // namespace

TEST_CASE("ball-average integral matches a Gaussian oracle") {
  // f = e^{-r^2} in R^3: M(rho) = 4 pi (sqrt(pi)/4 erf(rho) - rho e^{-rho^2}/2)
  auto k = kernel(2.0, 2048, 3, 1e-4, 30.0);
  auto u = RadialFunction::sample(k->grid_ptr(), [](double r) { return std::exp(-r * r); });
  for (double alpha : {0.5, 1.0, 2.0, 2.7}) {
    auto avg = [alpha](double rho) {
      double m = 4 * M_PI * (std::sqrt(M_PI) / 4 * std::erf(rho) - rho * std::exp(-rho * rho) / 2);
      return m * m * std::pow(3 / (4 * M_PI), 2) * std::pow(rho, alpha - 4);
    };
    boost::math::quadrature::exp_sinh<double> tail;
    double exact = kronrod(avg, 0.0, 1.0) + tail.integrate([&](double t) { return avg(1.0 + t); });
    CHECK(rel(ball_average_integral(u, 1.0, alpha), exact) < 1e-4);
  }
}

TEST_CASE("average-estimate constant from the kernel lower bound") {
  for (int n : {2, 3, 4})
    for (double alpha : {0.5, 1.0, 1.5}) {
      const double beta = alpha / 2;
      const double a_half = std::tgamma((n - beta) / 2) / (std::tgamma(beta / 2) * std::pow(M_PI, n / 2.0) * std::pow(2.0, beta));
      const double ball = std::pow(M_PI, n / 2.0) / std::tgamma(n / 2.0 + 1);
      const double c = a_half * std::pow(2.0, beta - n) * ball;
      CHECK(rel(average_estimate_constant(n, alpha), std::log(2.0) / (c * c * ball * (1 - std::pow(2.0, -n)))) < 1e-13);
    }
}

TEST_CASE("average estimate: dilation invariant, bounded, trivial at zero") {
  auto k = kernel(2.0);
  const auto& g = k->grid_ptr();
  auto u = RadialFunction::sample(g, [](double r) { return std::exp(-r * r); });
  auto base = check_average_estimate(u, 2.0, *k);
  CHECK(base.passed());
  const double r0 = base.values.at("ratio");
  for (int s = -3; s <= 3; ++s) CHECK(rel(check_average_estimate(dilate(u, s), 2.0, *k).values.at("ratio"), r0) < 1e-4);
  for (int s : {-100, 100}) CHECK(rel(check_average_estimate(dilate(u, s), 2.0, *k).values.at("ratio"), r0) < 1e-4);

  std::mt19937_64 rng(5);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    auto rep = check_average_estimate(random_profile(g, rng), 1.0 + 2.0 * t / 50, *k);
    CHECK(rep.passed());
    worst = std::max(worst, rep.values.at("ratio"));
  }
  CHECK(worst < average_estimate_constant(3, 2.0));

  auto zero = check_average_estimate(RadialFunction::zeros(g), 2.0, *k);
  CHECK(zero.trivial);
  CHECK(zero.passed());
  CHECK(zero.values.at("lhs") == 0.0);
}

TEST_CASE("weighted log estimate and its weight norm") {
  for (double alpha : {1.0, 2.0}) {
    auto k = kernel(alpha);
    const double s = 3 - alpha;
    std::mt19937_64 rng(17);
    for (double gamma : {0.6, 0.75, 1.5}) {
      auto u = random_profile(k->grid_ptr(), rng);
      auto rep = check_weighted_log(u, 2.0, *k, gamma);
      CHECK(rep.passed());
      // rhs of the Cauchy-Schwarz step is |B_1| (Iw * ball average)^{1/2}
      const double ball = 4 * M_PI / 3;
      const auto& cs = rep.inequalities.at(0);
      const double iw = std::pow(cs.rhs / ball, 2) / rep.values.at("ball_average");
      // Iw = int_0^infty w^2 rho^{1+s}, w = -W', W = rho^{-s/2} (1 + |log rho|)^{-gamma}
      auto w2 = [&](double t) {
        double y = 1 + std::fabs(t);
        double dw = -s / 2 - (t > 0 ? gamma : -gamma) / y;
        return std::pow(y, -2 * gamma) * dw * dw;
      };
      boost::math::quadrature::exp_sinh<double> tail;
      double oracle = tail.integrate(w2) + tail.integrate([&](double t) { return w2(-t); });
      CHECK(rel(iw, oracle) < 1e-8);
    }
  }
  auto k = kernel(2.0);
  auto u = RadialFunction::sample(k->grid_ptr(), [](double r) { return std::exp(-r * r); });
  CHECK(kind_of([&] { check_weighted_log(u, 2.0, *k, 0.49); }) == ErrorKind::invalid_argument);
  CHECK(kind_of([&] { check_weighted_log(u, 2.0, *k, 0.5); }) == ErrorKind::invalid_argument);
  CHECK(check_weighted_log(RadialFunction::zeros(k->grid_ptr()), 2.0, *k, 0.75).trivial);
}

TEST_CASE("log weight on the log tail: gamma = 0.75 converges, gamma = 0.49 does not") {
  auto pr = params(3, "2", "2", "4");
  const std::vector<double> rs{1e2, 1e3, 1e4};
  auto above = weighted_log_sweep(pr, 0.75, 0.75, rs);
  auto below = weighted_log_sweep(pr, 0.49, 0.75, rs);
  CHECK(above.passed());
  CHECK(below.passed());
  CHECK(above.metadata["limit_finite"].get<bool>());
  CHECK_FALSE(below.metadata["limit_finite"].get<bool>());
  CHECK(above.verdicts.at("increments_shrink"));
  CHECK(below.verdicts.at("increments_grow"));
  for (const auto& r : above.rows) CHECK(r.at("weighted") < above.values.at("limit"));
  // heavier weight, larger integral at every truncation
  for (std::size_t i = 0; i < rs.size(); ++i) CHECK(below.rows[i].at("weighted") > above.rows[i].at("weighted"));
}

TEST_CASE("power weights: exterior and interior exponents") {
  auto k = kernel(2.0);
  auto u = RadialFunction::sample(k->grid_ptr(), [](double r) { return std::exp(-r * r); });
  const std::vector<double> rs{0.5, 1, 2, 4, 8};
  auto ext = check_power_exterior(u, 1.0, *k, 1.0, rs);
  CHECK(ext.check == "power_exterior");
  CHECK(ext.passed());
  CHECK(ext.values.at("exponent_predicted") == -0.5);
  CHECK(std::fabs(ext.values.at("exponent_fitted") + 0.5) < 0.025);
  // int_{|x| > R} e^{-r^2} / |x| dx = 2 pi e^{-R^2}
  CHECK(rel(ext.rows[1].at("lhs"), 2 * M_PI * std::exp(-1.0)) < 1e-3);

  auto in = check_power_exterior(u, 1.0, *k, 0.25, rs);
  CHECK(in.check == "power_interior");
  CHECK(in.passed());
  CHECK(std::fabs(in.values.at("exponent_fitted") - 0.25) < 0.0125);
  // int_{|x| < R} e^{-r^2} |x|^{-1/4} dx, radial oracle
  double oracle = 4 * M_PI * kronrod([](double r) { return std::exp(-r * r) * std::pow(r, 1.75); }, 0.0, 2.0);
  CHECK(rel(in.rows[2].at("lhs"), oracle) < 1e-3);

  CHECK(kind_of([&] { check_power_exterior(u, 1.0, *k, 0.5, rs); }) == ErrorKind::invalid_argument);
  CHECK(kind_of([&] { check_power_exterior(u, 1.0, *k, -0.5, rs); }) == ErrorKind::invalid_argument);
  CHECK(check_power_exterior(RadialFunction::zeros(k->grid_ptr()), 1.0, *k, 1.0, rs).trivial);
}

TEST_CASE("radial decay on groundstates and along the annular family") {
  auto pr = params(3, "2", "2", "4");
  auto k = kernel(2.0);
  auto gs = minimize(pr, k);
  REQUIRE(gs.converged);
  auto rep = check_radial_decay(gs.u, pr, *k, true);
  CHECK(rep.passed());
  CHECK(rep.verdicts.at("sup_interior"));
  CHECK(rep.rows.front().at("theta") == doctest::Approx(0.5));
  CHECK(rep.rows.front().at("beta") == doctest::Approx(7.0 / 8));
  CHECK(rep.rows.back().at("beta") == doctest::Approx(0.5));

  // the endpoint exponent 7/8 is exactly the annular height, so the ratio stays O(1)
  std::vector<double> ratios;
  for (int e = 4; e <= 10; e += 2) {
    auto a = annular_member(params(3, "2", "2", "18/7"), std::pow(2.0, e), 512);
    auto ka = assemble_kernel(a.grid, 2.0);
    ratios.push_back(check_radial_decay(a, pr, *ka).rows.front().at("ratio"));
  }
  auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  CHECK(*hi / *lo < 1.5);
}

TEST_CASE("interpolation quotient: positive, dilation invariant at q_cs, minimized by the solver") {
  auto k = kernel(2.0);
  const auto& g = k->grid_ptr();
  auto gauss = RadialFunction::sample(g, [](double r) { return std::exp(-r * r); });
  auto rep = check_interpolation(gauss, params(3, "2", "2", "4"), *k);
  CHECK(rep.passed());
  CHECK(rep.values.at("quotient") > 0.0);

  // vanishing at both ends of the grid, so a shift loses nothing
  auto shell = RadialFunction::sample(g, [](double r) { return r * r * std::exp(-r * r); });
  auto cs = params(3, "2", "2", "3");
  const double r0 = check_interpolation(shell, cs, *k).values.at("quotient");
  for (int s : {-50, -7, 7, 50}) CHECK(rel(check_interpolation(dilate(shell, s), cs, *k).values.at("quotient"), r0) < 1e-6);

  CHECK(kind_of([&] { check_interpolation(RadialFunction::zeros(g), params(3, "2", "2", "4"), *k); }) ==
        ErrorKind::invalid_argument);
  // (Q) fails at q = 7 > 2N/(N-2)
  CHECK(kind_of([&] { check_interpolation(gauss, params(3, "2", "2", "7"), *k); }) == ErrorKind::invalid_argument);

  auto pr = params(3, "2", "2", "4");
  auto gs = minimize(pr, k);
  REQUIRE(gs.converged);
  RunningMinimum running;
  std::mt19937_64 rng(23);
  for (int t = 0; t < 200; ++t) check_interpolation(random_profile(g, rng), pr, *k, &running);
  const double suite_min = running.value();
  auto best = check_interpolation(gs.u, pr, *k, &running);
  CHECK(best.values.at("quotient") < suite_min);
  CHECK(running.value() == best.values.at("quotient"));
  CHECK(running.label() == "200");
  CHECK(running.count() == 201);
}

TEST_CASE("Brezis-Lieb: escaping bump matches the shell theorem") {
  auto rep = brezis_lieb_preset("escaping-bump", params(3, "2", "2", "4"), 2048);
  CHECK(rep.passed());
  // N = 3, alpha = 2: disjoint radial densities interact as point masses, M_u M_b / (4 pi L)
  auto mass = [](double radius) {
    return 4 * M_PI * kronrod([=](double r) { return std::pow(poly_bump(r, radius), 2) * r * r; }, 0.0, radius);
  };
  const double mu = mass(1.0), mb = mass(0.5);
  for (const auto& r : rep.rows) CHECK(rel(r.at("delta"), 2 * mu * mb / (4 * M_PI * r.at("parameter"))) < 1e-4);
  for (auto pr : {params(3, "1", "2", "4"), params(2, "1", "1.5", "3")})
    CHECK(brezis_lieb_preset("escaping-bump", pr).passed());
}

TEST_CASE("Brezis-Lieb: strong convergence and the Cantor gap") {
  for (auto pr : {params(3, "2", "2", "4"), params(3, "1", "1.5", "3"), params(2, "1", "2", "4")})
    CHECK(brezis_lieb_preset("strong", pr).passed());
  auto cantor = brezis_lieb_preset("cantor", params(2, "1", "2", "4"));
  CHECK(cantor.passed());
  CHECK(cantor.values.at("liminf_delta") >= 1e-2 * cantor.values.at("scale"));
  CHECK(cantor.metadata["support_measure_vanishes"].get<bool>());
  CHECK(kind_of([] { brezis_lieb_preset("spiral", params(3, "2", "2", "4")); }) == ErrorKind::invalid_argument);
}

TEST_CASE("Brezis-Lieb on radial sequences") {
  auto k = kernel(1.5, 512, 3, 1e-3, 50.0);
  const auto& g = k->grid_ptr();
  std::mt19937_64 rng(3);
  auto u = random_profile(g, rng);
  // nonnegative perturbations: |u + v|^p >= |u|^p + |v|^p for p >= 1
  std::vector<RadialFunction> un;
  for (int i = 0; i < 9; ++i) {
    auto v = random_profile(g, rng);
    for (int j = 0; j < g->m(); ++j) v.values[j] = u.values[j] + v.values[j] / (i + 1);
    un.push_back(v);
  }
  auto rep = check_brezis_lieb(un, u, 2.0, *k, BrezisLiebExpect::inequality);
  CHECK(rep.passed());
  CHECK(rep.values.at("min_delta") > 0.0);
  auto other = RadialFunction::zeros(RadialGrid::make(1e-3, 50.0, 256, 3));
  CHECK(kind_of([&] { check_brezis_lieb({other, other, other}, u, 2.0, *k, BrezisLiebExpect::inequality); }) ==
        ErrorKind::invalid_argument);
  CHECK(kind_of([&] { check_brezis_lieb({u, u}, u, 2.0, *k, BrezisLiebExpect::inequality); }) ==
        ErrorKind::invalid_argument);
  // a negative Delta over the tail fails the liminf
  std::vector<BrezisLiebTerms> bad{{1, 1.0, 0.5, 0.5}, {2, 1.0, 0.5, 0.5}, {3, 1.0, 0.6, 0.5}};
  auto fail_rep = assess_brezis_lieb(bad, BrezisLiebExpect::inequality);
  CHECK_FALSE(fail_rep.passed());
}

TEST_CASE("reports serialize; summary has one row per check; runs are deterministic") {
  auto k = kernel(2.0);
  auto u = RadialFunction::sample(k->grid_ptr(), [](double r) { return std::exp(-r * r); });
  std::vector<VerifyReport> reps{check_average_estimate(u, 2.0, *k), check_weighted_log(u, 2.0, *k, 0.75),
                                 brezis_lieb_preset("escaping-bump", params(3, "2", "2", "4"))};
  auto csv = summary_csv(reps);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  CHECK(csv.find("average_estimate,1,0,1,average_estimate,") != std::string::npos);
  auto j = reps[1].to_json();
  CHECK(j["inequalities"][1]["name"] == "weighted_vs_coulomb");
  CHECK(j["inequalities"][1]["holds"] == true);
  CHECK(j["inequalities"][1]["margin"].get<double>() > 0.0);
  CHECK(brezis_lieb_preset("cantor", params(2, "1", "2", "4")).to_json().dump() ==
        brezis_lieb_preset("cantor", params(2, "1", "2", "4")).to_json().dump());
}
