#include "doctest.h"

#include "spslab/error.hpp"
#include "spslab/regime.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace spslab;

namespace {

Params P(int n, const char* a, const char* p, const char* q) {
  return Params{n, Number::parse(a), Number::parse(p), Number::parse(q)};
}

// Second implementation of the displayed inequality systems, written straight
// from the conditions with nothing shared with src/regime.cpp.
struct Flags {
  bool q, q0, qrad, qrad0, qrad3, p;
};

Flags oracle_flags(int n, const Rational& a, const Rational& p, const Rational& q) {
  const Rational N(n);
  const Rational inv_p = 1 / p, inv_q = 1 / q;
  const Rational thr = Rational(n > 2 ? n - 2 : 0) / (N + a);
  const Rational lo = Rational(1, 2) - 1 / N;
  const Rational up = Rational(1, 2) - (p - 1) / (a + 2 * p);
  const Rational rd = Rational(3 * n - 4) + a;
  const Rational rn = 2 * (2 * p * (N - 1) + N - a);
  const Rational pr = 1 / (2 * p) + a / (2 * N * p);

  Flags f{};
  f.q = (inv_p >= thr && lo <= inv_q && inv_q <= up) || (inv_p < thr && lo >= inv_q && inv_q >= up);
  f.q0 = (inv_p > thr && lo < inv_q && inv_q < up) || (inv_p < thr && lo > inv_q && inv_q > up);
  const Rational rad = rd / rn;
  f.qrad = (inv_p >= thr && lo <= inv_q && inv_q < rad) || (inv_p <= thr && lo >= inv_q && inv_q > rad);
  f.qrad0 = (inv_p > thr && lo < inv_q && inv_q < rad) || (inv_p < thr && lo > inv_q && inv_q > rad);
  f.qrad3 = (inv_p > thr && up < inv_q && inv_q < rad) || (inv_p < thr && up > inv_q && inv_q > rad);
  f.p = (inv_p > thr && !(lo < inv_q && inv_q < pr)) || (inv_p < thr && !(pr < inv_q && inv_q < lo));
  return f;
}

Rational random_rational(std::mt19937_64& rng, int num_lo, int num_hi, int den_hi) {
  std::uniform_int_distribution<int> num(num_lo, num_hi), den(1, den_hi);
  return Rational(num(rng), den(rng));
}

}  // namespace

TEST_CASE("theta at the named exponents") {
  CHECK(*theta_exact(P(3, "2", "2", "6")) == Rational(1));
  CHECK(*theta_exact(P(3, "2", "2", "3")) == Rational(1, 3));
  CHECK(*theta_exact(P(3, "2", "2", "4")) == Rational(2, 3));
  CHECK(theta_of(P(3, "2", "2", "4")) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("theta errors") {
  try {
    theta_of(P(1, "0.5", "2", "4"));
    FAIL("expected one-dimensional error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::one_dimensional);
  }
  try {
    theta_of(P(3, "1", "4", "6"));  // p(N-2) = N + alpha
    FAIL("expected double-critical error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::double_critical);
  }
}

TEST_CASE("critical exponents at (3,2,2)") {
  auto e = critical_exponents(P(3, "2", "2", "4"));
  CHECK(*e.q_cs_exact == Rational(3));
  CHECK(*e.q_rad_exact == Rational(18, 7));
  CHECK(*e.q_sobolev_exact == Rational(6));
  CHECK_FALSE(e.q_sobolev.infinite);
  CHECK(e.q_sobolev.value == 6.0);
  auto e2 = critical_exponents(P(2, "1.5", "2", "4"));
  CHECK(e2.q_sobolev.infinite);
}

TEST_CASE("classification examples") {
  auto r = classify(P(3, "2", "2", "2.8"));
  CHECK(r.qrad0);
  CHECK_FALSE(r.q0);
  CHECK(r.classification == Regime::existence_radial_only);

  r = classify(P(3, "2", "2", "7"));
  CHECK(r.p);
  CHECK(r.classification == Regime::nonexistence);

  r = classify(P(3, "2", "2", "3"));
  CHECK(r.classification == Regime::eigenvalue_critical);

  r = classify(P(3, "2", "2", "4"));
  CHECK(r.classification == Regime::existence_general);
  CHECK(r.exact);
}

TEST_CASE("alpha = 1 radial endpoint is annotated, not decided") {
  // q = (2/3)(2p+1) with p = 2
  auto r = classify(P(3, "1", "2", "10/3"));
  CHECK(r.classification == Regime::critical_endpoint);
  CHECK(r.annotation.find("open") != std::string::npos);
}

TEST_CASE("sigma and the scaling exponent") {
  auto p = P(3, "2", "2", "3");
  CHECK(2.0 * sigma_of(p) / 3.0 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(sigma_of(P(3, "2", "2", "4")) == doctest::Approx(6.0 / 5.0).epsilon(1e-15));
  CHECK(sigma_of(P(3, "2", "2", "6")) == doctest::Approx(1.0).epsilon(1e-15));
  // q_cs with p(N-2) = N + alpha: numerator and denominator both vanish
  CHECK_THROWS_AS(sigma_of(P(3, "1", "4", "6")), Error);
}

TEST_CASE("theta identity residual over random parameters") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  int checked = 0;
  for (int k = 0; k < 5000; ++k) {
    int n = 2 + static_cast<int>(U(rng) * 5);
    double a = 0.05 + U(rng) * (n - 0.1);
    double p = 1.0 + 4.0 * U(rng);
    double q = 1.0 + 9.0 * U(rng);
    Params pr{n, a, p, q};
    if (std::fabs((n + a) - p * (n - 2)) < 1e-3) continue;
    double th = theta_of(pr);
    double rhs = th * (0.5 - 1.0 / n) + (1.0 - th) * (n + a) / (2.0 * n * p);
    CHECK(std::fabs(1.0 / q - rhs) <= 1e-14 * std::max(1.0, std::fabs(th)));
    ++checked;
  }
  CHECK(checked > 4000);
}

TEST_CASE("theta is exactly 1 at Sobolev and alpha/(2p+alpha) at Coulomb-Sobolev") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 300; ++k) {
    int n = 3 + static_cast<int>(rng() % 4);
    Rational a = random_rational(rng, 1, 4 * (n - 1), 4);
    if (a >= n) continue;
    Rational p = 1 + random_rational(rng, 1, 12, 5);
    if (p * (n - 2) == a + n) continue;
    Rational qs(2 * n, n - 2);
    Rational qc = 2 * (2 * p + a) / (2 + a);
    Params ps{n, Number::exact(a), Number::exact(p), Number::exact(qs)};
    Params pc{n, Number::exact(a), Number::exact(p), Number::exact(qc)};
    CHECK(*theta_exact(ps) == Rational(1));
    CHECK(*theta_exact(pc) == a / (2 * p + a));
  }
}

TEST_CASE("theta decreases in 1/q when p(N-2) < N+alpha") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    int n = 2 + static_cast<int>(U(rng) * 4);
    double a = 0.1 + U(rng) * (n - 0.2);
    double p = 1.0 + U(rng) * 3.0;
    if (!(p * (n - 2) < n + a)) continue;
    double prev = std::numeric_limits<double>::infinity();
    for (int j = 1; j <= 40; ++j) {
      double iq = 0.02 * j;
      double th = theta_of(Params{n, a, p, 1.0 / iq});
      CHECK(th < prev);
      prev = th;
    }
  }
}

TEST_CASE("flags agree with an independent evaluation on 10^4 rational points") {
  std::mt19937_64 rng(2024);
  int mismatches = 0, radial_only = 0, boundary_hits = 0;
  for (int k = 0; k < 10000; ++k) {
    int n = 1 + static_cast<int>(rng() % 5);
    Rational a = random_rational(rng, 1, 6 * n - 1, 6);
    if (a >= n) a = Rational(n) * Rational(1, 2);
    Rational p = 1 + random_rational(rng, 0, 12, 4);
    // Bias q toward the paper's thresholds so boundaries are exercised.
    Rational q;
    switch (rng() % 4) {
      case 0: q = 2 * (2 * p + a) / (2 + a); ++boundary_hits; break;
      case 1:
        q = 2 * (2 * p * (n - 1) + n - a) / (Rational(3 * n - 4) + a);
        ++boundary_hits;
        break;
      default: q = 1 + random_rational(rng, 0, 40, 5); break;
    }
    if (q < 1) q = 1;
    Params pr{n, Number::exact(a), Number::exact(p), Number::exact(q)};
    auto rep = classify(pr);
    Flags f = oracle_flags(n, a, p, q);
    const bool rad_ok = Rational(3 * n - 4) + a != 0;
    bool same = rep.q == f.q && rep.q0 == f.q0 && rep.p == f.p;
    if (rad_ok) same = same && rep.qrad == f.qrad && rep.qrad0 == f.qrad0 && rep.qrad3 == f.qrad3;
    if (!same) ++mismatches;

    // invariants of the report type
    if (rep.q0) CHECK(rep.q);
    if (a > 1 && rep.qrad0) CHECK(rep.qrad);
    CHECK_FALSE((rep.p && rep.q0));

    const bool at_cs = q * (2 + a) == 2 * (2 * p + a);
    const bool dc = n >= 3 && p * (n - 2) == a + n;
    if (!dc && !(p > 1 && rep.p)) {
      if (a > 1 && at_cs && rep.qrad0) {
        CHECK(rep.classification == Regime::eigenvalue_critical);
      } else if (rep.qrad0 && !rep.q0 && a > 1) {
        CHECK(rep.classification == Regime::existence_radial_only);
      }
    }
    if (rep.classification == Regime::existence_radial_only) {
      ++radial_only;
      CHECK(a > 1);
      CHECK(rep.qrad0);
      CHECK_FALSE(rep.q0);
    }
    if (rep.classification == Regime::eigenvalue_critical) {
      CHECK(at_cs);
      CHECK(a > 1);
      CHECK(rep.qrad0);
    }
    // Radial-only existence outside q_cs needs alpha > 1.
    if (rep.qrad0 && !rep.q0 && !at_cs && !dc) CHECK(a > 1);
  }
  CHECK(mismatches == 0);
  CHECK(radial_only > 10);
  CHECK(boundary_hits > 2000);
}

TEST_CASE("C_* matches a brute-force minimization over dilations") {
  // Under u_l = l^{-N/q} u(x/l): D -> l^a D, V -> l^b V, L unchanged.
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  int tested = 0;
  while (tested < 40) {
    int n = 2 + static_cast<int>(U(rng) * 3);
    double al = 0.2 + U(rng) * (n - 0.4);
    double p = 1.1 + 2.5 * U(rng);
    double q = 1.0 + 8.0 * U(rng);
    Params pr{n, al, p, q};
    if (!classify(pr).q0) continue;
    double D = 0.1 + 5 * U(rng), V = 0.1 + 5 * U(rng), Lq = 0.1 + 3 * U(rng);
    double a = n - 2 - 2.0 * n / q, b = n + al - 2.0 * p * n / q;
    auto E = [&](double t) {
      return 0.5 * std::exp(a * t) * D + std::exp(b * t) * V / (2.0 * p);
    };
    // golden section on t = log lambda
    double lo = -60, hi = 60;
    const double g = (std::sqrt(5.0) - 1) / 2;
    for (int it = 0; it < 300; ++it) {
      double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
      if (E(x1) < E(x2)) hi = x2; else lo = x1;
    }
    double brute = E(0.5 * (lo + hi));
    double th = theta_of(pr), sg = sigma_of(pr);
    double R = std::pow(D, th / 2) * std::pow(V, (1 - th) / (2 * p)) / std::pow(Lq, 1.0 / q);
    double predicted = c_star_of(pr) * std::pow(std::pow(Lq, 1.0 / q) * R, 2 * sg);
    CHECK(predicted == doctest::Approx(brute).epsilon(1e-9));
    ++tested;
  }
}

TEST_CASE("number parsing keeps rationals exact") {
  CHECK(Number::parse("0.1").rational() == Rational(1, 10));
  CHECK(Number::parse("18/7").rational() == Rational(18, 7));
  CHECK(Number::parse("2.5e-1").rational() == Rational(1, 4));
  CHECK_FALSE(Number(0.1).is_exact());
  CHECK_THROWS_AS(Number::parse("abc"), Error);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(P(3, "3", "2", "4").validate(), Error);
  CHECK_THROWS_AS(P(3, "0", "2", "4").validate(), Error);
  CHECK_THROWS_AS(P(3, "1", "0.5", "4").validate(), Error);
  CHECK_THROWS_AS(P(3, "1", "2", "0.5").validate(), Error);
  CHECK_NOTHROW(P(3, "1", "1", "1").validate());
}
