#include "spslab/regime.hpp"

#include "spslab/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace spslab {

namespace mp = boost::multiprecision;

Number::Number(int v) : value_(v), exact_(Rational(v)) {}

Number::Number(double v) : value_(v) {}

Number Number::exact(const Rational& r) {
  Number out;
  out.exact_ = r;
  out.value_ = to_double(r);
  return out;
}

const Rational& Number::rational() const {
  require(exact_.has_value(), ErrorKind::invalid_argument, "number is not exact");
  return *exact_;
}

std::string Number::str() const {
  if (exact_) {
    const Rational& r = *exact_;
    if (mp::denominator(r) == 1) return mp::numerator(r).str();
    // Prefer a short decimal when the denominator is 2^a 5^b.
    mp::cpp_int d = mp::denominator(r);
    int twos = 0, fives = 0;
    while (d % 2 == 0) { d /= 2; ++twos; }
    while (d % 5 == 0) { d /= 5; ++fives; }
    if (d == 1) {
      int digits = std::max(twos, fives);
      mp::cpp_int scale = mp::pow(mp::cpp_int(10), digits);
      mp::cpp_int scaled = mp::numerator(r) * scale / mp::denominator(r);
      bool neg = scaled < 0;
      std::string s = (neg ? -scaled : scaled).str();
      while (static_cast<int>(s.size()) <= digits) s.insert(s.begin(), '0');
      s.insert(s.end() - digits, '.');
      return neg ? "-" + s : s;
    }
    return to_string(r);
  }
  std::ostringstream os;
  os.precision(17);
  os << value_;
  return os.str();
}

Number Number::parse(std::string_view text) {
  std::string s(text);
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }),
          s.end());
  auto bad = [&]() -> Number {
    fail(ErrorKind::invalid_argument, "cannot parse number '" + std::string(text) + "'");
  };
  if (s.empty()) return bad();

  auto slash = s.find('/');
  if (slash != std::string::npos) {
    Number a = parse(s.substr(0, slash));
    Number b = parse(s.substr(slash + 1));
    if (!a.is_exact() || !b.is_exact() || b.rational() == 0) return bad();
    return exact(a.rational() / b.rational());
  }

  std::size_t i = 0;
  bool neg = false;
  if (s[i] == '+' || s[i] == '-') neg = s[i++] == '-';
  mp::cpp_int mant = 0;
  int frac_digits = 0;
  bool any = false;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
    mant = mant * 10 + (s[i++] - '0');
    any = true;
  }
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      mant = mant * 10 + (s[i++] - '0');
      ++frac_digits;
      any = true;
    }
  }
  if (!any) return bad();
  long exp10 = 0;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    bool eneg = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) eneg = s[i++] == '-';
    bool edig = false;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      exp10 = exp10 * 10 + (s[i++] - '0');
      edig = true;
      if (exp10 > 400) return bad();
    }
    if (!edig) return bad();
    if (eneg) exp10 = -exp10;
  }
  if (i != s.size()) return bad();
  exp10 -= frac_digits;
  Rational r(mant);
  if (exp10 > 0) r *= Rational(mp::pow(mp::cpp_int(10), static_cast<unsigned>(exp10)));
  if (exp10 < 0) r /= Rational(mp::pow(mp::cpp_int(10), static_cast<unsigned>(-exp10)));
  if (neg) r = -r;
  return exact(r);
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

std::string to_string(const Rational& r) {
  if (mp::denominator(r) == 1) return mp::numerator(r).str();
  return mp::numerator(r).str() + "/" + mp::denominator(r).str();
}

void Params::validate() const {
  require(n >= 1, ErrorKind::invalid_argument, "dimension n must be a positive integer");
  require(alpha.value() > 0.0, ErrorKind::invalid_argument, "invariant 0 < alpha violated");
  require(alpha.value() < n, ErrorKind::invalid_argument, "invariant alpha < n violated");
  require(p.value() >= 1.0, ErrorKind::invalid_argument, "invariant p >= 1 violated");
  require(q.value() >= 1.0, ErrorKind::invalid_argument, "invariant q >= 1 violated");
  require(std::isfinite(alpha.value()) && std::isfinite(p.value()) && std::isfinite(q.value()),
          ErrorKind::invalid_argument, "parameters must be finite");
}

Params Params::with_q(Number new_q) const {
  Params out = *this;
  out.q = new_q;
  return out;
}

std::string Params::str() const {
  return "(N=" + std::to_string(n) + ", alpha=" + alpha.str() + ", p=" + p.str() +
         ", q=" + q.str() + ")";
}

const char* to_string(Regime r) {
  switch (r) {
    case Regime::no_embedding: return "NO_EMBEDDING";
    case Regime::critical_endpoint: return "CRITICAL_ENDPOINT";
    case Regime::existence_general: return "EXISTENCE_GENERAL";
    case Regime::existence_radial_only: return "EXISTENCE_RADIAL_ONLY";
    case Regime::eigenvalue_critical: return "EIGENVALUE_CRITICAL";
    case Regime::nonexistence: return "NONEXISTENCE";
    case Regime::double_critical_open: return "DOUBLE_CRITICAL_OPEN";
  }
  return "?";
}

namespace {

// Three-way comparison: exact for rationals, tolerant for doubles.
int cmp(const Rational& a, const Rational& b) { return a < b ? -1 : (b < a ? 1 : 0); }

int cmp(double a, double b) {
  double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
  if (std::fabs(a - b) <= kBoundaryTol * scale) return 0;
  return a < b ? -1 : 1;
}

template <class T>
struct Sym {
  T n, alpha, p, q;
  T ip, iq;
  T np;    // (N-2)_+ / (N+alpha)
  T sob;   // 1/2 - 1/N
  T cs;    // 1/2 - (p-1)/(alpha+2p)
  T rad;   // (3N+alpha-4) / (2(2p(N-1)+N-alpha))
  T hls;   // 1/(2p) + alpha/(2Np)
  bool rad_defined;
};

template <class T>
Sym<T> make_sym(int n, const T& alpha, const T& p, const T& q) {
  Sym<T> s;
  s.n = T(n);
  s.alpha = alpha;
  s.p = p;
  s.q = q;
  s.ip = T(1) / p;
  s.iq = T(1) / q;
  T nm2 = T(std::max(n - 2, 0));
  s.np = nm2 / (s.n + alpha);
  s.sob = T(1) / T(2) - T(1) / s.n;
  s.cs = T(1) / T(2) - (p - T(1)) / (alpha + T(2) * p);
  T den = T(2) * (T(2) * p * (s.n - T(1)) + s.n - alpha);
  s.rad_defined = cmp(den, T(0)) != 0;
  s.rad = s.rad_defined ? (T(3) * s.n + alpha - T(4)) / den : T(0);
  s.hls = T(1) / (T(2) * p) + alpha / (T(2) * s.n * p);
  return s;
}

template <class T>
RegimeReport classify_impl(const Sym<T>& s, int n) {
  RegimeReport rep;
  const int branch = cmp(s.ip, s.np);  // +1 first branch, -1 second, 0 boundary
  auto lt = [](const T& a, const T& b) { return cmp(a, b) < 0; };
  auto le = [](const T& a, const T& b) { return cmp(a, b) <= 0; };

  // (Q)
  if (branch >= 0)
    rep.q = le(s.sob, s.iq) && le(s.iq, s.cs);
  else
    rep.q = le(s.iq, s.sob) && le(s.cs, s.iq);
  // (Q')
  if (branch > 0)
    rep.q0 = lt(s.sob, s.iq) && lt(s.iq, s.cs);
  else if (branch < 0)
    rep.q0 = lt(s.iq, s.sob) && lt(s.cs, s.iq);
  if (s.rad_defined) {
    // (Q_rad): both branches admit the boundary value of 1/p.
    bool first = branch >= 0 && le(s.sob, s.iq) && lt(s.iq, s.rad);
    bool second = branch <= 0 && le(s.iq, s.sob) && lt(s.rad, s.iq);
    rep.qrad = first || second;
    if (branch > 0)
      rep.qrad0 = lt(s.sob, s.iq) && lt(s.iq, s.rad);
    else if (branch < 0)
      rep.qrad0 = lt(s.iq, s.sob) && lt(s.rad, s.iq);
    if (branch > 0)
      rep.qrad3 = lt(s.cs, s.iq) && lt(s.iq, s.rad);
    else if (branch < 0)
      rep.qrad3 = lt(s.iq, s.cs) && lt(s.rad, s.iq);
  }
  // (P): 1/q outside an open interval.
  if (branch > 0)
    rep.p = !(lt(s.sob, s.iq) && lt(s.iq, s.hls));
  else if (branch < 0)
    rep.p = !(lt(s.hls, s.iq) && lt(s.iq, s.sob));

  const bool alpha_gt1 = cmp(s.alpha, T(1)) > 0;
  const bool alpha_eq1 = cmp(s.alpha, T(1)) == 0;
  const bool p_gt1 = cmp(s.p, T(1)) > 0;
  const bool at_cs = cmp(s.iq, s.cs) == 0;
  const bool double_critical = n >= 3 && cmp(s.p * (s.n - T(2)), s.n + s.alpha) == 0;

  if (double_critical) {
    if (cmp(s.iq, s.sob) == 0) {
      rep.classification = Regime::double_critical_open;
      rep.annotation = "p(N-2) = N+alpha at the Sobolev exponent; existence left open";
    } else {
      rep.classification = Regime::no_embedding;
      rep.annotation = "p(N-2) = N+alpha: the admissible interval degenerates to q = 2N/(N-2)";
    }
    return rep;
  }
  if (p_gt1 && rep.p) {
    rep.classification = Regime::nonexistence;
    return rep;
  }
  if (alpha_gt1 && at_cs && rep.qrad0) {
    rep.classification = Regime::eigenvalue_critical;
    rep.annotation = "Lagrange multiplier cannot be scaled out";
    return rep;
  }
  if (rep.q0) {
    rep.classification = Regime::existence_general;
    return rep;
  }
  if (alpha_gt1 && rep.qrad0) {
    rep.classification = Regime::existence_radial_only;
    return rep;
  }
  if (rep.q || (alpha_gt1 && rep.qrad)) {
    rep.classification = Regime::critical_endpoint;
    if (alpha_eq1 && at_cs && n >= 2)
      rep.annotation = "alpha = 1 radial endpoint: compactness of the embedding is open";
    else if (at_cs)
      rep.annotation = "Coulomb-Sobolev critical endpoint";
    else
      rep.annotation = "Sobolev critical endpoint";
    return rep;
  }
  rep.classification = Regime::no_embedding;
  return rep;
}

template <class T>
T theta_generic(int n, const T& alpha, const T& p, const T& q) {
  T N(n);
  return (N + alpha - T(2) * p * N / q) / ((N + alpha) - p * (N - T(2)));
}

void check_theta_domain(const Params& params) {
  params.validate();
  if (params.n == 1)
    fail(ErrorKind::one_dimensional, "theta: N = 1 is the one-dimensional regime");
  if (is_double_critical(params))
    fail(ErrorKind::double_critical, "theta: (N+alpha) = p(N-2), double-critical case");
}

}  // namespace

bool is_double_critical(const Params& params) {
  if (params.n < 3) return false;
  if (params.exact()) {
    return params.p.rational() * (params.n - 2) == params.alpha.rational() + params.n;
  }
  return cmp(params.p.value() * (params.n - 2), params.n + params.alpha.value()) == 0;
}

double q_cs_of(const Params& params) {
  double a = params.alpha.value(), p = params.p.value();
  return 2.0 * (2.0 * p + a) / (2.0 + a);
}

bool is_cs_critical(const Params& params) {
  if (params.exact()) {
    const Rational& a = params.alpha.rational();
    const Rational& p = params.p.rational();
    return params.q.rational() * (2 + a) == 2 * (2 * p + a);
  }
  return cmp(1.0 / params.q.value(), 1.0 / q_cs_of(params)) == 0;
}

std::optional<Rational> theta_exact(const Params& params) {
  check_theta_domain(params);
  if (!params.exact()) return std::nullopt;
  return theta_generic<Rational>(params.n, params.alpha.rational(), params.p.rational(),
                                 params.q.rational());
}

double theta_of(const Params& params) {
  check_theta_domain(params);
  if (params.exact()) return to_double(*theta_exact(params));
  return theta_generic<double>(params.n, params.alpha.value(), params.p.value(),
                               params.q.value());
}

double sigma_of(const Params& params) {
  params.validate();
  double N = params.n, a = params.alpha.value(), p = params.p.value(), q = params.q.value();
  double num = (N + a) - p * (N - 2.0);
  double den = (a + 2.0) - (2.0 * N / q) * (p - 1.0);
  if (params.exact()) {
    const Rational& ra = params.alpha.rational();
    const Rational& rp = params.p.rational();
    const Rational& rq = params.q.rational();
    Rational rden = (ra + 2) - (Rational(2 * params.n) / rq) * (rp - 1);
    Rational rnum = (Rational(params.n) + ra) - rp * (params.n - 2);
    if (rden == 0) fail(ErrorKind::singular, "sigma: denominator (alpha+2) - (2N/q)(p-1) vanishes");
    if (rnum == 0) fail(ErrorKind::double_critical, "sigma: numerator vanishes (double-critical)");
    return to_double(rnum / rden);
  }
  if (cmp(den, 0.0) == 0)
    fail(ErrorKind::singular, "sigma: denominator (alpha+2) - (2N/q)(p-1) vanishes");
  if (cmp(num, 0.0) == 0)
    fail(ErrorKind::double_critical, "sigma: numerator vanishes (double-critical)");
  return num / den;
}

double c_star_of(const Params& params) {
  double theta = theta_of(params);
  double sigma = sigma_of(params);
  double p = params.p.value();
  if (!(theta > 0.0))
    fail(ErrorKind::singular, "C_*: theta must be positive");
  double x = (1.0 - theta) / (p * theta);
  double bracket = std::pow(x, sigma * theta) + std::pow(x, -sigma * (1.0 - theta) / p);
  if (theta >= 1.0) bracket = 1.0;  // the second power is x^0 = 1, the first vanishes
  double base = 1.0 / (std::pow(2.0, theta) * std::pow(2.0 * p, (1.0 - theta) / p));
  return bracket * std::pow(base, sigma);
}

double decay_theta_min(const Params& params) {
  double p = params.p.value(), a = params.alpha.value();
  return 1.0 / (1.0 + p / (1.0 + std::min(1.0, a)));
}

double decay_beta(const Params& params, double theta) {
  double N = params.n, a = params.alpha.value(), p = params.p.value();
  return theta * (N - 2.0) / 2.0 + (1.0 - theta) * (N + a) / (2.0 * p);
}

Exponents critical_exponents(const Params& params) {
  params.validate();
  Exponents e;
  const int n = params.n;
  const double N = n, a = params.alpha.value(), p = params.p.value();
  if (n >= 3) {
    e.q_sobolev = ExtendedReal::finite(2.0 * N / (N - 2.0));
  } else {
    e.q_sobolev = ExtendedReal::infinity();
  }
  e.q_cs = 2.0 * (2.0 * p + a) / (2.0 + a);
  double rad_den = 3.0 * N + a - 4.0;
  if (rad_den > 0.0) e.q_rad = 2.0 * (2.0 * p * (N - 1.0) + N - a) / rad_den;

  if (params.alpha.is_exact() && params.p.is_exact()) {
    const Rational& ra = params.alpha.rational();
    const Rational& rp = params.p.rational();
    if (n >= 3) e.q_sobolev_exact = Rational(2 * n, n - 2);
    e.q_cs_exact = 2 * (2 * rp + ra) / (2 + ra);
    Rational rd = Rational(3 * n - 4) + ra;
    if (rd > 0) e.q_rad_exact = 2 * (2 * rp * (n - 1) + n - ra) / rd;
  }

  if (n >= 2 && !is_double_critical(params)) {
    e.theta = theta_of(params);
    if (params.exact()) e.theta_exact = theta_exact(params);
    try {
      e.sigma = sigma_of(params);
      if (*e.theta > 0.0 && *e.theta <= 1.0) e.c_star = c_star_of(params);
    } catch (const Error&) {
    }
    double tmin = decay_theta_min(params);
    double b0 = decay_beta(params, tmin), b1 = decay_beta(params, 1.0);
    e.beta_interval = std::make_pair(std::min(b0, b1), std::max(b0, b1));
  }
  return e;
}

RegimeReport classify(const Params& params) {
  params.validate();
  RegimeReport rep;
  if (params.exact()) {
    auto s = make_sym<Rational>(params.n, params.alpha.rational(), params.p.rational(),
                                params.q.rational());
    rep = classify_impl(s, params.n);
    rep.exact = true;
  } else {
    auto s = make_sym<double>(params.n, params.alpha.value(), params.p.value(), params.q.value());
    rep = classify_impl(s, params.n);
  }
  return rep;
}

}  // namespace spslab
