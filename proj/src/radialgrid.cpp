#include "spslab/radialgrid.hpp"

#include "spslab/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

namespace spslab {

namespace {

// (e^x - 1 - x) / x^2
double phi2(double x) {
  if (std::fabs(x) < 1e-2) {
    double term = 0.5, sum = 0.0;
    for (int k = 0; k < 10; ++k) {
      sum += term;
      term *= x / (k + 3);
    }
    return sum;
  }
  return (std::expm1(x) - x) / (x * x);
}

// (e^x - 1) / x
double phi1(double x) {
  if (x == 0.0) return 1.0;
  return std::expm1(x) / x;
}

std::uint64_t fnv(std::uint64_t h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

double sphere_area(int n) {
  return 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
}

RadialGrid::RadialGrid(Token, double r_min, double h, int m, int n)
    : n_(n), h_(h), omega_(sphere_area(n)), r_(m), w_(m), s_(m) {
  for (int j = 0; j < m; ++j) r_[j] = r_min * std::exp(j * h);
  const double a = n * h;
  const double right = h * phi2(a);    // contribution of [t_j, t_{j+1}] to node j
  const double left = h * phi2(-a);    // contribution of [t_{j-1}, t_j] to node j
  for (int j = 0; j < m; ++j) {
    double rn = std::pow(r_[j], n);
    double wj = 0.0;
    if (j + 1 < m) wj += rn * right;
    if (j > 0) wj += rn * left;
    w_[j] = wj;
  }
  const double cs = omega_ * phi1((n - 2) * h) / h;
  for (int j = 0; j < m; ++j) s_[j] = cs * std::pow(r_[j], n - 2);

  std::uint64_t hs = 1469598103934665603ull;
  hs = fnv(hs, &n_, sizeof n_);
  hs = fnv(hs, &m, sizeof m);
  hs = fnv(hs, &r_min, sizeof r_min);
  hs = fnv(hs, &h_, sizeof h_);
  hash_ = hs;
}

std::shared_ptr<const RadialGrid> RadialGrid::make(double r_min, double r_max, int m, int n) {
  require(n >= 1, ErrorKind::invalid_argument, "grid dimension must be positive");
  require(m >= 16, ErrorKind::invalid_argument, "grid needs m >= 16 nodes");
  require(r_min > 0.0 && std::isfinite(r_min), ErrorKind::invalid_argument,
          "grid needs r_min > 0");
  require(r_max > r_min && std::isfinite(r_max), ErrorKind::invalid_argument,
          "grid needs r_min < r_max");
  double h = std::log(r_max / r_min) / (m - 1);
  return std::make_shared<const RadialGrid>(Token{}, r_min, h, m, n);
}

std::shared_ptr<const RadialGrid> RadialGrid::scaled(double factor) const {
  require(factor > 0.0, ErrorKind::invalid_argument, "grid scale factor must be positive");
  return std::make_shared<const RadialGrid>(Token{}, r_min() * factor, h_, m(), n_);
}

bool RadialGrid::same_as(const RadialGrid& other) const {
  return this == &other || (hash_ == other.hash_ && n_ == other.n_ && m() == other.m() &&
                            r_min() == other.r_min() && h_ == other.h_);
}

nlohmann::json RadialGrid::to_json() const {
  return {{"r_min", r_min()}, {"r_max", r_max()}, {"m", m()},
          {"n", n_},          {"h", h_},          {"hash", hash_}};
}

RadialFunction::RadialFunction(GridPtr g, std::vector<double> v)
    : grid(std::move(g)), values(std::move(v)) {
  require(grid != nullptr, ErrorKind::invalid_argument, "radial function needs a grid");
  require(static_cast<int>(values.size()) == grid->m(), ErrorKind::invalid_argument,
          "radial function length must equal grid size");
  for (double x : values)
    require(std::isfinite(x), ErrorKind::invalid_argument, "radial function values must be finite");
}

RadialFunction RadialFunction::zeros(GridPtr g) {
  int m = g->m();
  return RadialFunction(std::move(g), std::vector<double>(m, 0.0));
}

RadialFunction RadialFunction::sample(GridPtr g, const std::function<double(double)>& f) {
  std::vector<double> v(g->m());
  for (int j = 0; j < g->m(); ++j) v[j] = f(g->r(j));
  return RadialFunction(std::move(g), std::move(v));
}

double RadialFunction::max_abs() const {
  double m = 0.0;
  for (double x : values) m = std::max(m, std::fabs(x));
  return m;
}

double integrate(const RadialFunction& f) {
  const auto& w = f.grid->weights();
  double s = 0.0;
  for (int j = 0; j < f.m(); ++j) s += w[j] * f.values[j];
  return f.grid->surface_const() * s;
}

double lq_power(const RadialFunction& u, double q) {
  require(q >= 1.0, ErrorKind::invalid_argument, "L^q norm needs q >= 1");
  const auto& w = u.grid->weights();
  double s = 0.0;
  for (int j = 0; j < u.m(); ++j) {
    double a = std::fabs(u.values[j]);
    if (a > 0.0) s += w[j] * std::pow(a, q);
  }
  return u.grid->surface_const() * s;
}

double lq_norm(const RadialFunction& u, double q) { return std::pow(lq_power(u, q), 1.0 / q); }

double dirichlet_energy(const RadialFunction& u) {
  const auto& s = u.grid->stiffness();
  const int m = u.m();
  double d = 0.0;
  for (int j = 0; j < m; ++j) {
    double next = (j + 1 < m) ? u.values[j + 1] : 0.0;
    double du = next - u.values[j];
    d += s[j] * du * du;
  }
  return d;
}

RadialFunction dilate(const RadialFunction& u, int k) {
  const int m = u.m();
  require(std::abs(k) < m, ErrorKind::invalid_argument, "dilation shift must satisfy |k| < m");
  std::vector<double> v(m, 0.0);
  for (int j = 0; j < m; ++j) {
    int src = j - k;
    if (src >= 0 && src < m) v[j] = u.values[src];
  }
  return RadialFunction(u.grid, std::move(v));
}

RadialFunction scale(const RadialFunction& u, double c) {
  std::vector<double> v(u.values);
  for (double& x : v) x *= c;
  return RadialFunction(u.grid, std::move(v));
}

double interpolate(const RadialFunction& u, double r) {
  const auto& g = *u.grid;
  if (!(r >= g.r_min()) || r > g.r_max()) return 0.0;
  double t = std::log(r / g.r_min()) / g.h();
  int j = static_cast<int>(std::floor(t));
  if (j >= g.m() - 1) return u.values.back();
  if (j < 0) j = 0;
  double f = t - j;
  return (1.0 - f) * u.values[j] + f * u.values[j + 1];
}

std::string to_csv(const RadialFunction& u) {
  std::ostringstream os;
  os.precision(17);
  os << "r,u\n";
  for (int j = 0; j < u.m(); ++j) os << u.grid->r(j) << "," << u.values[j] << "\n";
  return os.str();
}

nlohmann::json to_json(const RadialFunction& u) {
  return {{"grid", u.grid->to_json()}, {"values", u.values}};
}

RadialFunction radial_function_from_json(const nlohmann::json& j) {
  const auto& g = j.at("grid");
  auto grid = RadialGrid::make(g.at("r_min").get<double>(), g.at("r_max").get<double>(),
                               g.at("m").get<int>(), g.at("n").get<int>());
  return RadialFunction(grid, j.at("values").get<std::vector<double>>());
}

}  // namespace spslab
