#include "spslab/energy.hpp"

#include "spslab/error.hpp"

#include <cmath>

namespace spslab {

namespace {

void check_grids(const RadialFunction& u, const KernelMatrix& k) {
  require(u.grid != nullptr, ErrorKind::invalid_argument, "function has no grid");
  require(u.grid->same_as(k.grid()), ErrorKind::invalid_argument,
          "function and kernel live on different grids");
  require(u.grid->n() == k.grid().n(), ErrorKind::invalid_argument, "dimension mismatch");
}

bool is_zero(const RadialFunction& u) {
  for (double v : u.values)
    if (v != 0.0) return false;
  return true;
}

double signed_pow(double v, double e) {
  double a = std::fabs(v);
  double mag = e == 0.0 ? 1.0 : (e == 1.0 ? a : (e == 2.0 ? a * a : std::pow(a, e)));
  return v < 0 ? -mag : mag;
}

double weighted_norm2(const RadialGrid& g, const std::vector<double>& x) {
  const auto& w = g.weights();
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) s += w[j] * x[j] * x[j];
  return g.surface_const() * s;
}

}  // namespace

nlohmann::json EnergyBreakdown::to_json() const {
  nlohmann::json j;
  j["dirichlet"] = dirichlet;
  j["coulomb"] = coulomb;
  j["lq"] = lq;
  j["e_star"] = e_star;
  j["j_star"] = j_star;
  j["quotient"] = quotient_defined ? nlohmann::json(quotient) : nlohmann::json(nullptr);
  return j;
}

EnergyBreakdown breakdown(const RadialFunction& u, const Params& params, const KernelMatrix& k) {
  params.validate();
  check_grids(u, k);
  require(params.n == u.grid->n(), ErrorKind::invalid_argument, "params.n differs from grid dimension");
  require(std::fabs(params.alpha.value() - k.alpha()) < 1e-14, ErrorKind::invalid_argument,
          "params.alpha differs from the kernel's alpha");
  const double p = params.p.value(), q = params.q.value();
  EnergyBreakdown e;
  e.dirichlet = dirichlet_energy(u);
  e.coulomb = coulomb_energy(u, p, k);
  e.lq_power = lq_power(u, q);
  e.lq = std::pow(e.lq_power, 1.0 / q);
  e.e_star = 0.5 * e.dirichlet + e.coulomb / (2.0 * p);
  e.j_star = e.e_star - e.lq_power / q;
  e.theta = theta_of(params);
  if (e.lq > 0.0) {
    e.quotient = std::pow(e.dirichlet, e.theta / 2.0) *
                 std::pow(e.coulomb, (1.0 - e.theta) / (2.0 * p)) / e.lq;
    e.quotient_defined = true;
  }
  return e;
}

double quotient(const RadialFunction& u, const Params& params, const KernelMatrix& k) {
  auto e = breakdown(u, params, k);
  require(e.quotient_defined, ErrorKind::singular, "quotient undefined for u = 0");
  return e.quotient;
}

RadialFunction radial_laplacian(const RadialFunction& u) {
  const auto& g = *u.grid;
  const int m = u.m();
  const double h = g.h(), c = g.n() - 2.0;
  std::vector<double> out(m);
  for (int j = 0; j < m; ++j) {
    double um = j > 0 ? u.values[j - 1] : u.values[0];
    double up = j + 1 < m ? u.values[j + 1] : 0.0;
    double utt = (up - 2.0 * u.values[j] + um) / (h * h);
    double ut = (up - um) / (2.0 * h);
    double r = g.r(j);
    out[j] = (utt + c * ut) / (r * r);
  }
  return RadialFunction(u.grid, std::move(out));
}

ElTerms el_terms(const RadialFunction& u, const Params& params, const KernelMatrix& k) {
  params.validate();
  check_grids(u, k);
  const double p = params.p.value(), q = params.q.value();
  const int m = u.m();
  auto lap = radial_laplacian(u);
  auto phi = riesz_apply(RadialFunction(u.grid, abs_pow(u.values, p)), k);
  ElTerms t;
  t.laplace.resize(m);
  t.lhs.resize(m);
  t.rhs.resize(m);
  for (int j = 0; j < m; ++j) {
    double v = u.values[j];
    t.laplace[j] = -lap.values[j];
    if (v == 0.0 && p == 1.0) {
      // subdifferential of |u| at 0: pick the element of [-1, 1] closest to a solution
      double l = t.laplace[j], f = phi.values[j];
      t.lhs[j] = std::fabs(l) <= f ? 0.0 : (l > 0 ? l - f : l + f);
    } else {
      t.lhs[j] = t.laplace[j] + phi.values[j] * signed_pow(v, p - 1.0);
    }
    t.rhs[j] = signed_pow(v, q - 1.0);
  }
  return t;
}

Residual el_residual(const RadialFunction& u, double mu, const Params& params,
                     const KernelMatrix& k) {
  check_grids(u, k);
  if (is_zero(u)) return {0.0, true};
  auto t = el_terms(u, params, k);
  std::vector<double> r(t.lhs.size());
  for (std::size_t j = 0; j < r.size(); ++j) r[j] = t.lhs[j] - mu * t.rhs[j];
  double den = weighted_norm2(*u.grid, t.laplace);
  require(den > 0.0, ErrorKind::singular, "el_residual: -Delta u vanishes");
  return {std::sqrt(weighted_norm2(*u.grid, r) / den), false};
}

double el_fit_mu(const RadialFunction& u, const Params& params, const KernelMatrix& k) {
  require(!is_zero(u), ErrorKind::invalid_argument, "el_fit_mu: u = 0");
  auto t = el_terms(u, params, k);
  const auto& w = u.grid->weights();
  double ab = 0.0, bb = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    ab += w[j] * t.lhs[j] * t.rhs[j];
    bb += w[j] * t.rhs[j] * t.rhs[j];
  }
  return ab / bb;
}

double nehari_mu(const EnergyBreakdown& e) {
  require(e.lq_power > 0.0, ErrorKind::invalid_argument, "nehari_mu: int |u|^q = 0");
  return (e.dirichlet + e.coulomb) / e.lq_power;
}

double nehari_mu(const RadialFunction& u, const Params& params, const KernelMatrix& k) {
  return nehari_mu(breakdown(u, params, k));
}

double nehari_residual(const EnergyBreakdown& e, double mu) {
  double s = e.dirichlet + e.coulomb;
  require(s > 0.0, ErrorKind::invalid_argument, "nehari_residual: D + V = 0");
  return std::fabs(s - mu * e.lq_power) / s;
}

Residual nehari_residual(const RadialFunction& u, double mu, const Params& params,
                         const KernelMatrix& k) {
  check_grids(u, k);
  if (is_zero(u)) return {0.0, true};
  return {nehari_residual(breakdown(u, params, k), mu), false};
}

double pohozaev_residual(const EnergyBreakdown& e, double mu, const Params& params) {
  const double N = params.n, a = params.alpha.value(), p = params.p.value(),
               q = params.q.value();
  double lhs = (N - 2.0) / 2.0 * e.dirichlet + (N + a) / (2.0 * p) * e.coulomb;
  double diff = std::fabs(lhs - N * mu / q * e.lq_power);
  return lhs != 0.0 ? diff / std::fabs(lhs) : diff;
}

Residual pohozaev_residual(const RadialFunction& u, double mu, const Params& params,
                           const KernelMatrix& k) {
  check_grids(u, k);
  if (is_zero(u)) return {0.0, true};
  return {pohozaev_residual(breakdown(u, params, k), mu, params), false};
}

std::pair<double, double> pohozaev_ratios(const Params& params) {
  params.validate();
  if (is_double_critical(params))
    fail(ErrorKind::double_critical, "Pohozaev ratios: N - 2 = (N + alpha)/p");
  const double N = params.n, a = params.alpha.value(), p = params.p.value(),
               q = params.q.value();
  double first = (2.0 * N / q - (N + a) / p) / ((N - 2.0) - (N + a) / p);
  return {first, 1.0 - first};
}

}  // namespace spslab
