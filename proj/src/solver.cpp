#include "spslab/solver.hpp"

#include "spslab/error.hpp"
#include "spslab/simd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#ifndef SPSLAB_VERSION
#define SPSLAB_VERSION "0.0.0"
#endif

namespace spslab {

const char* version() { return SPSLAB_VERSION; }

namespace {

constexpr int kPreconditionerRefresh = 20;

bool expects_minimizer(Regime r) {
  return r == Regime::existence_general || r == Regime::existence_radial_only ||
         r == Regime::eigenvalue_critical;
}

// Discrete functional on one grid: E = D/2 + V/(2p) and G = int |u|^q.
class Functional {
 public:
  Functional(const Params& params, const KernelPtr& k)
      : k_(k),
        g_(k->grid()),
        p_(params.p.value()),
        q_(params.q.value()),
        m_(g_.m()),
        wf_(m_),
        y_(m_) {}

  int m() const { return m_; }
  double q() const { return q_; }
  // (K w |u|^p)_j from the last coulomb() call
  double potential(int j) const { return y_[j]; }

  double lq_power(const std::vector<double>& u) const {
    const auto& w = g_.weights();
    double s = 0.0;
    for (int j = 0; j < m_; ++j) s += w[j] * std::pow(std::fabs(u[j]), q_);
    return g_.surface_const() * s;
  }

  double dirichlet(const std::vector<double>& u) const {
    const auto& s = g_.stiffness();
    double d = 0.0;
    for (int j = 0; j < m_; ++j) {
      double du = (j + 1 < m_ ? u[j + 1] : 0.0) - u[j];
      d += s[j] * du * du;
    }
    return d;
  }

  // Fills y = K (w |u|^p) as a side effect.
  double coulomb(const std::vector<double>& u) {
    const auto& w = g_.weights();
    for (int j = 0; j < m_; ++j) wf_[j] = w[j] * pw(std::fabs(u[j]), p_);
    simd::matvec(k_->data(), wf_.data(), y_.data(), m_);
    return std::max(0.0, simd::dot(wf_.data(), y_.data(), m_));
  }

  double energy(const std::vector<double>& u, double* d_out = nullptr, double* v_out = nullptr) {
    double d = dirichlet(u), v = coulomb(u);
    if (d_out) *d_out = d;
    if (v_out) *v_out = v;
    return 0.5 * d + v / (2.0 * p_);
  }

  // Gradient of E; uses y_ from the last coulomb() call on the same u.
  void gradient(const std::vector<double>& u, std::vector<double>& g) const {
    const auto& s = g_.stiffness();
    const auto& w = g_.weights();
    g.assign(m_, 0.0);
    for (int j = 0; j < m_; ++j) {
      double up = j + 1 < m_ ? u[j + 1] : 0.0;
      double flux = s[j] * (up - u[j]);
      g[j] -= flux;
      if (j + 1 < m_) g[j + 1] += flux;
      g[j] += w[j] * y_[j] * spow(u[j], p_ - 1.0);
    }
  }

  void constraint_gradient(const std::vector<double>& u, std::vector<double>& n) const {
    const auto& w = g_.weights();
    n.resize(m_);
    const double c = g_.surface_const() * q_;
    for (int j = 0; j < m_; ++j) n[j] = c * w[j] * spow(u[j], q_ - 1.0);
  }

  // Projection onto u >= 0, then scaling onto {G = c}.
  void retract(std::vector<double>& v, double c) const {
    for (double& x : v) x = std::max(x, 0.0);
    double gq = lq_power(v);
    if (!(gq > 0.0)) return;
    double f = std::pow(c / gq, 1.0 / q_);
    for (double& x : v) x *= f;
  }

  static double pw(double a, double e) { return e == 2.0 ? a * a : (e == 1.0 ? a : std::pow(a, e)); }
  // u^e for u >= 0 with 0^0 = 1: the one-sided derivative at p = 1.
  static double spow(double v, double e) { return e == 1.0 ? v : std::pow(v, e); }

 private:
  KernelPtr k_;
  const RadialGrid& g_;
  double p_, q_;
  int m_;
  std::vector<double> wf_, y_;
};

// Thomas solve with P = A + diag(extra), A the Dirichlet stiffness.
class Preconditioner {
 public:
  // Nodes with active[j] are pinned: identity rows, decoupled from the rest.
  Preconditioner(const RadialGrid& g, const std::vector<double>& extra,
                 const std::vector<char>& active)
      : m_(g.m()), c_(m_), d_(m_), lo_(m_) {
    const auto& s = g.stiffness();
    std::vector<double> diag(m_), off(m_, 0.0);
    for (int j = 0; j < m_; ++j) {
      diag[j] = active[j] ? 1.0 : s[j] + (j > 0 ? s[j - 1] : 0.0) + extra[j];
      if (j + 1 < m_ && !active[j] && !active[j + 1]) off[j] = -s[j];
    }
    // LU factors of the symmetric tridiagonal matrix
    d_[0] = diag[0];
    for (int j = 1; j < m_; ++j) {
      lo_[j] = off[j - 1] / d_[j - 1];
      d_[j] = diag[j] - lo_[j] * off[j - 1];
    }
    for (int j = 0; j < m_; ++j) c_[j] = off[j];
  }

  void solve(const std::vector<double>& b, std::vector<double>& x) const {
    x.resize(m_);
    x[0] = b[0];
    for (int j = 1; j < m_; ++j) x[j] = b[j] - lo_[j] * x[j - 1];
    x[m_ - 1] /= d_[m_ - 1];
    for (int j = m_ - 2; j >= 0; --j) x[j] = (x[j] - c_[j] * x[j + 1]) / d_[j];
  }

 private:
  int m_;
  std::vector<double> c_, d_, lo_;
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return simd::dot(a.data(), b.data(), a.size());
}

std::vector<double> sample_init(const InitProfile& init, const RadialGrid& g, double width_factor) {
  std::vector<double> u(g.m());
  switch (init.kind) {
    case InitKind::gaussian: {
      double w = init.width * width_factor;
      for (int j = 0; j < g.m(); ++j) u[j] = std::exp(-std::pow(g.r(j) / w, 2));
      break;
    }
    case InitKind::annular: {
      double w = init.width * width_factor;
      for (int j = 0; j < g.m(); ++j) u[j] = std::exp(-std::pow((g.r(j) - init.center) / w, 2));
      break;
    }
    case InitKind::custom:
      require(init.custom && init.custom->grid && init.custom->grid->same_as(g),
              ErrorKind::invalid_argument, "custom init profile must live on the solver grid");
      u = init.custom->values;
      break;
  }
  return u;
}

// Share of int |u|^q carried by the first and last 2% of the nodes.
std::pair<double, double> edge_mass(const std::vector<double>& u, const RadialGrid& g, double q) {
  const int m = g.m(), band = std::max(1, m / 50);
  double inner = 0.0, outer = 0.0, total = 0.0;
  for (int j = 0; j < m; ++j) {
    double v = g.weights()[j] * std::pow(std::fabs(u[j]), q);
    total += v;
    if (j < band) inner += v;
    if (j >= m - band) outer += v;
  }
  if (!(total > 0.0)) return {0.0, 0.0};
  return {inner / total, outer / total};
}

struct DilationExponents {
  double a, b;  // D ~ l^a, V ~ l^b along the L^q-preserving orbit
};

DilationExponents dilation_exponents(const Params& params) {
  const double N = params.n, al = params.alpha.value(), p = params.p.value(),
               q = params.q.value();
  return {N - 2.0 - 2.0 * N / q, N + al - 2.0 * p * N / q};
}

}  // namespace

void SolverConfig::validate() const {
  require(c > 0.0, ErrorKind::invalid_argument, "constraint value c must be positive");
  require(tol_grad > 0.0 && tol_energy > 0.0, ErrorKind::invalid_argument,
          "tolerances must be positive");
  require(step0 > 0.0, ErrorKind::invalid_argument, "step0 must be positive");
  require(backtrack_factor > 0.0 && backtrack_factor < 1.0, ErrorKind::invalid_argument,
          "backtrack_factor must lie in (0, 1)");
  require(max_iter > 0, ErrorKind::invalid_argument, "max_iter must be positive");
  require(init.width > 0.0, ErrorKind::invalid_argument, "init width must be positive");
}

nlohmann::json SolverConfig::to_json() const {
  nlohmann::json j;
  j["c"] = c;
  const char* kinds[] = {"gaussian", "annular", "custom"};
  j["init"] = {{"kind", kinds[static_cast<int>(init.kind)]},
               {"width", init.width},
               {"center", init.center}};
  j["step0"] = step0;
  j["backtrack_factor"] = backtrack_factor;
  j["tol_grad"] = tol_grad;
  j["tol_energy"] = tol_energy;
  j["max_iter"] = max_iter;
  j["seed"] = seed;
  j["dilation"] = dilation;
  j["boundary_mass_tol"] = boundary_mass_tol;
  return j;
}

DilationResult optimal_dilation(const RadialFunction& u, const Params& params,
                                const KernelMatrix& k) {
  params.validate();
  DilationResult out;
  out.u = u;
  if (is_double_critical(params)) {
    out.identity = true;
    out.reason = "double-critical";
    return out;
  }
  if (is_cs_critical(params)) {
    out.identity = true;
    out.reason = "q = q_cs";
    return out;
  }
  const double p = params.p.value(), q = params.q.value();
  double d = dirichlet_energy(u), v = coulomb_energy(u, p, k);
  auto [a, b] = dilation_exponents(params);
  if (!(d > 0.0 && v > 0.0) || a * b >= 0.0) {
    out.identity = true;
    out.reason = "no interior optimum along the dilation orbit";
    return out;
  }
  out.lambda_star = std::pow(-a * p * d / (b * v), 1.0 / (b - a));
  const auto& g = *u.grid;
  int shift = static_cast<int>(std::lround(std::log(out.lambda_star) / g.h()));
  shift = std::clamp(shift, -(g.m() / 4), g.m() / 4);
  out.shift = shift;
  if (shift != 0) {
    // zero fill past r_max; near r_min the flat continuation matches u'(0) = 0
    auto shifted = dilate(u, shift);
    for (int j = 0; j < std::min(shift, g.m()); ++j) shifted.values[j] = u.values[0];
    out.u = scale(shifted, std::exp(-shift * g.h() * g.n() / q));
  }
  return out;
}

GroundstateResult minimize(const Params& params, const KernelPtr& kernel,
                           const SolverConfig& config) {
  params.validate();
  config.validate();
  require(kernel != nullptr, ErrorKind::invalid_argument, "kernel is null");
  const RadialGrid& grid = kernel->grid();
  require(params.n == grid.n(), ErrorKind::invalid_argument, "params.n differs from grid dimension");
  require(std::fabs(params.alpha.value() - kernel->alpha()) < 1e-14, ErrorKind::invalid_argument,
          "params.alpha differs from the kernel's alpha");

  GroundstateResult res;
  res.params = params;
  res.c = config.c;
  const auto report = classify(params);
  res.nonconvergence_expected = !expects_minimizer(report.classification);
  if (res.nonconvergence_expected)
    res.message = std::string("NONCONVERGENCE_EXPECTED: regime ") + to_string(report.classification);

  const bool cs = is_cs_critical(params);
  const bool use_dilation = config.dilation && !cs && !is_double_critical(params);
  const double q = params.q.value();
  const int m = grid.m();
  Functional F(params, kernel);

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> jitter(0.7, 1.4);
  std::vector<double> u;
  double d = 0.0, v = 0.0, e = 0.0;
  for (int attempt = 0;; ++attempt) {
    u = sample_init(config.init, grid, attempt == 0 ? 1.0 : jitter(rng));
    F.retract(u, config.c);
    e = F.energy(u, &d, &v);
    if (d > 0.0 && v > 0.0) break;
    require(attempt < 8 && config.init.kind != InitKind::custom, ErrorKind::invalid_argument,
            "initial profile is degenerate on this grid (D = 0 or V = 0)");
  }

  auto try_dilation = [&]() {
    if (!use_dilation) return false;
    auto dil = optimal_dilation(RadialFunction(kernel->grid_ptr(), u), params, *kernel);
    if (dil.identity || dil.shift == 0) return false;
    auto cand = dil.u.values;
    F.retract(cand, config.c);
    if (!(F.lq_power(cand) > 0.0)) return false;
    double dc, vc;
    double ec = F.energy(cand, &dc, &vc);
    if (!(ec < e)) {
      F.energy(u, &d, &v);  // restore y for u
      return false;
    }
    u = std::move(cand);
    e = ec;
    d = dc;
    v = vc;
    return true;
  };
  try_dilation();
  res.trace.push_back(e);

  std::vector<double> g, n, z, zn, r, dir, cand, r_prev, extra;
  std::vector<char> active(m, 0);
  double step = config.step0, rz_prev = 0.0;
  bool have_prev = false;
  double grad = std::numeric_limits<double>::infinity(), de = std::numeric_limits<double>::infinity();
  double nu = 0.0;
  int it = 0;
  bool stalled = false;
  std::optional<Preconditioner> P;
  int built_at = 0;
  for (; it < config.max_iter; ++it) {
    F.energy(u, &d, &v);
    F.gradient(u, g);
    F.constraint_gradient(u, n);
    // bound u >= 0: nodes at zero pushed downward stay pinned
    for (int j = 0; j < m; ++j) {
      active[j] = u[j] == 0.0 && g[j] > 0.0;
      if (active[j]) g[j] = n[j] = 0.0;
    }
    // the metric is frozen between refreshes so the CG recurrence stays consistent
    if (!P || it - built_at >= kPreconditionerRefresh || !have_prev) {
      // Hessian diagonal in absolute value: mu (q-1) u^{q-2} from the constraint,
      // (p-1) y_j u_j^{p-2} from the Coulomb term; u floored for exponents below 0
      const double p = params.p.value();
      const double mu_now = (d + v) / F.lq_power(u);
      double umax = *std::max_element(u.begin(), u.end());
      extra.resize(m);
      for (int j = 0; j < m; ++j) {
        double a = std::max(u[j], 1e-8 * umax);
        extra[j] = grid.weights()[j] * ((p - 1.0) * F.potential(j) * std::pow(a, p - 2.0) +
                                        grid.surface_const() * mu_now * (q - 1.0) * std::pow(a, q - 2.0));
      }
      P.emplace(grid, extra, active);
      built_at = it;
      have_prev = false;
    }
    P->solve(g, z);
    P->solve(n, zn);
    for (int j = 0; j < m; ++j)
      if (active[j]) z[j] = zn[j] = 0.0;
    double nzn = dot(n, zn);
    nu = dot(n, z) / nzn;
    r.resize(m);
    for (int j = 0; j < m; ++j) {
      r[j] = g[j] - nu * n[j];
      z[j] -= nu * zn[j];
    }
    double rz = dot(r, z);
    // relative projected gradient in the dual norm of the preconditioner
    double gz = std::max(dot(g, z) + nu * nu * nzn, 1e-300);
    grad = std::sqrt(std::max(rz, 0.0) / gz);
    if (grad <= config.tol_grad && de <= config.tol_energy) break;

    double beta = 0.0;
    if (have_prev) {
      double num = 0.0;
      for (int j = 0; j < m; ++j) num += z[j] * (r[j] - r_prev[j]);
      beta = std::max(0.0, num / rz_prev);
      // keep the old direction tangent at u
      double t = dot(n, dir) / nzn;
      for (int j = 0; j < m; ++j) dir[j] -= t * zn[j];
    }
    if (!have_prev) dir.assign(m, 0.0);
    for (int j = 0; j < m; ++j) dir[j] = -z[j] + beta * dir[j];
    double slope = dot(g, dir);
    if (!(slope < 0.0)) {
      for (int j = 0; j < m; ++j) dir[j] = -z[j];
      slope = dot(g, dir);
    }

    bool accepted = false;
    double t = std::min(step * 2.0, 1e6);
    double e_new = e;
    for (int bt = 0; bt < 80; ++bt) {
      cand.resize(m);
      for (int j = 0; j < m; ++j) cand[j] = u[j] + t * dir[j];
      F.retract(cand, config.c);
      // a step that clips everything to zero leaves the constraint set
      if (!(F.lq_power(cand) > 0.0)) {
        t *= config.backtrack_factor;
        continue;
      }
      e_new = F.energy(cand);
      if (std::isfinite(e_new) && e_new < e && e_new <= e + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
      t *= config.backtrack_factor;
    }
    if (!accepted) {
      if (have_prev) {
        have_prev = false;  // retry from steepest descent
        continue;
      }
      stalled = true;
      break;
    }
    step = t;
    de = std::fabs(e - e_new) / std::max(std::fabs(e_new), 1e-300);
    u.swap(cand);
    e = e_new;
    r_prev = r;
    rz_prev = rz;
    have_prev = true;
    res.trace.push_back(e);
    if (it % 10 == 9 && try_dilation()) {
      res.trace.push_back(e);
      have_prev = false;
    }
  }
  res.iterations = it;
  res.grad_norm = grad;
  res.mu_solver = q * nu;

  res.u = RadialFunction(kernel->grid_ptr(), u);
  auto [inner, outer] = edge_mass(u, grid, q);
  res.inner_mass = inner;
  res.boundary_mass = outer;
  const bool edges_ok = outer <= config.boundary_mass_tol && inner <= config.boundary_mass_tol;
  res.converged = grad <= config.tol_grad && (de <= config.tol_energy || stalled) && edges_ok;
  if (!res.nonconvergence_expected) {
    require(outer <= config.boundary_mass_tol, ErrorKind::boundary_mass,
            "minimizer carries " + std::to_string(outer) +
                " of int|u|^q in the outer 2% of the grid; increase r_max");
    require(inner <= config.boundary_mass_tol, ErrorKind::boundary_mass,
            "minimizer carries " + std::to_string(inner) +
                " of int|u|^q in the inner 2% of the grid; decrease r_min");
  } else if (!edges_ok) {
    res.message += outer > inner ? "; mass escapes through r_max (vanishing)"
                                 : "; mass concentrates at r_min";
  }

  res.energy = breakdown(res.u, params, *kernel);
  res.m_c = res.energy.e_star;
  res.mu = nehari_mu(res.energy);
  res.mu_el = el_fit_mu(res.u, params, *kernel);
  res.residuals.el = el_residual(res.u, res.mu, params, *kernel).value;
  res.residuals.nehari = nehari_residual(res.energy, res.mu_el);
  res.residuals.pohozaev = pohozaev_residual(res.energy, res.mu_el, params);
  try {
    res.s_estimate = s_from_m(res.m_c, params, config.c);
  } catch (const Error&) {
  }
  if (!cs && res.mu > 0.0) res.rescaled = rescale_to_groundstate(res.u, res.mu, params);

  // zero set inside the support hull; the far tail underflowing is not a dead core
  double umax = *std::max_element(u.begin(), u.end());
  int last = m - 1;
  while (last > 0 && u[last] <= 1e-12 * umax) --last;
  res.min_u = *std::min_element(u.begin(), u.begin() + last + 1);
  for (int j = 0; j <= last; ++j)
    if (u[j] <= 1e-12 * umax) res.zero_set_measure += grid.surface_const() * grid.weights()[j];
  if (!res.converged && res.message.empty())
    res.message = stalled ? "line search stalled before tolerances were met"
                          : "max_iter reached before tolerances were met";
  return res;
}

GroundstateScaling groundstate_scaling(double mu, const Params& params) {
  params.validate();
  if (is_cs_critical(params))
    fail(ErrorKind::eigenvalue_critical,
         "q = q_cs: the equation is an eigenvalue problem and cannot be rescaled to unit coefficients");
  require(mu > 0.0, ErrorKind::invalid_argument, "mu must be positive");
  const double al = params.alpha.value(), p = params.p.value(), q = params.q.value();
  // (2p-2) lg - (alpha+2) ld = 0, (q-2) lg - 2 ld = -ln mu
  const double a11 = 2 * p - 2, a12 = -(al + 2), a21 = q - 2, a22 = -2;
  const double det = a11 * a22 - a12 * a21;
  const double b2 = -std::log(mu);
  double lg = (-a12 * b2) / det;
  double ld = (a11 * b2) / det;
  return {std::exp(lg), std::exp(ld)};
}

RadialFunction rescale_to_groundstate(const RadialFunction& w, double mu, const Params& params) {
  auto s = groundstate_scaling(mu, params);
  auto grid = w.grid->scaled(s.delta);
  std::vector<double> vals(w.values);
  for (double& x : vals) x /= s.gamma;
  return RadialFunction(grid, std::move(vals));
}

double s_from_m(double m_c, const Params& params, double c) {
  require(m_c > 0.0 && c > 0.0, ErrorKind::invalid_argument, "s_from_m needs m_c > 0 and c > 0");
  double sigma = sigma_of(params), cs = c_star_of(params);
  return std::pow(m_c / cs, 1.0 / (2.0 * sigma)) / std::pow(c, 1.0 / params.q.value());
}

ScalingReport scaling_law_check(const Params& params, const KernelPtr& kernel,
                                const std::vector<double>& c_values, const SolverConfig& base) {
  require(c_values.size() >= 2, ErrorKind::invalid_argument,
          "scaling law check needs at least two c values");
  auto rep = classify(params);
  require(rep.q0 || rep.qrad0, ErrorKind::invalid_argument,
          "scaling law check needs Q0 or Qrad0 to hold");
  ScalingReport out;
  out.c_values = c_values;
  out.predicted_slope = 2.0 * sigma_of(params) / params.q.value();
  std::vector<double> xs, ys;
  for (double c : c_values) {
    SolverConfig cfg = base;
    cfg.c = c;
    auto r = minimize(params, kernel, cfg);
    out.m_values.push_back(r.m_c);
    out.converged.push_back(r.converged);
    if (r.converged) {
      xs.push_back(std::log(c));
      ys.push_back(std::log(r.m_c));
    } else {
      out.partial = true;
    }
  }
  if (xs.size() < 2) {
    out.partial = true;
    out.slope = std::numeric_limits<double>::quiet_NaN();
    out.slope_error = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= xs.size();
  my /= ys.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  out.slope = sxy / sxx;
  out.slope_error = std::fabs(out.slope - out.predicted_slope);
  return out;
}

nlohmann::json ScalingReport::to_json() const {
  nlohmann::json j;
  j["c_values"] = c_values;
  j["m_values"] = m_values;
  j["converged"] = converged;
  j["slope"] = std::isfinite(slope) ? nlohmann::json(slope) : nlohmann::json(nullptr);
  j["predicted_slope"] = predicted_slope;
  j["slope_error"] = std::isfinite(slope_error) ? nlohmann::json(slope_error) : nlohmann::json(nullptr);
  j["partial"] = partial;
  return j;
}

double mu_bound_identity(const Params& params) {
  const double al = params.alpha.value(), p = params.p.value();
  const double theta = al / (2 * p + al);
  return c_star_of(params) * 2.0 * (2 * p + al) / (2 + al) * std::pow(theta, al / (2 + al)) *
         std::pow(1 - theta, 2 / (2 + al));
}

MuBoundReport mu_lower_bound_check(const GroundstateResult& result, double tolerance) {
  const Params& params = result.params;
  require(is_cs_critical(params), ErrorKind::invalid_argument,
          "the universal multiplier bound applies only at q = q_cs");
  require(result.converged, ErrorKind::nonconvergence, "mu bound check needs a converged result");
  MuBoundReport rep;
  rep.tolerance = tolerance;
  // the bound is stated for -Delta u + ... = q mu |u|^{q-2}u; M_c = c M_1 at q_cs
  rep.mu = result.mu / params.q.value();
  rep.m1 = result.m_c / result.c;
  rep.holds = rep.mu >= rep.m1 * (1.0 - tolerance);
  rep.identity_value = mu_bound_identity(params);
  return rep;
}

nlohmann::json MuBoundReport::to_json() const {
  return {{"mu", mu},
          {"m1", m1},
          {"tolerance", tolerance},
          {"holds", holds},
          {"identity_value", identity_value}};
}

nlohmann::json GroundstateResult::to_json() const {
  nlohmann::json j;
  j["params"] = {{"n", params.n},
                 {"alpha", params.alpha.str()},
                 {"p", params.p.str()},
                 {"q", params.q.str()}};
  j["c"] = c;
  j["m_c"] = m_c;
  j["s_estimate"] = s_estimate ? nlohmann::json(*s_estimate) : nlohmann::json(nullptr);
  j["mu"] = mu;
  j["mu_el"] = mu_el;
  j["mu_solver"] = mu_solver;
  j["residuals"] = {{"el", residuals.el}, {"nehari", residuals.nehari}, {"pohozaev", residuals.pohozaev}};
  j["energy"] = energy.to_json();
  j["converged"] = converged;
  j["nonconvergence_expected"] = nonconvergence_expected;
  j["iterations"] = iterations;
  j["grad_norm"] = grad_norm;
  j["boundary_mass"] = boundary_mass;
  j["inner_mass"] = inner_mass;
  j["min_u"] = min_u;
  j["zero_set_measure"] = zero_set_measure;
  j["has_rescaled"] = rescaled.has_value();
  j["trace"] = trace;
  j["message"] = message;
  return j;
}

nlohmann::json run_manifest(const GroundstateResult& result, const SolverConfig& config) {
  nlohmann::json j;
  j["version"] = version();
  j["params"] = {{"n", result.params.n},
                 {"alpha", result.params.alpha.str()},
                 {"p", result.params.p.str()},
                 {"q", result.params.q.str()}};
  j["grid"] = result.u.grid->to_json();
  j["config"] = config.to_json();
  j["simd_backend"] = simd::active().name;
  return j;
}

}  // namespace spslab
