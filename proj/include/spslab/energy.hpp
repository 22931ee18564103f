#pragma once

#include "spslab/radialgrid.hpp"
#include "spslab/regime.hpp"
#include "spslab/riesz.hpp"

#include "json.hpp"

#include <utility>
#include <vector>

namespace spslab {

struct EnergyBreakdown {
  double dirichlet = 0.0;  // D = int |Du|^2
  double coulomb = 0.0;    // V = int |I_{alpha/2} * |u|^p|^2
  double lq = 0.0;         // L = (int |u|^q)^{1/q}
  double lq_power = 0.0;   // L^q
  double e_star = 0.0;     // D/2 + V/(2p)
  double j_star = 0.0;     // D/2 + V/(2p) - L^q/q
  double quotient = 0.0;   // D^{theta/2} V^{(1-theta)/(2p)} / L
  bool quotient_defined = false;
  double theta = 0.0;

  nlohmann::json to_json() const;
};

EnergyBreakdown breakdown(const RadialFunction& u, const Params& params, const KernelMatrix& k);
double quotient(const RadialFunction& u, const Params& params, const KernelMatrix& k);

struct Residual {
  double value = 0.0;
  bool trivial = false;  // u == 0; value is 0 by convention
};

// u'' + (N-1)u'/r = r^{-2}(u_tt + (N-2)u_t) with centered differences in
// t = log r, a flat ghost at r_min and u = 0 past r_max.
RadialFunction radial_laplacian(const RadialFunction& u);

// Pointwise terms of -Delta u + (I_alpha * |u|^p)|u|^{p-2}u = mu |u|^{q-2}u:
// lhs holds the left side, rhs the factor |u|^{q-2}u multiplying mu.
struct ElTerms {
  std::vector<double> laplace;  // -Delta u
  std::vector<double> lhs;
  std::vector<double> rhs;
};
ElTerms el_terms(const RadialFunction& u, const Params& params, const KernelMatrix& k);

// Weighted L^2 (omega w_j) norm of lhs - mu rhs, relative to that of -Delta u.
Residual el_residual(const RadialFunction& u, double mu, const Params& params,
                     const KernelMatrix& k);
// mu minimizing el_residual (weighted least squares).
double el_fit_mu(const RadialFunction& u, const Params& params, const KernelMatrix& k);

// mu of the equation -Delta u + ... = mu |u|^{q-2}u from the Nehari identity.
double nehari_mu(const RadialFunction& u, const Params& params, const KernelMatrix& k);
double nehari_mu(const EnergyBreakdown& e);
Residual nehari_residual(const RadialFunction& u, double mu, const Params& params,
                         const KernelMatrix& k);
double nehari_residual(const EnergyBreakdown& e, double mu);

Residual pohozaev_residual(const RadialFunction& u, double mu, const Params& params,
                           const KernelMatrix& k);
double pohozaev_residual(const EnergyBreakdown& e, double mu, const Params& params);

// (D / int|u|^q, V / int|u|^q) for solutions with mu = 1.
std::pair<double, double> pohozaev_ratios(const Params& params);

}  // namespace spslab
