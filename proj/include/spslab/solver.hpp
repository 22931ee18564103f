#pragma once

#include "spslab/energy.hpp"
#include "spslab/radialgrid.hpp"
#include "spslab/regime.hpp"
#include "spslab/riesz.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace spslab {

enum class InitKind { gaussian, annular, custom };

struct InitProfile {
  InitKind kind = InitKind::gaussian;
  double width = 1.0;
  double center = 2.0;  // annular only
  std::optional<RadialFunction> custom;

  static InitProfile gaussian(double width) { return {InitKind::gaussian, width, 0.0, {}}; }
  static InitProfile annular(double center, double width) {
    return {InitKind::annular, width, center, {}};
  }
  static InitProfile from(RadialFunction u) {
    return {InitKind::custom, 1.0, 0.0, std::move(u)};
  }
};

struct SolverConfig {
  double c = 1.0;  // constraint int |u|^q = c
  InitProfile init;
  double step0 = 1.0;
  double backtrack_factor = 0.5;
  double tol_grad = 1e-6;
  double tol_energy = 1e-10;
  int max_iter = 20000;
  std::uint64_t seed = 1;
  bool dilation = true;  // ignored at q = q_cs
  // Fraction of int |u|^q allowed in the outer 2% of the log grid.
  double boundary_mass_tol = 1e-6;

  void validate() const;
  nlohmann::json to_json() const;
};

struct Residuals {
  double el = 0.0;        // el_residual at mu_nehari
  double nehari = 0.0;    // nehari_residual at mu_el
  double pohozaev = 0.0;  // pohozaev_residual at mu_el
};

struct GroundstateResult {
  Params params;
  RadialFunction u;  // minimizer w, u >= 0
  double m_c = 0.0;  // E_*(w)
  double c = 1.0;
  std::optional<double> s_estimate;
  double mu = 0.0;         // multiplier of -Delta u + ... = mu |u|^{q-2}u (Nehari)
  double mu_el = 0.0;      // least-squares multiplier from the pointwise equation
  double mu_solver = 0.0;  // q times the Lagrange multiplier of the constraint
  std::optional<RadialFunction> rescaled;  // unit-coefficient solution; absent at q_cs
  Residuals residuals;
  EnergyBreakdown energy;
  std::vector<double> trace;  // E_* after every accepted step
  bool converged = false;
  bool nonconvergence_expected = false;
  int iterations = 0;
  double grad_norm = 0.0;
  double boundary_mass = 0.0;  // outer-edge share of int |u|^q
  double inner_mass = 0.0;     // inner-edge share of int |u|^q
  double min_u = 0.0;
  double zero_set_measure = 0.0;  // |{u <= 1e-12 max u}| inside the support hull
  std::string message;

  nlohmann::json to_json() const;
};

// Projected, preconditioned descent of E_* on {int |u|^q = c}, u >= 0.
GroundstateResult minimize(const Params& params, const KernelPtr& kernel,
                           const SolverConfig& config = {});

struct DilationResult {
  double lambda_star = 1.0;
  int shift = 0;
  RadialFunction u;
  bool identity = false;  // q_cs, double-critical, or no interior optimum
  std::string reason;
};

// E_*-optimal dilation u_l(x) = l^{-N/q} u(x/l) rounded to a grid shift.
// At q != q_cs this also minimizes R along the orbit, and R itself is
// dilation invariant, so the shift mostly fixes the scale of the iterate.
DilationResult optimal_dilation(const RadialFunction& u, const Params& params,
                                const KernelMatrix& k);

struct GroundstateScaling {
  double gamma = 1.0;
  double delta = 1.0;
};
// (gamma, delta) with gamma^{2p-2} delta^{-alpha-2} = 1 and mu gamma^{q-2} delta^{-2} = 1.
GroundstateScaling groundstate_scaling(double mu, const Params& params);
// u with w(x) = gamma u(delta x), on the grid scaled by delta.
RadialFunction rescale_to_groundstate(const RadialFunction& w, double mu, const Params& params);

// M_c = C_* (c^{1/q} S)^{2 sigma}, solved for S.
double s_from_m(double m_c, const Params& params, double c = 1.0);

struct ScalingReport {
  std::vector<double> c_values;
  std::vector<double> m_values;
  std::vector<bool> converged;
  double slope = 0.0;
  double predicted_slope = 0.0;
  double slope_error = 0.0;
  bool partial = false;
  nlohmann::json to_json() const;
};
ScalingReport scaling_law_check(const Params& params, const KernelPtr& kernel,
                                const std::vector<double>& c_values,
                                const SolverConfig& base = {});

struct MuBoundReport {
  double mu = 0.0;
  double m1 = 0.0;
  double tolerance = 1e-3;
  bool holds = false;
  double identity_value = 0.0;  // the C_* product, equal to 1
  nlohmann::json to_json() const;
};
// C_* 2((2p+alpha)/(2+alpha)) theta^{alpha/(2+alpha)} (1-theta)^{2/(2+alpha)} at q_cs.
double mu_bound_identity(const Params& params);
MuBoundReport mu_lower_bound_check(const GroundstateResult& result, double tolerance = 1e-3);

nlohmann::json run_manifest(const GroundstateResult& result, const SolverConfig& config);

const char* version();

}  // namespace spslab
