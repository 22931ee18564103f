#pragma once

#include "spslab/radialgrid.hpp"
#include "spslab/regime.hpp"
#include "spslab/riesz.hpp"

#include "json.hpp"

#include <map>
#include <string>
#include <vector>

namespace spslab {

// One asserted inequality lhs <= rhs (or lhs >= rhs when `lower`), with its margin.
struct Inequality {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool lower = false;
  double margin() const { return lower ? lhs - rhs : rhs - lhs; }
  bool holds() const { return margin() >= 0.0; }
  nlohmann::json to_json() const;
};

struct VerifyReport {
  std::string check;
  bool trivial = false;  // u == 0: both sides vanish, nothing to assert
  std::vector<Inequality> inequalities;
  std::map<std::string, bool> verdicts;
  std::map<std::string, double> values;
  // Per-sample rows (sweeps, sequences, theta samples).
  std::vector<std::map<std::string, double>> rows;
  nlohmann::json metadata = nlohmann::json::object();

  bool passed() const;
  nlohmann::json to_json() const;
};

// One row per report: check, passed, trivial, worst margin and its inequality.
std::string summary_csv(const std::vector<VerifyReport>& reports);

// Smallest interpolation quotient observed so far; an upper bound for the best constant.
class RunningMinimum {
 public:
  void observe(double value, const std::string& label);
  bool empty() const { return count_ == 0; }
  double value() const { return value_; }
  const std::string& label() const { return label_; }
  long count() const { return count_; }

 private:
  double value_ = 0.0;
  std::string label_;
  long count_ = 0;
};

// R(u) = D^{theta/2} V^{(1-theta)/(2p)} / ||u||_q; requires (Q) and a nonzero L^q norm.
VerifyReport check_interpolation(const RadialFunction& u, const Params& params, const KernelMatrix& k,
                                 RunningMinimum* running = nullptr);

// Constant of the ball-average estimate from the pointwise bound of the Riesz kernel on B_{2 rho}.
double average_estimate_constant(int n, double alpha);
// int_0^infty (average of |u|^p over B_rho)^2 rho^{alpha+N-1} d rho, cumulative quadrature.
double ball_average_integral(const RadialFunction& u, double p, double alpha);
VerifyReport check_average_estimate(const RadialFunction& u, double p, const KernelMatrix& k);

// int |u|^p |x|^{-(N-alpha)/2} (1 + |log |x||)^{-gamma} against its bound by V^{1/2}; gamma > 1/2.
VerifyReport check_weighted_log(const RadialFunction& u, double p, const KernelMatrix& k, double gamma);
// The same weight on the log tail along growing truncations; any gamma >= 0. The limit is
// finite exactly when gamma > 1/2.
VerifyReport weighted_log_sweep(const Params& params, double gamma, double delta,
                                const std::vector<double>& r_max_values, int m = 512);

// Exterior (beta > (N-alpha)/2) or interior (beta < (N-alpha)/2) power weights at each R.
// The exponent -(beta - (N-alpha)/2) is fitted on the dilation envelope
// sup_lambda lhs(u(./lambda), R) / V(u(./lambda))^{1/2}, R / lambda running over the grid.
VerifyReport check_power_exterior(const RadialFunction& u, double p, const KernelMatrix& k, double beta,
                                  const std::vector<double>& r_values);

// sup_r |u| r^beta / (D^{theta/2} V^{(1-theta)/(2p)}) over theta samples in [theta_min, 1].
VerifyReport check_radial_decay(const RadialFunction& u, const Params& params, const KernelMatrix& k,
                                bool groundstate = false, int theta_samples = 9);

// Coulomb energies along a sequence: V(u_n), V(u_n - u), V(u).
struct BrezisLiebTerms {
  double parameter = 0.0;
  double v_un = 0.0;
  double v_diff = 0.0;
  double v_u = 0.0;
  double delta() const { return v_un - v_diff - v_u; }
};

enum class BrezisLiebExpect { inequality, vanishing, strict };

// liminf is the minimum over the last third; vanishing adds |Delta_n| nonincreasing there and
// |Delta_last| <= 1e-3 scale; strict asks Delta_n >= 1e-2 scale over the last third.
VerifyReport assess_brezis_lieb(const std::vector<BrezisLiebTerms>& terms, BrezisLiebExpect expect);
// Radial sequence on the kernel's grid.
VerifyReport check_brezis_lieb(const std::vector<RadialFunction>& un, const RadialFunction& u, double p,
                               const KernelMatrix& k, BrezisLiebExpect expect);

// escaping-bump, strong, cantor.
VerifyReport brezis_lieb_preset(const std::string& name, const Params& params, int m = 512);
std::vector<std::string> brezis_lieb_presets();

}  // namespace spslab
