#pragma once

#include "spslab/radialgrid.hpp"
#include "spslab/regime.hpp"
#include "spslab/riesz.hpp"

#include "json.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace spslab {

// (1 - (r/radius)^2)^3 for r < radius, else 0.
double poly_bump(double r, double radius = 1.0);

// Uniform table in x with 4-point Lagrange interpolation, clamped at the ends.
class UniformTable {
 public:
  UniformTable() = default;
  UniformTable(double x0, double dx, std::vector<double> y);
  double operator()(double x) const;
  double x0() const { return x0_; }
  double x_end() const { return x0_ + dx_ * (y_.size() - 1); }

 private:
  double x0_ = 0.0, dx_ = 1.0;
  std::vector<double> y_;
};

// Coulomb interaction of two radial densities whose centres are L apart:
//   int int f(|x|) g(|y - L e|) I_alpha(x - y) dx dy.
// f lives on the kernel's grid; g on any grid of the same dimension. The potential
// I_alpha * f is tabulated once and the sphere average is done by Gauss-Jacobi in cos.
class PairInteraction {
 public:
  PairInteraction(const RadialFunction& f, const RadialFunction& g, const KernelMatrix& kf,
                  int angular = 48);

  double operator()(double distance) const;
  double potential(double r) const;  // (I_alpha * f)(r)
  // Point-mass value A_alpha L^{-(N-alpha)} int f int g and rigorous bounds for
  // L > support_f + support_g.
  double far_field(double distance) const;
  std::pair<double, double> far_field_bounds(double distance) const;
  double support_f() const { return rf_; }
  double support_g() const { return rg_; }
  double mass_f() const { return mf_; }
  double mass_g() const { return mg_; }

 private:
  int n_;
  double alpha_, amp_, rf_, rg_, mf_, mg_;
  double f_rmin_, f_rmax_;
  UniformTable inner_;  // potential in t = log r on the grid of f
  UniformTable outer_;  // potential in t beyond the grid of f
  double outer_end_ = 0.0;
  std::vector<double> gr_, gw_;  // nodes and omega*w*g of the second density
  std::vector<double> t_, tw_;   // cos nodes and weights including |S^{N-2}|
};

// PairInteraction(L) of a density with itself, tabulated on [0, l_max]; beyond it
// the far-field value is used and its error bound is reported.
class PairTable {
 public:
  PairTable(const PairInteraction& pi, double l_max, int points);
  double operator()(double distance) const;
  // Width of the interval guaranteed to contain the true value (0 inside the table).
  double bound_width(double distance) const;

 private:
  const PairInteraction* pi_;
  UniformTable table_;
  double l_max_;
};

enum class FamilyKind {
  sobolev_scaling,
  annular,
  vanishing_chain,
  cube_array,
  cantor_cascade,
  translated_bumps,
  log_tail,
};
const char* to_string(FamilyKind kind);
FamilyKind family_kind_from_string(std::string_view name);

struct FamilyMember {
  double parameter = 0.0;
  std::map<std::string, double> values;
};

struct SlopeFit {
  std::string quantity;
  double fitted = 0.0;
  double predicted = 0.0;
  double error = 0.0;  // |fitted - predicted| / max(|predicted|, 1)
  double tolerance = 0.0;
  int points = 0;
  bool ok = false;
};

// Least-squares slope of log y against log x.
SlopeFit fit_slope(const std::string& quantity, const std::vector<double>& x,
                   const std::vector<double>& y, double predicted, double tolerance);

struct FamilyReport {
  FamilyKind kind = FamilyKind::sobolev_scaling;
  Params params;
  std::string parameter_name;
  std::vector<FamilyMember> members;
  std::vector<SlopeFit> slopes;
  std::map<std::string, bool> verdicts;
  nlohmann::json metadata = nlohmann::json::object();

  bool passed() const;
  const SlopeFit& slope(std::string_view quantity) const;
  std::vector<double> column(const std::string& key) const;
  nlohmann::json to_json() const;
  std::string to_csv() const;
};

struct FamilyOptions {
  int m = 512;  // nodes per radial grid
  int threads = 0;
  double slope_tolerance = 0.05;
};

// u_R(x) = R^{-(N-2)/2} u0(x/R) with u0 the unit bump, each on the base grid scaled by R.
FamilyReport sobolev_scaling(const Params& params, const std::vector<double>& r_values,
                             const FamilyOptions& opts = {});

// Height and width exponents of the annular bumps u_R(r) = R^{-a} |log R|^{-l} u((r - R)/R^g).
struct AnnularScaling {
  double height = 0.0;     // a
  double log_power = 0.0;  // l, nonzero only at alpha = 1
  double width = 0.0;      // g
  double support_exponent = 0.0;  // N - 1 + g
  bool to_infinity = true;  // R -> infinity when p(N-2) < N + alpha
  // ||u_R||_q ~ R^{-rate(q)} |log R|^{-l}
  double lq_rate(double q) const;
};
AnnularScaling annular_scaling(const Params& params);
// The member on its own grid covering [R, R + R^g].
RadialFunction annular_member(const Params& params, double r, int m);

FamilyReport annular_family(const Params& params, const std::vector<double>& r_values,
                            const FamilyOptions& opts = {});

// u_{R,k} = sum_{i<=k} u_{R^i} and its rescaling v_{R,k}; Coulomb cross terms exact.
FamilyReport vanishing_chain(const Params& params, double r, const std::vector<int>& k_values,
                             const FamilyOptions& opts = {});
// Cross-term sum of u_{R,k} as R grows at fixed k.
FamilyReport chain_cross_decay(const Params& params, const std::vector<double>& r_values, int k,
                               const FamilyOptions& opts = {});

// sum_{a != b in {-n..n}^d} |a - b|^{-s}
double lattice_sum(int n, int d, double s);
// int int_{[-1,1]^d x [-1,1]^d} |x - y|^{-s} dx dy, s < d
double cube_pair_integral(int d, double s);

// Bumps on the lattice rho_n {-n..n}^d, rho_n = 2.5 n^{d/(N-alpha) - 1}, dilated by lambda_n.
FamilyReport cube_array(const Params& params, const std::vector<int>& n_values, int d,
                        const FamilyOptions& opts = {});

// f_{n+1}(x) = (2 rho)^{-N} sum_{a in {-1/2,1/2}^N} f_n((x - a)/rho), f_0 a unit-mass bump.
// E_n is the Coulomb energy of f_n as a density.
FamilyReport cantor_cascade(int n, double alpha, double rho, int levels,
                            const FamilyOptions& opts = {});

// One coordinate of the level-n centres sum_l rho^l a_l, a_l in {-1/2, 1/2}.
std::vector<double> cantor_atoms(double rho, int level);
// Pairwise differences of cantor_atoms with multiplicities (2 per zero digit).
std::vector<std::pair<double, double>> cantor_differences(double rho, int level);

// k copies of the unit bump with centres i a, i = 1..k, as |a| grows.
FamilyReport translated_bumps(const Params& params, const std::vector<double>& spacings, int k,
                              const FamilyOptions& opts = {});

// (log r)^{-1/(2p)} (log log r)^{-delta/p} r^{-(N+alpha)/(2p)} on [3, r_max].
RadialFunction log_tail(const Params& params, double delta, double r_max, int m);
// Coulomb energy and int |x|^{-(N-alpha)/2} |u|^p along growing r_max.
FamilyReport log_tail_sweep(const Params& params, double delta, const std::vector<double>& r_max_values,
                            const FamilyOptions& opts = {});

struct FamilySpec {
  FamilyKind kind = FamilyKind::sobolev_scaling;
  Params params;
  std::vector<double> range;  // R, n, k, levels, spacings or r_max
  double chain_r = 256.0;     // vanishing_chain
  int lattice_d = 0;          // cube_array; 0 picks the smallest admissible d
  double rho = 0.8;           // cantor_cascade
  int copies = 4;             // translated_bumps
  double delta = 0.75;        // log_tail

  void validate() const;
  nlohmann::json to_json() const;
  static FamilySpec from_json(const nlohmann::json& j);
};

FamilyReport run_family(const FamilySpec& spec, const FamilyOptions& opts = {});

}  // namespace spslab
