#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace spslab {

using Rational = boost::multiprecision::cpp_rational;

// A real parameter that remembers its exact rational value when it has one.
// Values built from integers, decimal strings or fractions are exact; values
// built from a double are treated as inexact.
class Number {
 public:
  Number() = default;
  Number(int v);     // NOLINT(google-explicit-constructor)
  Number(double v);  // NOLINT(google-explicit-constructor)

  static Number parse(std::string_view text);
  static Number exact(const Rational& r);

  double value() const { return value_; }
  bool is_exact() const { return exact_.has_value(); }
  const Rational& rational() const;
  std::string str() const;

 private:
  double value_ = 0.0;
  std::optional<Rational> exact_;
};

double to_double(const Rational& r);
std::string to_string(const Rational& r);

struct Params {
  int n = 3;
  Number alpha = 2;
  Number p = 2;
  Number q = 4;

  // Throws invalid_argument naming the violated invariant.
  void validate() const;
  bool exact() const { return alpha.is_exact() && p.is_exact() && q.is_exact(); }
  Params with_q(Number new_q) const;
  std::string str() const;
};

// +infinity sentinel for exponents that do not exist in low dimension.
struct ExtendedReal {
  bool infinite = false;
  double value = 0.0;
  static ExtendedReal infinity() { return {true, 0.0}; }
  static ExtendedReal finite(double v) { return {false, v}; }
};

struct Exponents {
  std::optional<double> theta;
  std::optional<double> sigma;
  ExtendedReal q_sobolev;
  double q_cs = 0.0;
  std::optional<double> q_rad;
  std::optional<double> c_star;
  std::optional<std::pair<double, double>> beta_interval;

  // Exact values, present when every input is rational.
  std::optional<Rational> theta_exact;
  std::optional<Rational> q_sobolev_exact;
  std::optional<Rational> q_cs_exact;
  std::optional<Rational> q_rad_exact;
};

enum class Regime {
  no_embedding,
  critical_endpoint,
  existence_general,
  existence_radial_only,
  eigenvalue_critical,
  nonexistence,
  double_critical_open,
};

const char* to_string(Regime r);

struct RegimeReport {
  bool q = false;
  bool q0 = false;
  bool qrad = false;
  bool qrad0 = false;
  bool qrad3 = false;
  bool p = false;
  Regime classification = Regime::no_embedding;
  std::string annotation;
  bool exact = false;
};

// Comparison tolerance used for inexact inputs.
inline constexpr double kBoundaryTol = 1e-12;

double theta_of(const Params& params);
std::optional<Rational> theta_exact(const Params& params);
Exponents critical_exponents(const Params& params);
RegimeReport classify(const Params& params);
double sigma_of(const Params& params);
double c_star_of(const Params& params);

bool is_cs_critical(const Params& params);
bool is_double_critical(const Params& params);
double q_cs_of(const Params& params);

// Radial decay exponent for interpolation weight theta.
double decay_beta(const Params& params, double theta);
double decay_theta_min(const Params& params);

}  // namespace spslab
