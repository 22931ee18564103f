#pragma once

#include "json.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace spslab {

// Log-uniform radial grid r_j = r_min e^{jh}, j = 0..m-1.
//
// Functions are read as piecewise linear in t = log r and zero outside
// [r_min, r_max]. The weights integrate f(r) r^{N-1} dr exactly for such
// functions, so the Jacobian is part of w_j and the sphere area is not.
class RadialGrid {
 public:
  static std::shared_ptr<const RadialGrid> make(double r_min, double r_max, int m, int n);

  double r_min() const { return r_.front(); }
  double r_max() const { return r_.back(); }
  int m() const { return static_cast<int>(r_.size()); }
  int n() const { return n_; }
  double h() const { return h_; }
  double surface_const() const { return omega_; }
  double r(int j) const { return r_[j]; }
  const std::vector<double>& radii() const { return r_; }
  const std::vector<double>& weights() const { return w_; }
  // Dirichlet-form coefficients: D = sum_j s_j (u_{j+1} - u_j)^2 with u_m = 0.
  const std::vector<double>& stiffness() const { return s_; }
  std::uint64_t hash() const { return hash_; }

  // Same grid with every radius multiplied by factor.
  std::shared_ptr<const RadialGrid> scaled(double factor) const;

  bool same_as(const RadialGrid& other) const;
  nlohmann::json to_json() const;

  struct Token {};
  RadialGrid(Token, double r_min, double h, int m, int n);

 private:
  int n_;
  double h_;
  double omega_;
  std::vector<double> r_, w_, s_;
  std::uint64_t hash_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

double sphere_area(int n);  // |S^{n-1}| = 2 pi^{n/2} / Gamma(n/2)

struct RadialFunction {
  GridPtr grid;
  std::vector<double> values;

  RadialFunction() = default;
  RadialFunction(GridPtr g, std::vector<double> v);
  static RadialFunction zeros(GridPtr g);
  static RadialFunction sample(GridPtr g, const std::function<double(double)>& f);

  int m() const { return static_cast<int>(values.size()); }
  double operator[](int j) const { return values[j]; }
  double max_abs() const;
};

double integrate(const RadialFunction& f);  // omega * sum_j w_j f_j
double lq_norm(const RadialFunction& u, double q);
double lq_power(const RadialFunction& u, double q);  // int |u|^q
double dirichlet_energy(const RadialFunction& u);
RadialFunction dilate(const RadialFunction& u, int k);
RadialFunction scale(const RadialFunction& u, double c);

// Linear interpolation in log r; zero outside the grid.
double interpolate(const RadialFunction& u, double r);

std::string to_csv(const RadialFunction& u);
nlohmann::json to_json(const RadialFunction& u);
RadialFunction radial_function_from_json(const nlohmann::json& j);

}  // namespace spslab
