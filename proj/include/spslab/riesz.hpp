#pragma once

#include "spslab/radialgrid.hpp"

#include <memory>
#include <string>
#include <vector>

namespace spslab {

struct RieszConstants {
  int n = 3;
  double alpha = 2.0;
  double a_alpha = 0.0;        // Riesz normalization A_alpha
  double c_n = 0.0;            // |S^{N-1}| |S^{N-2}| 2^{N-2}
  double h_bound_const = 0.0;  // sup K^R / H_alpha over r, s
};

RieszConstants riesz_constants(int n, double alpha);
double riesz_normalization(int n, double alpha);  // A_alpha
double sphere_pair_constant(int n);               // C_N

// Radial kernel K^R(r,s) = int_{S^{N-1}} int_{S^{N-1}} |r u - s v|^{-(N-alpha)} du dv,
// without the A_alpha factor. N = 3 uses closed forms; other N the z-integral.
double kernel_value(int n, double alpha, double r, double s);
// The z-integral path, for every N >= 2.
double kernel_value_quadrature(int n, double alpha, double r, double s);
// Majorant H_alpha(r, s) of the kernel.
double h_alpha(int n, double alpha, double r, double s);

class KernelMatrix;
using KernelPtr = std::shared_ptr<const KernelMatrix>;

// Dense symmetric matrix k_ij = A_alpha K^R(r_i, r_j). For alpha <= 1 the
// entries with |i-j| <= band hold Galerkin averages of the singular kernel
// against the hat functions of the grid, divided by w_i w_j.
class KernelMatrix {
 public:
  KernelMatrix(GridPtr grid, double alpha, int band, std::vector<double> entries);

  const RadialGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  double alpha() const { return alpha_; }
  int m() const { return grid_->m(); }
  int band() const { return band_; }
  double operator()(int i, int j) const { return k_[static_cast<std::size_t>(i) * m() + j]; }
  const double* data() const { return k_.data(); }

  // Kernel for the same grid scaled by a constant factor: entries pick up
  // factor^{-(N-alpha)}; no reassembly.
  KernelPtr rescaled(GridPtr scaled_grid) const;

 private:
  GridPtr grid_;
  double alpha_;
  int band_;
  std::vector<double> k_;
};

struct KernelOptions {
  int max_m = 8192;
  // Diagonals |i-j| <= band get Galerkin entries when alpha <= 1; negative
  // means every entry.
  int band = -1;
  // Directory for the binary cache; empty means SPSLAB_CACHE_DIR, and no
  // caching when that is unset too.
  std::string cache_dir;
};

KernelPtr assemble_kernel(GridPtr grid, double alpha, const KernelOptions& opts = {});

// Bilinear form sum_ij w_i w_j f_i k_ij g_j for densities sampled on the grid.
double coulomb_form(const std::vector<double>& f, const KernelMatrix& k);
double coulomb_form(const std::vector<double>& f, const std::vector<double>& g,
                    const KernelMatrix& k);
// int |I_{alpha/2} * |u|^p|^2
double coulomb_energy(const RadialFunction& u, double p, const KernelMatrix& k);
// I_alpha * f at the grid nodes.
RadialFunction riesz_apply(const RadialFunction& f, const KernelMatrix& k);
// I_alpha * f at an arbitrary radius off the grid nodes (direct sum).
double riesz_apply_at(const RadialFunction& f, const KernelMatrix& k, double r);
double q_norm(const RadialFunction& u, double p, const KernelMatrix& k);

std::vector<double> abs_pow(const std::vector<double>& u, double p);

// Binary cache: "SPSK" magic, u32 version, i32 n, f64 alpha, u64 grid hash,
// i32 m, i32 band, f64 r_min, f64 h, then m*m little-endian f64 entries.
inline constexpr unsigned kKernelCacheVersion = 1;
void save_kernel(const KernelMatrix& k, const std::string& path);
// Returns nullptr when the file is missing or does not match the grid.
KernelPtr load_kernel(const std::string& path, GridPtr grid, double alpha, int band);
std::string kernel_cache_name(const RadialGrid& grid, double alpha, int band);

}  // namespace spslab
