#include "spslab/riesz.hpp"

#include "spslab/error.hpp"
#include "spslab/quadrature.hpp"
#include "spslab/simd.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

namespace spslab {

namespace {

void check_dims(int n, double alpha) {
  require(n != 1, ErrorKind::unsupported, "radial reduction requires N >= 2");
  require(n >= 2, ErrorKind::invalid_argument, "dimension must be positive");
  require(alpha > 0.0 && alpha < n, ErrorKind::invalid_argument,
          "Riesz order must satisfy 0 < alpha < N");
}

// N = 3 closed forms in a cancellation-free shape.
// (r+s)^b - |r-s|^b = B^b (1-t)^b (((1+t)/(1-t))^b - 1), t = min/max,
// with (1+t)/(1-t) formed from the exact gap max - min.
double kernel3(double alpha, double r, double s) {
  const double c3 = sphere_pair_constant(3);
  const double big = std::max(r, s), small = std::min(r, s);
  const double beta = alpha - 1.0;
  const double pre = c3 / (2.0 * r * s);
  if (small == big) return pre * std::pow(2.0 * big, beta) / beta;  // alpha > 1 only
  const double gap = big - small;
  const double lg = std::log1p(2.0 * small / gap);
  if (beta == 0.0) return pre * lg;
  const double one_minus = gap / big;
  return pre * std::pow(big, beta) * std::pow(one_minus, beta) * std::expm1(beta * lg) / beta;
}

// J = int_0^1 z^a (1-z)^a (1 - x z)^{-c} dz with eps = 1 - x.
double z_integral(double a, double c, double eps) {
  const double x = 1.0 - eps;
  if (eps > 0.25) {
    const auto& rule = quad::gauss_jacobi01(48, a, a);
    double sum = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k)
      sum += rule.weights[k] * std::pow(1.0 - x * rule.nodes[k], -c);
    return sum;
  }
  // y = 1 - z; the near-singular factor is y + eps (1 - y). Geometric panels
  // toward y = 0, Jacobi weights on the end panels.
  auto g = [&](double y) { return std::pow(y + eps * (1.0 - y), -c); };
  double sum = 0.0;
  double lo = std::min(eps, 0.5);
  {
    const auto& rule = quad::gauss_jacobi01(20, 0.0, a);  // weight t^a on [0,1]
    const double scale = std::pow(lo, a + 1.0);
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      double y = lo * rule.nodes[k];
      sum += scale * rule.weights[k] * std::pow(1.0 - y, a) * g(y);
    }
  }
  const auto& gl = quad::gauss_legendre01(20);
  while (lo < 0.5) {
    double hi = std::min(2.0 * lo, 0.5);
    double len = hi - lo;
    for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
      double y = lo + len * gl.nodes[k];
      sum += len * gl.weights[k] * std::pow(y * (1.0 - y), a) * g(y);
    }
    lo = hi;
  }
  {
    const auto& rule = quad::gauss_jacobi01(20, a, 0.0);  // weight (1-t)^a on [0,1]
    const double scale = std::pow(0.5, a + 1.0);
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      double y = 0.5 + 0.5 * rule.nodes[k];
      sum += scale * rule.weights[k] * std::pow(y, a) * g(y);
    }
  }
  return sum;
}

double kernel_dispatch(int n, double alpha, double r, double s) {
  if (n == 3) return kernel3(alpha, r, s);
  return kernel_value_quadrature(n, alpha, r, s);
}

// K(e^t, e^{t+d}) written through d, so gaps far below the spacing of
// doubles near e^t stay resolved. Requires d != 0.
double kernel_log(int n, double alpha, double t, double d) {
  const double ad = std::fabs(d);
  if (n == 3) {
    const double beta = alpha - 1.0;
    const double pre = sphere_pair_constant(3) / (2.0 * std::exp(2.0 * t + d));
    const double lg = -std::log(std::tanh(0.5 * ad));  // log((1+e^-a)/(1-e^-a))
    if (beta == 0.0) return pre * lg;
    const double big = std::exp(t + std::max(d, 0.0));
    const double one_minus = -std::expm1(-ad);
    return pre * std::pow(big, beta) * std::pow(one_minus, beta) * std::expm1(beta * lg) / beta;
  }
  const double a = 0.5 * (n - 3);
  const double c = 0.5 * (n - alpha);
  const double sum = std::exp(t) * (1.0 + std::exp(d));
  const double th = std::tanh(0.5 * ad);
  return sphere_pair_constant(n) * std::pow(sum, -2.0 * c) * z_integral(a, c, th * th);
}

// ---- Galerkin band for alpha <= 1 ----------------------------------------

struct Hat {
  int idx;  // node position in units of h from the local origin
  bool left, right;
};

struct Integrand {
  int n;
  double alpha, h;
  Hat a, b;
  double phi(const Hat& hat, double t) const {
    double x = t / h - hat.idx;
    if (x < 0) return hat.left ? 1.0 + x : 0.0;
    return hat.right ? 1.0 - x : 0.0;
  }
  // Integrand at (t, tau = t + d); the gap d is passed on its own.
  double operator()(double t, double d) const {
    const double tau = t + d;
    double pa = phi(a, t), pb = phi(b, tau);
    if (pa == 0.0 || pb == 0.0) return 0.0;
    return pa * pb * kernel_log(n, alpha, t, d) * std::exp(n * (t + tau));
  }
};

constexpr int kRadialNodes = 32;
constexpr int kInnerNodes = 16;
constexpr int kFarNodes = 12;

double grading(double alpha) {
  // d = h s^gamma with gamma*alpha an integer, so d^{alpha-1} dd is polynomial in s.
  double k = std::max(2.0, std::ceil(3.0 * alpha));
  return k / alpha;
}

// Cells are [k h, (k+1) h].
template <class F>
double cell_pair(const F& f, int ka, int kb, double h, double gamma) {
  const double ta = ka * h, tb = kb * h;
  if (std::abs(ka - kb) >= 2) {
    const int nf = std::abs(ka - kb) >= 6 ? 4 : kFarNodes;
    const auto& gl = quad::gauss_legendre01(nf);
    double sum = 0.0;
    for (int i = 0; i < nf; ++i)
      for (int j = 0; j < nf; ++j)
        sum += gl.weights[i] * gl.weights[j] * f(ta + h * gl.nodes[i], tb - ta + h * (gl.nodes[j] - gl.nodes[i]));
    return sum * h * h;
  }
  const auto& gs = quad::gauss_legendre01(kRadialNodes);
  const auto& gx = quad::gauss_legendre01(kInnerNodes);
  if (ka == kb) {
    double sum = 0.0;
    for (int i = 0; i < kRadialNodes; ++i) {
      double s = gs.nodes[i];
      double d = h * std::pow(s, gamma);
      double jd = h * gamma * std::pow(s, gamma - 1.0);
      double len = h - d;
      double inner = 0.0;
      for (int j = 0; j < kInnerNodes; ++j) {
        double x = ta + len * gx.nodes[j];
        inner += gx.weights[j] * (f(x, d) + f(x + d, -d));
      }
      sum += gs.weights[i] * jd * len * inner;
    }
    return sum;
  }
  // Adjacent cells meet at the singular corner c; t moves away from c by u,
  // tau by v, and (u, v) is split into two triangles around the diagonal.
  const double c = kb > ka ? tb : ta;
  const double sa = kb > ka ? -1.0 : 1.0;
  double sum = 0.0;
  for (int i = 0; i < kRadialNodes; ++i) {
    double s = gs.nodes[i];
    double rho = h * std::pow(s, gamma);
    double jr = h * gamma * std::pow(s, gamma - 1.0) * rho;
    double inner = 0.0;
    for (int j = 0; j < kInnerNodes; ++j) {
      double w = gx.nodes[j];
      double gap = -sa * rho * (1.0 + w);
      inner += gx.weights[j] * (f(c + sa * rho, gap) + f(c + sa * rho * w, gap));
    }
    sum += gs.weights[i] * jr * inner;
  }
  return sum;
}

// int int phi_a(t) phi_b(tau) K(e^t, e^tau) e^{N(t+tau)} with origin at t = 0.
double galerkin(int n, double alpha, double h, Hat a, Hat b) {
  Integrand f{n, alpha, h, a, b};
  const double gamma = grading(alpha);
  double sum = 0.0;
  for (int ca : {a.idx - 1, a.idx}) {
    if (ca == a.idx - 1 && !a.left) continue;
    if (ca == a.idx && !a.right) continue;
    for (int cb : {b.idx - 1, b.idx}) {
      if (cb == b.idx - 1 && !b.left) continue;
      if (cb == b.idx && !b.right) continue;
      sum += cell_pair(f, ca, cb, h, gamma);
    }
  }
  return sum;
}

double fitted_majorant(int n, double alpha) {
  // K^R / H_alpha depends on r/s only; scan t = r/s in (0, 1].
  double best = 0.0;
  auto probe = [&](double t) {
    if (t >= 1.0 && alpha <= 1.0) return;
    best = std::max(best, kernel_value(n, alpha, t, 1.0) / h_alpha(n, alpha, t, 1.0));
  };
  for (int k = 0; k <= 400; ++k) probe(std::pow(10.0, -8.0 + 8.0 * k / 400.0));
  for (int k = 0; k <= 400; ++k) probe(1.0 - std::pow(10.0, -12.0 + 11.0 * k / 400.0));
  // Margin for pairs that fall between scan points.
  return best * 1.001;
}

template <class T>
void put(std::ostream& os, T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    os.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
  } else {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
}

template <class T>
bool get(std::istream& is, T& v) {
  std::array<unsigned char, sizeof(T)> bytes{};
  if (!is.read(reinterpret_cast<char*>(bytes.data()), sizeof(T))) return false;
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  std::memcpy(&v, bytes.data(), sizeof(T));
  return true;
}

std::string cache_dir_for(const KernelOptions& opts) {
  if (!opts.cache_dir.empty()) return opts.cache_dir;
  const char* env = std::getenv("SPSLAB_CACHE_DIR");
  return env ? std::string(env) : std::string();
}

}  // namespace

double riesz_normalization(int n, double alpha) {
  check_dims(n, alpha);
  return std::tgamma(0.5 * (n - alpha)) /
         (std::tgamma(0.5 * alpha) * std::pow(M_PI, 0.5 * n) * std::pow(2.0, alpha));
}

double sphere_pair_constant(int n) {
  require(n >= 2, ErrorKind::unsupported, "radial reduction requires N >= 2");
  return sphere_area(n) * sphere_area(n - 1) * std::pow(2.0, n - 2);
}

RieszConstants riesz_constants(int n, double alpha) {
  check_dims(n, alpha);
  static std::mutex mu;
  static std::map<std::pair<int, double>, double> majorants;
  RieszConstants c;
  c.n = n;
  c.alpha = alpha;
  c.a_alpha = riesz_normalization(n, alpha);
  c.c_n = sphere_pair_constant(n);
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = majorants.find({n, alpha});
    if (it != majorants.end()) {
      c.h_bound_const = it->second;
      return c;
    }
  }
  double m = fitted_majorant(n, alpha);
  std::lock_guard<std::mutex> lock(mu);
  majorants[{n, alpha}] = m;
  c.h_bound_const = m;
  return c;
}

double kernel_value_quadrature(int n, double alpha, double r, double s) {
  check_dims(n, alpha);
  require(r > 0.0 && s > 0.0, ErrorKind::invalid_argument, "kernel radii must be positive");
  require(r != s || alpha > 1.0, ErrorKind::singular,
          "kernel diagonal is singular for alpha <= 1");
  const double a = 0.5 * (n - 3);
  const double c = 0.5 * (n - alpha);
  const double sum = r + s;
  const double pre = sphere_pair_constant(n) * std::pow(sum, -2.0 * c);
  if (r == s) return pre * std::beta(a - c + 1.0, a + 1.0);
  const double d = (r - s) / sum;
  return pre * z_integral(a, c, d * d);
}

double kernel_value(int n, double alpha, double r, double s) {
  check_dims(n, alpha);
  require(r > 0.0 && s > 0.0, ErrorKind::invalid_argument, "kernel radii must be positive");
  require(r != s || alpha > 1.0, ErrorKind::singular,
          "kernel diagonal is singular for alpha <= 1");
  return kernel_dispatch(n, alpha, r, s);
}

double h_alpha(int n, double alpha, double r, double s) {
  if (alpha > 1.0) return std::pow(r * s, -0.5 * (n - alpha));
  const double pre = std::pow(r * s, -0.5 * (n - 1));
  const double gap = std::fabs(r - s);
  if (alpha == 1.0) return pre * std::log(2.0 * (r + s) / gap);
  return pre * std::pow(gap, alpha - 1.0);
}

KernelMatrix::KernelMatrix(GridPtr grid, double alpha, int band, std::vector<double> entries)
    : grid_(std::move(grid)), alpha_(alpha), band_(band), k_(std::move(entries)) {
  require(k_.size() == static_cast<std::size_t>(grid_->m()) * grid_->m(),
          ErrorKind::invalid_argument, "kernel entries do not match grid size");
}

KernelPtr KernelMatrix::rescaled(GridPtr scaled_grid) const {
  const auto& g = *grid_;
  require(scaled_grid->m() == g.m() && scaled_grid->n() == g.n() &&
              std::fabs(scaled_grid->h() - g.h()) <= 1e-14 * g.h(),
          ErrorKind::invalid_argument, "rescaled grid must be a dilation of the kernel grid");
  const double factor = scaled_grid->r_min() / g.r_min();
  const double mult = std::pow(factor, -(g.n() - alpha_));
  std::vector<double> e(k_);
  for (double& v : e) v *= mult;
  return std::make_shared<KernelMatrix>(std::move(scaled_grid), alpha_, band_, std::move(e));
}

KernelPtr assemble_kernel(GridPtr grid, double alpha, const KernelOptions& opts) {
  require(grid != nullptr, ErrorKind::invalid_argument, "kernel needs a grid");
  const int n = grid->n();
  check_dims(n, alpha);
  const int m = grid->m();
  if (m > opts.max_m) {
    std::ostringstream os;
    os << "kernel of size " << m << "x" << m << " exceeds the cap m <= " << opts.max_m
       << "; use fewer nodes or raise max_m";
    fail(ErrorKind::capacity, os.str());
  }
  const int band = alpha > 1.0 ? 0 : (opts.band < 0 ? m - 1 : std::min(opts.band, m - 1));

  const std::string dir = cache_dir_for(opts);
  std::string path;
  if (!dir.empty()) {
    path = (std::filesystem::path(dir) / kernel_cache_name(*grid, alpha, band)).string();
    if (auto hit = load_kernel(path, grid, alpha, band)) return hit;
  }

  const double amp = riesz_normalization(n, alpha);
  const double h = grid->h();
  const double deg = n - alpha;
  const std::size_t mm = static_cast<std::size_t>(m);

  // Homogeneity: K(r_i, r_j) = r_i^{-(N-alpha)} K(1, e^{(j-i)h}).
  std::vector<double> profile(mm, 0.0);
  for (int d = (alpha > 1.0 ? 0 : 1); d < m; ++d)
    profile[d] = kernel_dispatch(n, alpha, 1.0, std::exp(d * h));

  std::vector<double> k(mm * mm);
  for (int i = 0; i < m; ++i) {
    const double sc = amp * std::pow(grid->r(i), -deg);
    for (int j = i; j < m; ++j) k[i * mm + j] = sc * profile[j - i];
  }

  if (band > 0) {
    // Interior hats share one template per offset; only hats at the two ends
    // of the grid (one-sided) need their own integrals.
    const auto& w = grid->weights();
    std::vector<double> interior(band + 1);
    for (int d = 0; d <= band; ++d)
      interior[d] = galerkin(n, alpha, h, Hat{0, true, true}, Hat{d, true, true});
    for (int i = 0; i < m; ++i) {
      const double ti = std::log(grid->r(i));
      const double shift = amp * std::exp((n + alpha) * ti);
      for (int j = i; j <= std::min(m - 1, i + band); ++j) {
        const bool edge = i == 0 || j == m - 1;
        double g;
        if (edge) {
          g = galerkin(n, alpha, h, Hat{0, i > 0, i < m - 1}, Hat{j - i, j > 0, j < m - 1});
        } else {
          g = interior[j - i];
        }
        k[i * mm + j] = shift * g / (w[i] * w[j]);
      }
    }
  }

  for (int i = 0; i < m; ++i)
    for (int j = 0; j < i; ++j) k[i * mm + j] = k[j * mm + i];

  auto result = std::make_shared<KernelMatrix>(grid, alpha, band, std::move(k));
  if (!path.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    try {
      save_kernel(*result, path);
    } catch (const Error&) {
      // A read-only cache directory only costs reassembly next time.
    }
  }
  return result;
}

std::vector<double> abs_pow(const std::vector<double>& u, double p) {
  std::vector<double> f(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    double a = std::fabs(u[i]);
    f[i] = p == 1.0 ? a : (p == 2.0 ? a * a : std::pow(a, p));
  }
  return f;
}

double coulomb_form(const std::vector<double>& f, const std::vector<double>& g,
                    const KernelMatrix& k) {
  const auto& w = k.grid().weights();
  const std::size_t m = w.size();
  require(f.size() == m && g.size() == m, ErrorKind::invalid_argument,
          "density does not match kernel grid");
  std::vector<double> wf(m), wg(m), y(m);
  for (std::size_t i = 0; i < m; ++i) {
    wf[i] = w[i] * f[i];
    wg[i] = w[i] * g[i];
  }
  simd::matvec(k.data(), wf.data(), y.data(), m);
  return simd::dot(wg.data(), y.data(), m);
}

double coulomb_form(const std::vector<double>& f, const KernelMatrix& k) {
  return coulomb_form(f, f, k);
}

double coulomb_energy(const RadialFunction& u, double p, const KernelMatrix& k) {
  require(u.grid && u.grid->same_as(k.grid()), ErrorKind::invalid_argument,
          "function and kernel live on different grids");
  return std::max(0.0, coulomb_form(abs_pow(u.values, p), k));
}

RadialFunction riesz_apply(const RadialFunction& f, const KernelMatrix& k) {
  require(f.grid && f.grid->same_as(k.grid()), ErrorKind::invalid_argument,
          "function and kernel live on different grids");
  const auto& w = k.grid().weights();
  const std::size_t m = w.size();
  std::vector<double> wf(m), y(m);
  for (std::size_t i = 0; i < m; ++i) wf[i] = w[i] * f.values[i];
  simd::matvec(k.data(), wf.data(), y.data(), m);
  const double inv = 1.0 / k.grid().surface_const();
  for (double& v : y) v *= inv;
  return RadialFunction(f.grid, std::move(y));
}

double riesz_apply_at(const RadialFunction& f, const KernelMatrix& k, double r) {
  const auto& g = k.grid();
  const double amp = riesz_normalization(g.n(), k.alpha());
  double sum = 0.0;
  for (int j = 0; j < g.m(); ++j) {
    if (f.values[j] == 0.0) continue;
    sum += g.weights()[j] * kernel_dispatch(g.n(), k.alpha(), r, g.r(j)) * f.values[j];
  }
  return amp * sum / g.surface_const();
}

double q_norm(const RadialFunction& u, double p, const KernelMatrix& k) {
  return std::pow(coulomb_energy(u, p, k), 1.0 / (2.0 * p));
}

std::string kernel_cache_name(const RadialGrid& grid, double alpha, int band) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "kernel_n%d_a%016llx_b%d_%016llx.spsk", grid.n(),
                static_cast<unsigned long long>(std::bit_cast<std::uint64_t>(alpha)), band,
                static_cast<unsigned long long>(grid.hash()));
  return buf;
}

void save_kernel(const KernelMatrix& k, const std::string& path) {
  const auto& g = k.grid();
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(os), ErrorKind::io, "cannot write kernel cache " + tmp);
    os.write("SPSK", 4);
    put<std::uint32_t>(os, kKernelCacheVersion);
    put<std::int32_t>(os, g.n());
    put<double>(os, k.alpha());
    put<std::uint64_t>(os, g.hash());
    put<std::int32_t>(os, g.m());
    put<std::int32_t>(os, k.band());
    put<double>(os, g.r_min());
    put<double>(os, g.h());
    const std::size_t total = static_cast<std::size_t>(g.m()) * g.m();
    if constexpr (std::endian::native == std::endian::little) {
      os.write(reinterpret_cast<const char*>(k.data()), total * sizeof(double));
    } else {
      for (std::size_t i = 0; i < total; ++i) put<double>(os, k.data()[i]);
    }
    require(static_cast<bool>(os), ErrorKind::io, "short write to kernel cache " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  require(!ec, ErrorKind::io, "cannot move kernel cache into place: " + path);
}

KernelPtr load_kernel(const std::string& path, GridPtr grid, double alpha, int band) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return nullptr;
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "SPSK", 4) != 0) return nullptr;
  std::uint32_t version;
  std::int32_t n, m, b;
  double a, r_min, h;
  std::uint64_t hash;
  if (!get(is, version) || version != kKernelCacheVersion) return nullptr;
  if (!get(is, n) || !get(is, a) || !get(is, hash) || !get(is, m) || !get(is, b) ||
      !get(is, r_min) || !get(is, h))
    return nullptr;
  if (n != grid->n() || a != alpha || hash != grid->hash() || m != grid->m() || b != band ||
      r_min != grid->r_min() || h != grid->h())
    return nullptr;
  const std::size_t total = static_cast<std::size_t>(m) * m;
  std::vector<double> e(total);
  for (std::size_t i = 0; i < total; ++i)
    if (!get(is, e[i])) return nullptr;
  return std::make_shared<KernelMatrix>(std::move(grid), alpha, band, std::move(e));
}

}  // namespace spslab
