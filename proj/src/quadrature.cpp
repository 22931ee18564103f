#include "spslab/quadrature.hpp"

#include "spslab/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

namespace spslab::quad {

namespace {

// Golub-Welsch on [-1,1] for (1-x)^a (1+x)^b.
Rule build(int n, double a, double b) {
  Eigen::VectorXd diag(n), sub(std::max(n - 1, 1));
  for (int k = 0; k < n; ++k) {
    double s = 2.0 * k + a + b;
    diag(k) = (k == 0) ? (b - a) / (a + b + 2.0) : (b * b - a * a) / (s * (s + 2.0));
  }
  for (int k = 1; k < n; ++k) {
    double s = 2.0 * k + a + b;
    double beta;
    if (k == 1)
      beta = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b) * (2.0 + a + b) * (3.0 + a + b));
    else
      beta = 4.0 * k * (k + a) * (k + b) * (k + a + b) / (s * s * (s + 1.0) * (s - 1.0));
    sub(k - 1) = std::sqrt(beta);
  }
  double mu0 = std::exp((a + b + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) +
                        std::lgamma(b + 1.0) - std::lgamma(a + b + 2.0));
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  if (n == 1) {
    r.nodes[0] = diag(0);
    r.weights[0] = mu0;
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::ComputeEigenvectors);
    require(es.info() == Eigen::Success, ErrorKind::assertion, "Golub-Welsch eigensolve failed");
    for (int i = 0; i < n; ++i) {
      r.nodes[i] = es.eigenvalues()(i);
      double v = es.eigenvectors()(0, i);
      r.weights[i] = mu0 * v * v;
    }
  }
  // Map to [0,1]: t = (1+x)/2, weight (1-t)^a t^b dt.
  double scale = std::exp(-(a + b + 1.0) * std::log(2.0));
  for (int i = 0; i < n; ++i) {
    r.nodes[i] = 0.5 * (1.0 + r.nodes[i]);
    r.weights[i] *= scale;
  }
  return r;
}

}  // namespace

const Rule& gauss_jacobi01(int n, double a, double b) {
  require(n >= 1, ErrorKind::invalid_argument, "quadrature order must be positive");
  require(a > -1.0 && b > -1.0, ErrorKind::invalid_argument, "Jacobi exponents must exceed -1");
  static std::mutex mutex;
  static std::map<std::tuple<int, double, double>, std::unique_ptr<Rule>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto key = std::make_tuple(n, a, b);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, std::make_unique<Rule>(build(n, a, b))).first;
  return *it->second;
}

}  // namespace spslab::quad
