#pragma once

#include <vector>

namespace spslab::quad {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Jacobi rule on [0,1] for the weight (1-t)^a t^b, a, b > -1.
// Rules are cached; the returned reference stays valid for the process lifetime.
const Rule& gauss_jacobi01(int n, double a, double b);

// Gauss-Legendre rule on [0,1].
inline const Rule& gauss_legendre01(int n) { return gauss_jacobi01(n, 0.0, 0.0); }

}  // namespace spslab::quad
