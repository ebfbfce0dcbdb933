#pragma once

// Slow, independent reference computations.  None of these share code paths
// with the library beyond the density and gamma evaluators.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "qfock/integrate.hpp"
#include "qfock/involution.hpp"

namespace oracle {

// <g, h>_q of two words as sum over permutations sigma with h_{sigma(i)} = g_i
// of q^{inversions(sigma)}.
inline double gram_by_permutations(const std::vector<int>& g, const std::vector<int>& h,
                                   double q) {
  if (g.size() != h.size()) return 0.0;
  std::vector<int> p(g.size());
  std::iota(p.begin(), p.end(), 0);
  double s = 0.0;
  do {
    bool match = true;
    for (std::size_t i = 0; i < g.size() && match; ++i) match = h[p[i]] == g[i];
    if (!match) continue;
    int inv = 0;
    for (std::size_t i = 0; i < p.size(); ++i)
      for (std::size_t j = i + 1; j < p.size(); ++j) inv += p[i] > p[j];
    s += std::pow(q, inv);
  } while (std::next_permutation(p.begin(), p.end()));
  return s;
}

// <e_0, J^m e_0> for the one-mode Jacobi matrix J (off-diagonal sqrt([n]_q)),
// by propagating the vector through m steps.
inline double jacobi_moment(int m, double q) {
  std::vector<double> v(m + 2, 0.0), w(m + 2, 0.0);
  v[0] = 1.0;
  auto b = [q](int n) { return std::sqrt((1.0 - std::pow(q, n)) / (1.0 - q)); };
  for (int step = 0; step < m; ++step) {
    std::fill(w.begin(), w.end(), 0.0);
    for (int n = 0; n <= m; ++n) {
      if (v[n] == 0.0) continue;
      w[n + 1] += b(n + 1) * v[n];
      if (n > 0) w[n - 1] += b(n) * v[n];
    }
    std::swap(v, w);
  }
  return v[0];
}

// Orthonormal q-Hermite value h_k(x) by its own recurrence.
inline double hermite_orthonormal(int k, double x, double q) {
  double prev = 0.0, cur = 1.0;
  for (int n = 0; n < k; ++n) {
    const double bn1 = std::sqrt((1.0 - std::pow(q, n + 1)) / (1.0 - q));
    const double bn = n > 0 ? std::sqrt((1.0 - std::pow(q, n)) / (1.0 - q)) : 0.0;
    const double next = (x * cur - bn * prev) / bn1;
    prev = cur;
    cur = next;
  }
  return cur;
}

// w~_k1 = int h_k(x) gamma(x) dnu_q by adaptive Gauss-Kronrod in theta on each
// half of the support, gamma evaluated pointwise.
inline double w_ortho_k1(const qfock::GammaMap& g, int k, double tol = 1e-12) {
  const auto& dens = g.cdf().density();
  const double q = g.context().q();
  const auto f = [&](double theta) {
    const double x = dens.x_of_theta(theta);
    return dens.evaluate_theta(theta) * hermite_orthonormal(k, x, q) * g(x);
  };
  const double half = 0.5 * std::numbers::pi;
  return qfock::integrate_adaptive(f, 0.0, half, tol, tol, 20000).value +
         qfock::integrate_adaptive(f, half, std::numbers::pi, tol, tol, 20000).value;
}

}  // namespace oracle
