#pragma once

#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "qfock/qcontext.hpp"

namespace qfock {

// ---------------------------------------------------------------------------
// q-arithmetic
// ---------------------------------------------------------------------------

/// [n]_q = (1 - q^n)/(1 - q).  Throws std::invalid_argument unless 0 < q < 1.
double q_bracket(int n, double q);

/// [n]_q! = [1]_q [2]_q ... [n]_q, with [0]_q! = 1.
double q_factorial(int n, double q);

/// log([n]_q!), usable far beyond the range where q_factorial overflows.
double log_q_factorial(int n, double q);

/// Result of a (possibly infinite) q-Pochhammer product.
struct PochhammerResult {
  std::complex<double> value;
  int factors = 0;          ///< number of factors actually multiplied
  double tail_bound = 0.0;  ///< bound on |log(remaining tail)|; 0 for finite n
};

/// (a; q)_n = prod_{k=0}^{n-1} (1 - a q^k).
std::complex<double> q_pochhammer(std::complex<double> a, double q, int n);

/// (a; q)_infinity truncated after M factors, M the smallest count with
/// |a| q^M / (1 - q) < tol.
PochhammerResult q_pochhammer_inf(std::complex<double> a, double q, double tol);

// ---------------------------------------------------------------------------
// q-Gaussian density
// ---------------------------------------------------------------------------

/// Density of the q-Gaussian law nu_q on [-L, L].
///
/// With 2 cos(theta) = x sqrt(1-q) the density reads
///   (1/pi) sqrt(1-q) sin(theta) (q;q)_inf |(q e^{2 i theta}; q)_inf|^2,
/// the complex pair (q v^2, q v^-2; q)_inf being evaluated as a squared
/// modulus, which keeps the value real and nonnegative.
class DensityModel {
 public:
  explicit DensityModel(const QContext& ctx);

  const QContext& context() const noexcept { return ctx_; }
  int product_order() const noexcept { return static_cast<int>(powers_.size()); }

  /// nu_q'(x); zero for |x| >= L.
  double evaluate(double x) const;

  /// Density of the pushforward onto theta in [0, pi] (x = L cos theta):
  /// nu_q'(x(theta)) * L sin(theta).  Integrates to one over [0, pi].
  double evaluate_theta(double theta) const;

  /// L cos(theta).
  double x_of_theta(double theta) const;
  /// arccos(x/L), clamped to [0, pi].
  double theta_of_x(double x) const;

 private:
  QContext ctx_;
  double qq_inf_;               // (q;q)_inf
  std::vector<double> powers_;  // q^{k+1}, k < M
};

/// int x^m dnu_q by adaptive Gauss-Kronrod in theta, independent of the
/// Jacobi-matrix rule; m = 0 gives the total mass.
double density_moment(const DensityModel& density, int m, double tol = 1e-13);

// ---------------------------------------------------------------------------
// continuous q-Hermite polynomials (monic)
// ---------------------------------------------------------------------------

/// H_n(x): H_0 = 1, H_1 = x, H_{n+1} = x H_n - [n]_q H_{n-1}.
double hermite_eval(int n, double x, double q);

/// Orthonormal values h_k(x) = H_k(x)/sqrt([k]_q!) for k = 0..out.size()-1.
/// Stable for degrees where [k]_q! itself would overflow.
void hermite_orthonormal(double x, double q, std::span<double> out);

// ---------------------------------------------------------------------------
// quadrature rules for nu_q
// ---------------------------------------------------------------------------

/// Discrete approximation sum_i weights[i] f(nodes[i]) of int f dnu_q.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  double integrate(auto&& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
    return s;
  }
};

/// Gauss rule for nu_q from the eigen-decomposition of the truncated Jacobi
/// matrix (zero diagonal, off-diagonal sqrt([n]_q)).  Exact for polynomials of
/// degree <= 2 n_nodes - 1.
QuadratureRule quadrature(const QContext& ctx, int n_nodes);

}  // namespace qfock
