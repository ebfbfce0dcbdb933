#include "qfock/qspecial.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qfock/integrate.hpp"

namespace qfock {

namespace {

void require_open_unit(double q, const char* where) {
  if (!(q > 0.0 && q < 1.0)) {
    throw std::invalid_argument(std::string(where) + ": q must lie in (0, 1), got " +
                                std::to_string(q));
  }
}

// Smallest M with |a| q^M / (1 - q) < tol.
int factor_count(double abs_a, double q, double tol) {
  if (abs_a == 0.0) return 0;
  int m = 0;
  double bound = abs_a / (1.0 - q);
  while (bound >= tol) {
    bound *= q;
    ++m;
  }
  return m;
}

}  // namespace

double q_bracket(int n, double q) {
  require_open_unit(q, "q_bracket");
  if (n < 0) throw std::invalid_argument("q_bracket: n must be nonnegative");
  return (1.0 - std::pow(q, n)) / (1.0 - q);
}

double q_factorial(int n, double q) {
  require_open_unit(q, "q_factorial");
  if (n < 0) throw std::invalid_argument("q_factorial: n must be nonnegative");
  double f = 1.0;
  for (int j = 1; j <= n; ++j) f *= q_bracket(j, q);
  return f;
}

double log_q_factorial(int n, double q) {
  require_open_unit(q, "log_q_factorial");
  if (n < 0) throw std::invalid_argument("log_q_factorial: n must be nonnegative");
  double s = 0.0;
  double qj = 1.0;
  for (int j = 1; j <= n; ++j) {
    qj *= q;
    s += std::log1p(-qj) - std::log1p(-q);
  }
  return s;
}

std::complex<double> q_pochhammer(std::complex<double> a, double q, int n) {
  require_open_unit(q, "q_pochhammer");
  if (n < 0) throw std::invalid_argument("q_pochhammer: n must be nonnegative");
  std::complex<double> p = 1.0;
  std::complex<double> aqk = a;
  for (int k = 0; k < n; ++k) {
    p *= 1.0 - aqk;
    aqk *= q;
  }
  return p;
}

PochhammerResult q_pochhammer_inf(std::complex<double> a, double q, double tol) {
  require_open_unit(q, "q_pochhammer_inf");
  if (!(tol > 0.0)) throw std::invalid_argument("q_pochhammer_inf: tol must be positive");
  const int m = factor_count(std::abs(a), q, tol);
  PochhammerResult r;
  r.value = q_pochhammer(a, q, m);
  r.factors = m;
  r.tail_bound = std::abs(a) * std::pow(q, m) / (1.0 - q);
  return r;
}

// ---------------------------------------------------------------------------

DensityModel::DensityModel(const QContext& ctx) : ctx_(ctx), qq_inf_(0.0) {
  const double q = ctx.q();
  // factors of (q e^{2 i theta}; q)_inf have |a| = q
  const int m = factor_count(q, q, ctx.tol_product());
  powers_.resize(m);
  double p = q;
  for (int k = 0; k < m; ++k) {
    powers_[k] = p;
    p *= q;
  }
  double log_qq = 0.0;
  for (double pk : powers_) log_qq += std::log1p(-pk);
  qq_inf_ = log_qq;  // stored in log form; the product underflows as q -> 1
}

namespace {

// log[(q;q)_inf |(q e^{2 i theta}; q)_inf|^2] with running exponent tracking.
double log_core(const std::vector<double>& powers, double log_qq, double theta) {
  // 1 - 2p cos(2 theta) + p^2 written without cancellation near theta = 0, pi
  const double s = std::sin(theta);
  const double s2 = 4.0 * s * s;
  double mant = 1.0;
  long exp2 = 0;
  std::size_t k = 0;
  for (double p : powers) {
    mant *= (1.0 - p) * (1.0 - p) + p * s2;
    if ((++k & 31u) == 0) {
      int e = 0;
      mant = std::frexp(mant, &e);
      exp2 += e;
    }
  }
  return std::log(mant) + static_cast<double>(exp2) * std::numbers::ln2 + log_qq;
}

}  // namespace

double DensityModel::evaluate_theta(double theta) const {
  const double s = std::sin(theta);
  if (s <= 0.0) return 0.0;
  return (2.0 / std::numbers::pi) * s * s * std::exp(log_core(powers_, qq_inf_, theta));
}

double DensityModel::evaluate(double x) const {
  const double L = ctx_.support();
  if (!(std::abs(x) < L)) return 0.0;
  const double theta = std::acos(x / L);
  const double s = std::sin(theta);
  return std::sqrt(1.0 - ctx_.q()) * s / std::numbers::pi *
         std::exp(log_core(powers_, qq_inf_, theta));
}

double DensityModel::x_of_theta(double theta) const {
  return ctx_.support() * std::cos(theta);
}

double DensityModel::theta_of_x(double x) const {
  const double r = std::clamp(x / ctx_.support(), -1.0, 1.0);
  return std::acos(r);
}

double density_moment(const DensityModel& density, int m, double tol) {
  if (m < 0) throw std::invalid_argument("density_moment: order must be nonnegative");
  const auto f = [&](double theta) {
    return density.evaluate_theta(theta) * std::pow(density.x_of_theta(theta), m);
  };
  // split at pi/2 so odd moments integrate two mirror halves
  const double half = 0.5 * std::numbers::pi;
  return integrate_adaptive(f, 0.0, half, tol, tol).value +
         integrate_adaptive(f, half, std::numbers::pi, tol, tol).value;
}

// ---------------------------------------------------------------------------

double hermite_eval(int n, double x, double q) {
  require_open_unit(q, "hermite_eval");
  if (n < 0) throw std::invalid_argument("hermite_eval: n must be nonnegative");
  if (n == 0) return 1.0;
  double hm1 = 1.0;
  double h = x;
  double qk = 1.0;
  for (int k = 1; k < n; ++k) {
    qk *= q;
    const double bracket = (1.0 - qk) / (1.0 - q);
    const double next = x * h - bracket * hm1;
    hm1 = h;
    h = next;
  }
  return h;
}

void hermite_orthonormal(double x, double q, std::span<double> out) {
  if (out.empty()) return;
  out[0] = 1.0;
  if (out.size() == 1) return;
  out[1] = x;
  double qk = q;  // q^k for k = 1
  double sqrt_bk = 1.0;
  for (std::size_t k = 1; k + 1 < out.size(); ++k) {
    qk *= q;
    const double sqrt_bk1 = std::sqrt((1.0 - qk) / (1.0 - q));
    out[k + 1] = (x * out[k] - sqrt_bk * out[k - 1]) / sqrt_bk1;
    sqrt_bk = sqrt_bk1;
  }
}

QuadratureRule quadrature(const QContext& ctx, int n_nodes) {
  if (n_nodes < 1) throw std::invalid_argument("quadrature: n_nodes must be >= 1");
  const double q = ctx.q();
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n_nodes);
  Eigen::VectorXd sub(std::max(0, n_nodes - 1));
  for (int n = 1; n < n_nodes; ++n) sub[n - 1] = std::sqrt(q_bracket(n, q));

  QuadratureRule rule;
  if (n_nodes == 1) {
    rule.nodes = {0.0};
    rule.weights = {1.0};
    return rule;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("quadrature: Jacobi eigen-decomposition failed for n_nodes = " +
                             std::to_string(n_nodes));
  }
  rule.nodes.resize(n_nodes);
  rule.weights.resize(n_nodes);
  for (int i = 0; i < n_nodes; ++i) {
    rule.nodes[i] = es.eigenvalues()[i];
    const double v0 = es.eigenvectors()(0, i);
    rule.weights[i] = v0 * v0;
  }
  return rule;
}

}  // namespace qfock
