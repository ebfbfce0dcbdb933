#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qfock/transform.hpp"

namespace qfock {

/// <Omega, (X_0 + X_1)^4 Omega>_q = 8 + 4q.
double m4_sum_analytic(double q);

/// Number of pair partitions of {1..order} with c crossings, indexed by c.
/// Enumerates all (order-1)!! pairings; order must be even and <= 12.
std::vector<long long> pair_partition_coefficients(int order);

/// sum over pair partitions of q^crossings = <Omega, X_0^order Omega>_q.
/// Odd orders give 0.  Throws std::invalid_argument for order > 12.
double moment_pair_partitions(int order, double q);

/// ||(X_0 + X_1)^2 Omega||_q^2 on the two-mode space truncated at level N >= 5.
double m4_sum_operator(double q, int N);

struct SeriesValue {
  double value = 0.0;       ///< sum_{k=1}^K w_k1^2 q^k [k]_q!
  double tail_bound = 0.0;  ///< q^{K+1} (1 - captured mass)
  double mass = 0.0;        ///< sum_{k<=K} w_k1^2 [k]_q!
  int terms = 0;
};

/// Partial sum of S(q) = sum_k w_k1^2 q^k [k]_q! with a certified tail bound.
/// Throws std::runtime_error if the captured mass exceeds 1 by more than 1e-8.
SeriesValue s_of_q(const WCoefficients& w, int K);

/// (6 + 2q) + (2 + 2s).
double m4_gamma_analytic(double q, double s);

/// ||(gamma(X_0) + X_1)^2 Omega||_q^2 with gamma(X_0) = W X_0 W and
/// gamma(X_0)^2 = W X_0^2 W, split into the even and odd mode-1 parts.
struct OperatorMoment {
  int level = 0;
  double value = 0.0;
  double first_piece = 0.0;   ///< ||(gamma(X_0)^2 + X_1^2) Omega||^2
  double second_piece = 0.0;  ///< ||(gamma(X_0) X_1 + X_1 gamma(X_0)) Omega||^2
  double decomposition_residual = 0.0;
  /// <gamma(X_0) X_1 Omega, X_1 gamma(X_0) Omega>_q, the truncated S(q).
  double cross_term = 0.0;
  /// The same quantity predicted from w for this cutoff:
  /// 4 + [2]_q (1 + m_2(N)) + 2 m_1(N-1) + 2 S_{N-1}, m_n the column masses.
  double matched_value = 0.0;
  /// Certified bound on |value - (8 + 2q + 2S)| from the truncated tails.
  double tail_bound = 0.0;
};

OperatorMoment m4_gamma_operator(const BigW& W, const WCoefficients& w);

enum class Method { analytic, operator_route, partition };
enum class Verdict { strict, inconclusive };

std::string to_string(Method m);
std::string to_string(Verdict v);

struct TheoremOptions {
  /// Level cutoff of the operator cross-check; 0 skips it.
  int operator_level = 12;
  bool convergence_check = false;
};

struct MomentReport {
  double q = 0.0;
  double m4_sum = 0.0;
  double m4_gamma = 0.0;
  double s_of_q = 0.0;
  double tail_bound = 0.0;
  double margin = 0.0;
  Method method = Method::analytic;
  Verdict verdict = Verdict::inconclusive;
  // diagnostics
  int K = 0;
  int nodes = 0;
  double captured_mass = 0.0;
  double error_budget = 0.0;  ///< tail_bound + 10 tol_quad
  WDiagnostics w_diagnostics;
  std::optional<OperatorMoment> operator_check;
  std::string operator_error;  ///< why the operator route could not run
};

/// Full pipeline at one q: density, gamma, w column, S(q) and the verdict.
MomentReport theorem_check(const QContext& ctx, const TheoremOptions& opt = {});
MomentReport theorem_check(double q);

struct SweepRow {
  double q = 0.0;
  double m4_sum = 0.0;
  double m4_gamma = 0.0;
  double s = 0.0;
  double margin = 0.0;
  double tail = 0.0;
  Verdict verdict = Verdict::inconclusive;
  std::string error;  ///< empty on success
};

/// `steps` uniform points on [a, b], endpoints included.
std::vector<double> uniform_grid(double a, double b, int steps);

/// theorem_check over the grid without the operator route; rows sorted by q,
/// failures recorded per row.
std::vector<SweepRow> sweep(const std::vector<double>& grid, const Tolerances& tol = {},
                            std::optional<int> series_cutoff = std::nullopt);

}  // namespace qfock
