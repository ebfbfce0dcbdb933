#include "qfock/moments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>

namespace qfock {

double m4_sum_analytic(double q) { return 8.0 + 4.0 * q; }

std::vector<long long> pair_partition_coefficients(int order) {
  if (order < 0 || order > 12) {
    throw std::invalid_argument("pair_partition_coefficients: order must lie in [0, 12]");
  }
  if (order % 2 == 1) return {};
  const int pairs = order / 2;
  std::vector<long long> coeff(static_cast<std::size_t>(pairs * (pairs - 1) / 2 + 1), 0);
  std::vector<int> partner(static_cast<std::size_t>(order), -1);

  std::function<void()> rec = [&] {
    const auto first = std::find(partner.begin(), partner.end(), -1);
    if (first == partner.end()) {
      int crossings = 0;
      for (int a = 0; a < order; ++a) {
        const int b = partner[a];
        if (b < a) continue;
        for (int c = a + 1; c < b; ++c)
          if (partner[c] > b) ++crossings;
      }
      ++coeff[crossings];
      return;
    }
    const int i = static_cast<int>(first - partner.begin());
    for (int j = i + 1; j < order; ++j) {
      if (partner[j] != -1) continue;
      partner[i] = j;
      partner[j] = i;
      rec();
      partner[i] = partner[j] = -1;
    }
  };
  rec();
  return coeff;
}

double moment_pair_partitions(int order, double q) {
  if (order % 2 == 1 && order > 0 && order <= 12) return 0.0;
  const auto c = pair_partition_coefficients(order);
  double s = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) s = s * q + static_cast<double>(c[k]);
  return s;
}

double m4_sum_operator(double q, int N) {
  if (N < 5) throw std::invalid_argument("m4_sum_operator: level cutoff must be >= 5");
  const FockSpace space(2, N, q);
  const SparseMatrix x = field_op(space, 0).matrix + field_op(space, 1).matrix;
  const Eigen::VectorXd v = x * (x * space.vacuum());
  return space.norm2(v);
}

SeriesValue s_of_q(const WCoefficients& w, int K) {
  if (K < 1 || K > w.K()) throw std::invalid_argument("s_of_q: K outside the computed range");
  const double q = w.q();
  SeriesValue r;
  double qk = 1.0;
  r.mass = w.ortho(0, 1) * w.ortho(0, 1);
  for (int k = 1; k <= K; ++k) {
    qk *= q;
    const double c = w.ortho(k, 1) * w.ortho(k, 1);
    r.value += c * qk;
    r.mass += c;
  }
  r.terms = K;
  const double tail_mass = 1.0 - r.mass;
  if (tail_mass < -1e-8) {
    throw std::runtime_error("s_of_q: captured mass exceeds one; normalisation is broken");
  }
  r.tail_bound = qk * q * std::max(0.0, tail_mass);
  return r;
}

double m4_gamma_analytic(double q, double s) { return (6.0 + 2.0 * q) + (2.0 + 2.0 * s); }

OperatorMoment m4_gamma_operator(const BigW& W, const WCoefficients& w) {
  const FockSpace& space = W.space();
  const int N = space.max_level();
  if (space.modes() != 2 || space.mode1_cap() < 2 || N < 3) {
    throw std::invalid_argument("m4_gamma_operator: needs two modes, level >= 3, mode-1 cap >= 2");
  }
  const double q = space.q();
  const SparseMatrix x0 = field_op(space, 0).matrix;
  const SparseMatrix x1 = field_op(space, 1).matrix;
  const Eigen::VectorXd omega = space.vacuum();

  const Eigen::VectorXd w_omega = W.apply(omega);
  const Eigen::VectorXd gamma_omega = W.apply(x0 * w_omega);
  const Eigen::VectorXd gamma_sq_omega = W.apply(x0 * (x0 * w_omega));
  const Eigen::VectorXd x1_omega = x1 * omega;

  const Eigen::VectorXd u1 = gamma_sq_omega + x1 * x1_omega;
  const Eigen::VectorXd left = W.apply(x0 * W.apply(x1_omega));
  const Eigen::VectorXd right = x1 * gamma_omega;
  const Eigen::VectorXd u2 = left + right;

  OperatorMoment r;
  r.level = N;
  r.first_piece = space.norm2(u1);
  r.second_piece = space.norm2(u2);
  r.value = space.norm2(u1 + u2);
  r.decomposition_residual = std::abs(r.value - r.first_piece - r.second_piece);
  r.cross_term = space.inner(left, right);

  const double m1 = w.column_mass(1, N - 1);
  const double m2 = w.column_mass(2, N);
  const SeriesValue s = s_of_q(w, N - 1);
  r.matched_value = 4.0 + (1.0 + q) * (1.0 + m2) + 2.0 * m1 + 2.0 * s.value;
  const double t1 = std::max(0.0, 1.0 - m1);
  const double t2 = std::max(0.0, 1.0 - m2);
  r.tail_bound = (1.0 + q) * t2 + 2.0 * (1.0 + std::pow(q, N)) * t1;
  return r;
}

std::string to_string(Method m) {
  switch (m) {
    case Method::analytic: return "analytic";
    case Method::operator_route: return "operator";
    case Method::partition: return "partition";
  }
  return "analytic";
}

std::string to_string(Verdict v) { return v == Verdict::strict ? "strict" : "inconclusive"; }

MomentReport theorem_check(const QContext& ctx, const TheoremOptions& opt) {
  const double q = ctx.q();
  const DensityModel density(ctx);
  const GammaMap g(std::make_shared<const CdfModel>(density));
  const int K = std::max(ctx.series_cutoff(), opt.operator_level);

  WOptions wopt;
  wopt.columns = std::max(1, opt.operator_level);
  wopt.convergence_check = opt.convergence_check;
  const WCoefficients w = w_matrix(g, K, wopt);
  const SeriesValue s = s_of_q(w, K);

  MomentReport rep;
  rep.q = q;
  rep.m4_sum = m4_sum_analytic(q);
  rep.s_of_q = s.value;
  rep.m4_gamma = m4_gamma_analytic(q, s.value);
  rep.tail_bound = s.tail_bound;
  rep.margin = q - s.value;
  rep.method = Method::analytic;
  rep.K = K;
  rep.nodes = w.diagnostics().nodes;
  rep.captured_mass = s.mass;
  rep.error_budget = s.tail_bound + 10.0 * ctx.tol_quad();
  rep.w_diagnostics = w.diagnostics();
  rep.verdict = (rep.margin > rep.error_budget && rep.m4_gamma < rep.m4_sum) ? Verdict::strict
                                                                           : Verdict::inconclusive;
  if (opt.operator_level > 0) {
    // the truncated Gram forms degenerate as q -> 1; the analytic verdict
    // stands on its own, so a failure here is recorded rather than thrown
    try {
      const FockSpace space(2, opt.operator_level, q, 2);
      const BigW big = build_big_w(space, w);
      rep.operator_check = m4_gamma_operator(big, w);
    } catch (const std::exception& e) {
      rep.operator_error = e.what();
    }
  }
  return rep;
}

MomentReport theorem_check(double q) { return theorem_check(QContext(q)); }

std::vector<double> uniform_grid(double a, double b, int steps) {
  if (steps < 1) throw std::invalid_argument("uniform_grid: steps must be positive");
  if (steps == 1) return {a};
  std::vector<double> g(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) g[i] = a + (b - a) * i / (steps - 1);
  return g;
}

std::vector<SweepRow> sweep(const std::vector<double>& grid, const Tolerances& tol,
                            std::optional<int> series_cutoff) {
  std::vector<SweepRow> rows;
  rows.reserve(grid.size());
  for (double q : grid) {
    SweepRow row;
    row.q = q;
    try {
      const QContext ctx(q, tol, series_cutoff);
      const MomentReport rep = theorem_check(ctx, {.operator_level = 0});
      row.m4_sum = rep.m4_sum;
      row.m4_gamma = rep.m4_gamma;
      row.s = rep.s_of_q;
      row.margin = rep.margin;
      row.tail = rep.tail_bound;
      row.verdict = rep.verdict;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(row);
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const SweepRow& a, const SweepRow& b) { return a.q < b.q; });
  return rows;
}

}  // namespace qfock
