#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "qfock_cli/cli.hpp"

namespace qfock::cli {
namespace {

class Suite {
 public:
  void check(std::string name, double residual, double tol, bool gated = true) {
    VerifyItem it;
    it.name = std::move(name);
    it.residual = residual;
    it.tolerance = tol;
    it.pass = std::isfinite(residual) && residual <= tol;
    it.gated = gated;
    items_.push_back(std::move(it));
  }
  std::vector<VerifyItem> take() { return std::move(items_); }

 private:
  std::vector<VerifyItem> items_;
};

void structural(Suite& s, double q, int N) {
  const FockSpace space(2, N, q);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      s.check("commutation_" + std::to_string(i) + std::to_string(j),
              commutation_check(space, i, j), 1e-12);

  double neg = 0.0;
  for (int l = 0; l <= std::min(N, 5); ++l) neg = std::max(neg, -min_gram_eigenvalue(space, l));
  s.check("gram_positivity", std::max(0.0, neg), 1e-12);

  for (int mode = 0; mode < 2; ++mode)
    s.check("adjointness_" + std::to_string(mode), adjointness_check(space, mode), 1e-12);

  for (int n = 1; n <= std::min(3, N); ++n)
    s.check("pn_identity_" + std::to_string(n), pn_operator_check(space, n), 1e-11);

  int dim_defect = 0;
  for (int l = 0; l <= std::min(N, 4); ++l) {
    const int expected = l == 0 ? 1 : 1 << (l - 1);
    dim_defect = std::max(dim_defect, std::abs(kernel_basis(space, l).dim() - expected));
  }
  s.check("kernel_dimension", dim_defect, 0.0);

  // isometry and K_n _|_ K_m through the normalised tower basis, plus the
  // explicit constant <(a_0^*)^2 f_1, (a_0^*)^2 f_1> = [2]_q!
  const TowerBasis towers(space);
  s.check("v_isometry", towers.orthonormality_defect(), 1e-10);
  const Eigen::VectorXd f1 = space.word_vector({1, 1});
  s.check("v_isometry_f1", std::abs(v_isometry_check(space, 2, 2, f1, f1)), 1e-12);
  s.check("v_orthogonality_21", std::abs(v_isometry_check(space, 2, 1, f1, f1)), 1e-12);

  int defect = 0;
  for (int l = 0; l <= std::min(N, 4); ++l)
    defect = std::max(defect, std::abs(completeness_check(space, l).defect));
  s.check("completeness", defect, 0.0);
}

void involution(Suite& s, const GammaMap& g, int grid, double tol_quad) {
  const double L = g.context().support();
  const CdfModel& F = g.cdf();

  double inv = 0.0, odd = 0.0;
  int monotone_breaks = 0;
  double prev = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double x = -L + (i + 0.5) * 2.0 * L / grid;
    const double y = g(x);
    inv = std::max(inv, std::abs(g(y) - x));
    odd = std::max(odd, std::abs(y + g(-x)));
    // decreasing on each half; the only upward step is the jump across 0
    if (i > 0 && y > prev && !(x > 0.0 && x - 2.0 * L / grid < 0.0)) ++monotone_breaks;
    prev = y;
  }
  s.check("gamma_involution", inv, 1e-6);
  s.check("gamma_oddness", odd, 1e-8);
  s.check("gamma_monotone", monotone_breaks, 0.0);
  s.check("gamma_endpoints", std::abs(g(L)) + std::abs(g(-L)), 0.0);
  // jump at 0, measured in mass: the density is so thin near +-L (for q
  // near 1) that gamma(1e-6 L) sits visibly inside the support in x.  The
  // mass left beyond gamma(+-eps) must be of the order of nu([0, eps]).
  const double eps = 1e-6 * L;
  s.check("gamma_jump", (1.0 - F.cdf(g(eps))) + F.cdf(g(-eps)), 4.0 * F.central_mass(eps));

  double mp = 0.0;
  for (int i = 1; i < 10; ++i) {
    const double a = L * i / 10.0, b = L * (i + 0.5) / 10.0;
    const double lhs = F.cdf(b) - F.cdf(a);
    const double rhs = F.cdf(g(a)) - F.cdf(g(b));
    mp = std::max(mp, std::abs(lhs - rhs));
  }
  s.check("gamma_measure_preservation", mp, 2.0 * tol_quad);

  s.check("gamma_pushforward", check_pushforward(g, 8).max_abs_discrepancy, 1e-7);

  double ode = 0.0;
  for (int k = 1; k <= 10; ++k) {
    const double x = L * k / 11.0;
    ode = std::max({ode, std::abs(ode_residual(x, g, 1e-5 * L)),
                    std::abs(ode_residual(-x, g, 1e-5 * L))});
  }
  s.check("gamma_ode_residual", ode, 1e-5);
}

void w_suite(Suite& s, const GammaMap& g, int K) {
  WOptions opt;
  opt.convergence_check = true;
  const WCoefficients w = w_matrix(g, K, opt);
  const WDiagnostics& d = w.diagnostics();
  s.check("w_00", std::abs(w.w(0, 0) - 1.0), 1e-12);
  s.check("w_01", std::abs(w.w(0, 1)), 1e-12);
  s.check("w_parity", d.parity_max, 1e-10);
  s.check("w_nodes", std::max(0, 200 - d.nodes), 0.0);
  s.check("w_convergence", d.convergence, 1e-8);
  s.check("w_completed_gram", d.completed_gram_defect, 1e-6);
  s.check("w_completed_involution", d.completed_involution_defect, 1e-6);
  // truncated sums over k <= K against the identities of the full operator
  s.check("w_column1_mass_truncated", std::abs(1.0 - w.column_mass(1, K)), 1e-6, false);
  s.check("w_gram_truncated", d.truncated_gram_defect, 1e-6, false);
  s.check("w_involution_truncated", d.truncated_involution_defect, 1e-6, false);
}

void lemma_suite(Suite& s, const QContext& ctx, const GammaMap& g, int N) {
  const double q = ctx.q();
  const int K = std::max(ctx.series_cutoff(), N);
  WOptions opt;
  opt.columns = N;
  const WCoefficients w = w_matrix(g, K, opt);
  const FockSpace space(2, N, q);
  const BigW W = build_big_w(space, w);
  const LemmaReport r = lemma_checks(W, w, g);

  s.check("lemma_self_adjoint", r.self_adjoint, 1e-10);
  s.check("lemma_square_consistency", r.square_consistency, 1e-8);
  s.check("lemma_moment_consistency", r.moment_consistency, 1e-10);
  s.check("lemma_first_vacuum_moment", std::abs(r.vacuum_moments.at(0)), 1e-12);
  s.check("lemma_kernel_fixing", r.kernel_fixing, 1e-8);
  s.check("lemma_series_identity", r.series_identity, 1e-8);
  s.check("lemma_square_literal", r.square_literal, 1e-6, false);
  s.check("lemma_second_vacuum_moment", std::abs(r.vacuum_moments.at(1) - 1.0), 1e-6, false);
  double gm = 0.0;
  for (std::size_t m = 0; m < r.vacuum_moments.size(); ++m)
    gm = std::max(gm, std::abs(r.vacuum_moments[m] - r.gamma_moments[m]));
  s.check("lemma_vacuum_vs_gamma_moments", gm, 1e-6, false);

  const OperatorMoment op = m4_gamma_operator(W, w);
  const SeriesValue sv = s_of_q(w, K);
  const double analytic = m4_gamma_analytic(q, sv.value);
  s.check("decomposition_residual", op.decomposition_residual, 1e-8);
  s.check("operator_matches_truncation", std::abs(op.value - op.matched_value), 1e-9);
  s.check("operator_first_piece", std::abs(op.first_piece - (6.0 + 2.0 * q)),
          (1.0 + q) * (1.0 - w.column_mass(2, N)) + 1e-9);
  s.check("operator_vs_analytic", std::abs(op.value - analytic),
          1e-5 + op.tail_bound + sv.tail_bound);
}

}  // namespace

std::vector<VerifyItem> verify_suite(const QContext& ctx, const VerifyOptions& opt) {
  Suite s;
  structural(s, ctx.q(), opt.level);
  const DensityModel density(ctx);
  const GammaMap g(std::make_shared<const CdfModel>(density));
  involution(s, g, opt.gamma_grid, ctx.tol_quad());
  w_suite(s, g, opt.w_order);
  lemma_suite(s, ctx, g, opt.level);
  return s.take();
}

bool verify_passed(const std::vector<VerifyItem>& items) {
  return std::all_of(items.begin(), items.end(),
                     [](const VerifyItem& it) { return it.pass || !it.gated; });
}

}  // namespace qfock::cli
