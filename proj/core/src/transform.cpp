#include "qfock/transform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qfock {

namespace {

constexpr double kGramHardLimit = 1e-5;
constexpr double kProjectionLimit = 1e-3;

// Rows: nodes; columns: h_0..h_n at the given points.
Eigen::MatrixXd hermite_table(const std::vector<double>& pts, double q, int n) {
  Eigen::MatrixXd h(static_cast<Eigen::Index>(pts.size()), n + 1);
  std::vector<double> buf(static_cast<std::size_t>(n) + 1);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    hermite_orthonormal(pts[i], q, buf);
    for (int k = 0; k <= n; ++k) h(static_cast<Eigen::Index>(i), k) = buf[k];
  }
  return h;
}

double max_identity_defect(const Eigen::MatrixXd& m) {
  return (m - Eigen::MatrixXd::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
}

std::vector<double> gamma_twice(const GammaMap& g, const MassRule& rule) {
  std::vector<double> out(rule.size());
  for (std::size_t i = 0; i < rule.size(); ++i) out[i] = g(g(rule.x[i]));
  return out;
}

}  // namespace

WCoefficients::WCoefficients(double q, int K, Eigen::MatrixXd ortho, WDiagnostics diag)
    : q_(q), K_(K), ortho_(std::move(ortho)), diag_(diag) {
  const int top = std::max<int>(K_, static_cast<int>(ortho_.cols()));
  log_fact_.resize(static_cast<std::size_t>(top) + 1);
  for (int k = 0; k <= top; ++k) log_fact_[k] = log_q_factorial(k, q_);
}

double WCoefficients::w(int k, int n) const {
  return ortho_(k, n) * std::exp(0.5 * (log_fact_[n] - log_fact_[k]));
}

double WCoefficients::column_mass(int n, int upto) const {
  const int last = std::min(upto, K_);
  if (last < 0) return 0.0;
  return ortho_.col(n).head(last + 1).squaredNorm();
}

WCoefficients w_matrix(const GammaMap& g, int K, const WOptions& opt) {
  if (K < 1) throw std::invalid_argument("w_matrix: K must be positive");
  const double q = g.context().q();
  const int cols = opt.columns < 0 ? K : std::min(opt.columns, K);
  if (cols < 1) throw std::invalid_argument("w_matrix: at least column 1 is required");
  const int check = opt.check_order < 0 ? std::min(K / 2, 24) : std::min(opt.check_order, K);

  const MassRule rule = mass_rule(g, K, opt.panel_scale);
  const Eigen::Map<const Eigen::VectorXd> wt(rule.weights.data(),
                                             static_cast<Eigen::Index>(rule.size()));

  const Eigen::MatrixXd hx = hermite_table(rule.x, q, K);
  const Eigen::MatrixXd hg = hermite_table(rule.gamma, q, std::max(cols, check));
  const Eigen::MatrixXd hgg = hermite_table(gamma_twice(g, rule), q, check);

  Eigen::MatrixXd ortho = hx.transpose() * (wt.asDiagonal() * hg.leftCols(cols + 1));

  WDiagnostics diag;
  diag.nodes = static_cast<int>(rule.size());
  diag.check_order = check;
  for (Eigen::Index k = 0; k < ortho.rows(); ++k)
    for (Eigen::Index n = 0; n < ortho.cols(); ++n)
      if ((k + n) % 2 == 1) diag.parity_max = std::max(diag.parity_max, std::abs(ortho(k, n)));

  const Eigen::MatrixXd hgc = hg.leftCols(check + 1);
  diag.completed_gram_defect = max_identity_defect(hgc.transpose() * wt.asDiagonal() * hgc);
  diag.completed_involution_defect =
      max_identity_defect(hx.leftCols(check + 1).transpose() * wt.asDiagonal() * hgg);

  const int tc = std::min(check, cols);
  const Eigen::MatrixXd sub = ortho.leftCols(tc + 1);
  diag.truncated_gram_defect = max_identity_defect(sub.transpose() * sub);
  const int sq = std::min(K, cols);
  const Eigen::MatrixXd square = ortho.topLeftCorner(sq + 1, sq + 1);
  diag.truncated_involution_defect =
      max_identity_defect((square * square).topLeftCorner(tc + 1, tc + 1));

  if (opt.convergence_check) {
    const MassRule fine = mass_rule(g, K, 2 * opt.panel_scale);
    const Eigen::Map<const Eigen::VectorXd> wf(fine.weights.data(),
                                               static_cast<Eigen::Index>(fine.size()));
    const Eigen::MatrixXd hxf = hermite_table(fine.x, q, K);
    const Eigen::MatrixXd hgf = hermite_table(fine.gamma, q, 1);
    const Eigen::VectorXd col = hxf.transpose() * (wf.asDiagonal() * hgf.col(1));
    diag.convergence = (col - ortho.col(1)).cwiseAbs().maxCoeff();
  }

  if (!(diag.completed_gram_defect <= kGramHardLimit)) {
    throw std::runtime_error("w_matrix: Gram-unitarity defect " +
                             std::to_string(diag.completed_gram_defect) +
                             " exceeds 1e-5; quadrature under-resolved");
  }
  return WCoefficients(q, K, std::move(ortho), diag);
}

// ---------------------------------------------------------------------------

BigW::BigW(const FockSpace& space, const WCoefficients& w, double rank_tol)
    : space_(&space), towers_(space, rank_tol) {
  const int N = space.max_level();
  if (w.K() < N || w.columns() < N) {
    throw std::invalid_argument("BigW: coefficients must cover the level cutoff " +
                                std::to_string(N));
  }
  block_ = w.ortho_matrix().topLeftCorner(N + 1, N + 1);
  tail_ = std::sqrt(std::max(0.0, 1.0 - w.column_mass(1, N)));
}

std::vector<Eigen::VectorXd> BigW::tower_coordinates(const Eigen::VectorXd& x) const {
  std::vector<Eigen::VectorXd> c(static_cast<std::size_t>(space_->max_level()) + 1);
  for (int l = 0; l <= space_->max_level(); ++l) {
    const auto off = static_cast<Eigen::Index>(space_->level_offset(l));
    const auto nl = static_cast<Eigen::Index>(space_->level_dim(l));
    c[l] = towers_.block(l).transpose() * (space_->gram(l) * x.segment(off, nl));
  }
  return c;
}

Eigen::VectorXd BigW::apply_power(const Eigen::VectorXd& x, int p) const {
  const int N = space_->max_level();
  const auto coords = tower_coordinates(x);

  // regroup by tower, apply the leading block, scatter back
  const auto& towers = towers_.towers();
  std::vector<Eigen::VectorXd> per_tower(towers.size());
  for (std::size_t t = 0; t < towers.size(); ++t) {
    per_tower[t] = Eigen::VectorXd::Zero(N - towers[t].base_level + 1);
  }
  for (int l = 0; l <= N; ++l) {
    const auto& cols = towers_.columns(l);
    for (std::size_t j = 0; j < cols.size(); ++j) {
      per_tower[cols[j].tower][cols[j].n] = coords[l][static_cast<Eigen::Index>(j)];
    }
  }
  for (std::size_t t = 0; t < towers.size(); ++t) {
    const auto s = per_tower[t].size();
    for (int r = 0; r < p; ++r) per_tower[t] = block_.topLeftCorner(s, s) * per_tower[t];
  }

  Eigen::VectorXd out = Eigen::VectorXd::Zero(x.size());
  for (int l = 0; l <= N; ++l) {
    const auto& cols = towers_.columns(l);
    Eigen::VectorXd d(static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) {
      d[static_cast<Eigen::Index>(j)] = per_tower[cols[j].tower][cols[j].n];
    }
    const auto off = static_cast<Eigen::Index>(space_->level_offset(l));
    out.segment(off, static_cast<Eigen::Index>(space_->level_dim(l))) = towers_.block(l) * d;
  }
  return out;
}

Eigen::MatrixXd BigW::matrix() const {
  const auto d = static_cast<Eigen::Index>(space_->dim());
  Eigen::MatrixXd m(d, d);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
  for (Eigen::Index c = 0; c < d; ++c) {
    e[c] = 1.0;
    m.col(c) = apply(e);
    e[c] = 0.0;
  }
  return m;
}

OperatorRep BigW::rep() const {
  OperatorRep r;
  r.kind = OperatorKind::mixed;
  r.matrix = matrix().sparseView();
  return r;
}

BigW build_big_w(const FockSpace& space, const WCoefficients& w) {
  BigW big(space, w);
  if (!(big.projection_defect() <= kProjectionLimit)) {
    throw std::runtime_error("build_big_w: projection defect " +
                             std::to_string(big.projection_defect()) +
                             " exceeds 1e-3; raise the level cutoff");
  }
  return big;
}

// ---------------------------------------------------------------------------

LemmaReport lemma_checks(const BigW& W, const WCoefficients& w, const GammaMap& g) {
  const FockSpace& space = W.space();
  const int N = space.max_level();
  const auto d = static_cast<Eigen::Index>(space.dim());
  LemmaReport rep;

  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(d, d);
  for (int l = 0; l <= N; ++l) {
    const auto off = static_cast<Eigen::Index>(space.level_offset(l));
    const auto nl = static_cast<Eigen::Index>(space.level_dim(l));
    gram.block(off, off, nl, nl) = space.gram(l);
  }
  const Eigen::MatrixXd wm = W.matrix();
  const Eigen::MatrixXd gw = gram * wm;
  rep.self_adjoint = (gw - gw.transpose()).cwiseAbs().maxCoeff();

  // property 1: W^2 = Id, column by column in the q-norm
  const Eigen::MatrixXd sq = wm * wm;
  Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
  for (Eigen::Index c = 0; c < d; ++c) {
    e[c] = 1.0;
    const double scale = std::sqrt(space.norm2(e));
    const Eigen::VectorXd col = sq.col(c);
    rep.square_consistency = std::max(
        rep.square_consistency, std::sqrt(space.norm2(col - W.apply_power(e, 2))) / scale);
    if (space.basis()[static_cast<std::size_t>(c)].level <= N - 1) {
      rep.square_literal = std::max(rep.square_literal, std::sqrt(space.norm2(col - e)) / scale);
    }
    e[c] = 0.0;
  }

  // property 2: gamma(X_0) = W X_0 W through vacuum moments
  const Eigen::MatrixXd x0(field_op(space, 0).matrix);
  const Eigen::MatrixXd y = wm * x0 * wm;
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(N + 1, N + 1);
  for (int n = 1; n <= N; ++n) {
    jac(n, n - 1) = jac(n - 1, n) = std::sqrt(q_bracket(n, space.q()));
  }
  const Eigen::MatrixXd one_mode = W.block() * jac * W.block();
  Eigen::VectorXd v = space.vacuum();
  Eigen::VectorXd u = Eigen::VectorXd::Unit(N + 1, 0);
  const PushforwardReport push = check_pushforward(g, 6);
  for (int m = 1; m <= 6; ++m) {
    v = y * v;
    u = one_mode * u;
    rep.vacuum_moments.push_back(v[0]);
    rep.gamma_moments.push_back(push.rows[m - 1].gamma_moment);
    rep.moment_consistency = std::max(rep.moment_consistency, std::abs(v[0] - u[0]));
  }

  // properties 3 and 4 on every tower
  const SparseMatrix raise = creation_op(space, 0).matrix;
  for (const auto& tower : W.towers().towers()) {
    const Eigen::VectorXd& phi = tower.phi;
    rep.kernel_fixing = std::max(rep.kernel_fixing, std::sqrt(space.norm2(W.apply(phi) - phi)));
    const int span = N - tower.base_level;
    std::vector<Eigen::VectorXd> powers{phi};
    for (int k = 1; k <= span; ++k) powers.push_back(raise * powers.back());
    for (int n = 1; n <= std::min(2, span); ++n) {
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d);
      for (int k = 0; k <= span; ++k) rhs += w.w(k, n) * powers[k];
      const double r = std::sqrt(std::max(0.0, space.norm2(W.apply(powers[n]) - rhs)));
      rep.series_identity = std::max(rep.series_identity, r);
    }
  }
  rep.series_tail = W.truncation_tail();
  return rep;
}

}  // namespace qfock
