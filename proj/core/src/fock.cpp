#include "qfock/fock.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <bit>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <string>

namespace qfock {

namespace {

// [n]_q without the (0, 1) restriction of q_bracket: Fock spaces admit q = 0.
double bracket(int n, double q) {
  double s = 0.0, qk = 1.0;
  for (int k = 0; k < n; ++k) {
    s += qk;
    qk *= q;
  }
  return s;
}

double factorial(int n, double q) {
  double f = 1.0;
  for (int j = 1; j <= n; ++j) f *= bracket(j, q);
  return f;
}

SparseMatrix identity(std::size_t n) {
  SparseMatrix id(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  id.setIdentity();
  return id;
}

double max_abs_in_columns(const SparseMatrix& m, const std::vector<bool>& keep) {
  double r = 0.0;
  for (Eigen::Index c = 0; c < m.outerSize(); ++c) {
    if (!keep[static_cast<std::size_t>(c)]) continue;
    for (SparseMatrix::InnerIterator it(m, c); it; ++it) r = std::max(r, std::abs(it.value()));
  }
  return r;
}

// Gosper enumeration of l-bit patterns with exactly c ones.
void append_combinations(int l, int c, std::vector<std::uint64_t>& out) {
  if (c == 0) {
    out.push_back(0);
    return;
  }
  if (c > l) return;
  std::uint64_t v = (std::uint64_t{1} << c) - 1;
  const std::uint64_t limit = std::uint64_t{1} << l;
  while (v < limit) {
    out.push_back(v);
    const std::uint64_t t = v | (v - 1);
    v = (t + 1) | (((~t & -~t) - 1) >> (std::countr_zero(v) + 1));
  }
}

}  // namespace

// ---------------------------------------------------------------------------

int FockWord::count(int mode) const noexcept {
  const int ones = std::popcount(bits);
  return mode == 1 ? ones : level - ones;
}

FockWord FockWord::prepend(int mode) const noexcept {
  return {level + 1, (static_cast<std::uint64_t>(mode) << level) | bits};
}

FockWord FockWord::remove(int i) const noexcept {
  const int right = level - 1 - i;
  const std::uint64_t high = bits >> (right + 1);
  const std::uint64_t low = bits & ((std::uint64_t{1} << right) - 1);
  return {level - 1, (high << right) | low};
}

std::string FockWord::label() const {
  if (level == 0) return "vac";
  std::string s(static_cast<std::size_t>(level), '0');
  for (int i = 0; i < level; ++i) s[i] = static_cast<char>('0' + letter(i));
  return s;
}

// ---------------------------------------------------------------------------

FockSpace::FockSpace(int modes, int max_level, double q, std::optional<int> mode1_cap)
    : modes_(modes), max_level_(max_level), q_(q), cap_(0) {
  if (modes != 1 && modes != 2) throw std::invalid_argument("FockSpace: modes must be 1 or 2");
  if (max_level < 0 || max_level > 62) {
    throw std::invalid_argument("FockSpace: level cutoff must lie in [0, 62]");
  }
  if (!(q >= 0.0 && q < 1.0)) throw std::invalid_argument("FockSpace: q must lie in [0, 1)");
  cap_ = (modes == 1) ? 0 : std::clamp(mode1_cap.value_or(max_level), 0, max_level);

  offsets_.push_back(0);
  local_index_.resize(max_level + 1);
  for (int l = 0; l <= max_level; ++l) {
    std::vector<std::uint64_t> words;
    for (int c = 0; c <= std::min(l, cap_); ++c) append_combinations(l, c, words);
    std::sort(words.begin(), words.end());
    for (std::size_t i = 0; i < words.size(); ++i) {
      local_index_[l].emplace(words[i], i);
      basis_.push_back({l, words[i]});
    }
    offsets_.push_back(basis_.size());
  }
  gram_.resize(max_level + 1);
  for (int l = 0; l <= max_level; ++l) build_gram(l);
}

std::optional<std::size_t> FockSpace::index_of(const FockWord& w) const {
  if (w.level < 0 || w.level > max_level_) return std::nullopt;
  const auto& m = local_index_[w.level];
  auto it = m.find(w.bits);
  if (it == m.end()) return std::nullopt;
  return offsets_[w.level] + it->second;
}

void FockSpace::build_gram(int level) {
  const std::size_t n = level_dim(level);
  Eigen::MatrixXd& g = gram_[level];
  g = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  if (level == 0) {
    g(0, 0) = 1.0;
    return;
  }
  const Eigen::MatrixXd& prev = gram_[level - 1];
  const auto& prev_index = local_index_[level - 1];
  std::vector<double> qpow(level, 1.0);
  for (int k = 1; k < level; ++k) qpow[k] = qpow[k - 1] * q_;

  const std::size_t off = offsets_[level];
  std::vector<std::size_t> tail(n);
  std::vector<std::vector<std::size_t>> deleted(n, std::vector<std::size_t>(level));
  std::vector<int> sector(n);
  for (std::size_t j = 0; j < n; ++j) {
    const FockWord& w = basis_[off + j];
    sector[j] = w.count(1);
    tail[j] = prev_index.at(w.remove(0).bits);
    for (int k = 0; k < level; ++k) deleted[j][k] = prev_index.at(w.remove(k).bits);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const FockWord& gi = basis_[off + i];
    const int first = gi.letter(0);
    for (std::size_t j = i; j < n; ++j) {
      if (sector[i] != sector[j]) continue;
      const FockWord& hj = basis_[off + j];
      double s = 0.0;
      for (int k = 0; k < level; ++k) {
        if (hj.letter(k) == first) {
          s += qpow[k] * prev(static_cast<Eigen::Index>(tail[i]),
                              static_cast<Eigen::Index>(deleted[j][k]));
        }
      }
      g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s;
      g(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = s;
    }
  }
}

double FockSpace::inner(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
  double s = 0.0;
  for (int l = 0; l <= max_level_; ++l) {
    const auto off = static_cast<Eigen::Index>(offsets_[l]);
    const auto n = static_cast<Eigen::Index>(level_dim(l));
    s += x.segment(off, n).dot(gram_[l] * y.segment(off, n));
  }
  return s;
}

Eigen::VectorXd FockSpace::vacuum() const { return word_vector({0, 0}); }

Eigen::VectorXd FockSpace::word_vector(const FockWord& w) const {
  const auto idx = index_of(w);
  if (!idx) throw std::out_of_range("FockSpace: word " + w.label() + " not in basis");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim()));
  v[static_cast<Eigen::Index>(*idx)] = 1.0;
  return v;
}

bool FockSpace::below_cutoff(std::size_t idx, int raise_level, int raise_mode1) const {
  const FockWord& w = basis_[idx];
  return w.level + raise_level <= max_level_ && w.count(1) + raise_mode1 <= cap_;
}

int FockSpace::top_level(const Eigen::VectorXd& x) const {
  for (int l = max_level_; l >= 0; --l) {
    const auto off = static_cast<Eigen::Index>(offsets_[l]);
    const auto n = static_cast<Eigen::Index>(level_dim(l));
    if (x.segment(off, n).cwiseAbs().maxCoeff() > 0.0) return l;
  }
  return -1;
}

// ---------------------------------------------------------------------------

Eigen::MatrixXd gram_matrix(const FockSpace& space, int level) {
  if (level < 0 || level > space.max_level()) {
    throw std::out_of_range("gram_matrix: level beyond the cutoff");
  }
  return space.gram(level);
}

OperatorRep creation_op(const FockSpace& space, int mode) {
  if (mode < 0 || mode >= space.modes()) throw std::invalid_argument("creation_op: bad mode");
  std::vector<Eigen::Triplet<double>> t;
  for (std::size_t i = 0; i < space.dim(); ++i) {
    if (!space.below_cutoff(i, 1, mode == 1 ? 1 : 0)) continue;
    const auto target = space.index_of(space.basis()[i].prepend(mode));
    t.emplace_back(static_cast<int>(*target), static_cast<int>(i), 1.0);
  }
  OperatorRep op;
  op.kind = OperatorKind::raising;
  op.matrix.resize(static_cast<Eigen::Index>(space.dim()), static_cast<Eigen::Index>(space.dim()));
  op.matrix.setFromTriplets(t.begin(), t.end());
  return op;
}

OperatorRep annihilation_op(const FockSpace& space, int mode) {
  if (mode < 0 || mode >= space.modes()) throw std::invalid_argument("annihilation_op: bad mode");
  std::vector<Eigen::Triplet<double>> t;
  for (std::size_t i = 0; i < space.dim(); ++i) {
    const FockWord& w = space.basis()[i];
    double qk = 1.0;
    for (int k = 0; k < w.level; ++k, qk *= space.q()) {
      if (w.letter(k) != mode) continue;
      const auto target = space.index_of(w.remove(k));
      t.emplace_back(static_cast<int>(*target), static_cast<int>(i), qk);
    }
  }
  OperatorRep op;
  op.kind = OperatorKind::lowering;
  op.matrix.resize(static_cast<Eigen::Index>(space.dim()), static_cast<Eigen::Index>(space.dim()));
  op.matrix.setFromTriplets(t.begin(), t.end());
  return op;
}

OperatorRep field_op(const FockSpace& space, int mode) {
  OperatorRep x;
  x.kind = OperatorKind::mixed;
  x.matrix = creation_op(space, mode).matrix + annihilation_op(space, mode).matrix;
  return x;
}

OperatorRep gram_adjoint(const FockSpace& space, const OperatorRep& op) {
  std::vector<Eigen::Triplet<double>> gt, gi;
  for (int l = 0; l <= space.max_level(); ++l) {
    const Eigen::MatrixXd& g = space.gram(l);
    const auto n = g.rows();
    Eigen::LLT<Eigen::MatrixXd> llt(g);
    if (llt.info() != Eigen::Success) {
      const double jitter = 1e-14 * std::max(1.0, g.trace() / static_cast<double>(n));
      llt.compute(g + jitter * Eigen::MatrixXd::Identity(n, n));
      if (llt.info() != Eigen::Success) {
        throw std::runtime_error("gram_adjoint: Gram matrix of level " + std::to_string(l) +
                                 " is not positive definite");
      }
    }
    const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(n, n));
    const auto off = static_cast<int>(space.level_offset(l));
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index c = 0; c < n; ++c) {
        if (g(r, c) != 0.0) gt.emplace_back(off + r, off + c, g(r, c));
        if (std::abs(inv(r, c)) > 0.0) gi.emplace_back(off + r, off + c, inv(r, c));
      }
    }
  }
  const auto d = static_cast<Eigen::Index>(space.dim());
  SparseMatrix g(d, d), ginv(d, d);
  g.setFromTriplets(gt.begin(), gt.end());
  ginv.setFromTriplets(gi.begin(), gi.end());

  OperatorRep adj;
  adj.kind = op.kind == OperatorKind::raising   ? OperatorKind::lowering
             : op.kind == OperatorKind::lowering ? OperatorKind::raising
                                                 : OperatorKind::mixed;
  SparseMatrix at = op.matrix.transpose();
  adj.matrix = ginv * (at * g);
  adj.matrix.prune(0.0);
  return adj;
}

double commutation_check(const FockSpace& space, int i, int j) {
  const SparseMatrix ai = annihilation_op(space, i).matrix;
  const SparseMatrix aj_star = creation_op(space, j).matrix;
  SparseMatrix m = ai * aj_star;
  SparseMatrix rhs = aj_star * ai;
  m -= space.q() * rhs;
  if (i == j) m -= identity(space.dim());
  std::vector<bool> keep(space.dim());
  for (std::size_t c = 0; c < space.dim(); ++c) keep[c] = space.below_cutoff(c, 1, j == 1 ? 1 : 0);
  return max_abs_in_columns(m, keep);
}

double adjointness_check(const FockSpace& space, int mode) {
  const Eigen::MatrixXd c = Eigen::MatrixXd(creation_op(space, mode).matrix);
  const Eigen::MatrixXd a = Eigen::MatrixXd(annihilation_op(space, mode).matrix);
  const auto n = static_cast<Eigen::Index>(space.dim());
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  for (int l = 0; l <= space.max_level(); ++l) {
    const auto off = static_cast<Eigen::Index>(space.level_offset(l));
    const auto d = static_cast<Eigen::Index>(space.level_dim(l));
    g.block(off, off, d, d) = space.gram(l);
  }
  // entry (i, j): <a^* e_i, e_j> - <e_i, a e_j>
  const Eigen::MatrixXd diff = c.transpose() * g - g * a;
  double r = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!space.below_cutoff(static_cast<std::size_t>(i), 1, mode == 1 ? 1 : 0)) continue;
    r = std::max(r, diff.row(i).cwiseAbs().maxCoeff());
  }
  return r;
}

double min_gram_eigenvalue(const FockSpace& space, int level) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(space.gram(level),
                                                          Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double pn_eval(int n, double x, double q) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("pn_eval: q must lie in (0, 1)");
  double p = 1.0, qj = 1.0;
  for (int j = 1; j <= n; ++j) {
    qj *= q;
    p *= qj * x + bracket(j, q);
  }
  return p;
}

double pn_operator_check(const FockSpace& space, int n) {
  if (n < 0 || n > space.max_level()) throw std::invalid_argument("pn_operator_check: bad n");
  const SparseMatrix a = annihilation_op(space, 0).matrix;
  const SparseMatrix as = creation_op(space, 0).matrix;
  const SparseMatrix num = as * a;
  SparseMatrix lhs = identity(space.dim());
  for (int k = 0; k < n; ++k) lhs = SparseMatrix(lhs * as);
  for (int k = 0; k < n; ++k) lhs = SparseMatrix(a * lhs);
  SparseMatrix rhs = identity(space.dim());
  double qj = 1.0;
  for (int j = 1; j <= n; ++j) {
    qj *= space.q();
    SparseMatrix factor = qj * num + bracket(j, space.q()) * identity(space.dim());
    rhs = SparseMatrix(factor * rhs);
  }
  SparseMatrix diff = lhs - rhs;
  std::vector<bool> keep(space.dim());
  for (std::size_t c = 0; c < space.dim(); ++c) keep[c] = space.below_cutoff(c, n);
  return max_abs_in_columns(diff, keep);
}

KernelBasis kernel_basis(const FockSpace& space, int level, double rank_tol) {
  if (level < 0 || level > space.max_level()) throw std::out_of_range("kernel_basis: bad level");
  KernelBasis kb;
  kb.level = level;
  const auto d = static_cast<Eigen::Index>(space.dim());
  if (level == 0) {
    kb.vectors = space.vacuum();
    kb.mode1_counts = {0};
    return kb;
  }
  const std::size_t off = space.level_offset(level);
  const std::size_t prev_off = space.level_offset(level - 1);
  const Eigen::MatrixXd& gram = space.gram(level);
  std::vector<Eigen::VectorXd> cols;

  for (int c = 0; c <= std::min(level, space.mode1_cap()); ++c) {
    std::vector<std::size_t> src, dst;
    for (std::size_t i = 0; i < space.level_dim(level); ++i)
      if (space.basis()[off + i].count(1) == c) src.push_back(i);
    for (std::size_t i = 0; i < space.level_dim(level - 1); ++i)
      if (space.basis()[prev_off + i].count(1) == c) dst.push_back(i);
    if (src.empty()) continue;
    const auto ns = static_cast<Eigen::Index>(src.size());

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dst.size()), ns);
    for (Eigen::Index j = 0; j < ns; ++j) {
      const FockWord& w = space.basis()[off + src[j]];
      double qk = 1.0;
      for (int k = 0; k < level; ++k, qk *= space.q()) {
        if (w.letter(k) != 0) continue;
        const std::size_t target = *space.index_of(w.remove(k)) - prev_off;
        const auto r = std::lower_bound(dst.begin(), dst.end(), target) - dst.begin();
        a(r, j) += qk;
      }
    }
    Eigen::MatrixXd null;
    if (a.rows() == 0) {
      null = Eigen::MatrixXd::Identity(ns, ns);
    } else {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
      const auto& sv = svd.singularValues();
      const double thresh = rank_tol * std::max(1.0, sv.size() ? sv[0] : 0.0);
      Eigen::Index rank = 0;
      for (Eigen::Index k = 0; k < sv.size(); ++k) rank += sv[k] > thresh;
      null = svd.matrixV().rightCols(ns - rank);
    }
    if (null.cols() == 0) continue;

    Eigen::MatrixXd gs(ns, ns);
    for (Eigen::Index r = 0; r < ns; ++r)
      for (Eigen::Index s = 0; s < ns; ++s)
        gs(r, s) = gram(static_cast<Eigen::Index>(src[r]), static_cast<Eigen::Index>(src[s]));
    const Eigen::MatrixXd m = null.transpose() * gs * null;
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) throw std::runtime_error("kernel_basis: singular kernel Gram");
    const Eigen::MatrixXd ortho = llt.matrixL().solve(null.transpose()).transpose();

    for (Eigen::Index k = 0; k < ortho.cols(); ++k) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
      for (Eigen::Index r = 0; r < ns; ++r) v[static_cast<Eigen::Index>(off + src[r])] = ortho(r, k);
      cols.push_back(std::move(v));
      kb.mode1_counts.push_back(c);
    }
  }
  kb.vectors.resize(d, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) kb.vectors.col(static_cast<Eigen::Index>(k)) = cols[k];
  return kb;
}

Eigen::VectorXd raise0(const FockSpace& space, const Eigen::VectorXd& x, int n) {
  const SparseMatrix as = creation_op(space, 0).matrix;
  Eigen::VectorXd v = x;
  for (int k = 0; k < n; ++k) v = as * v;
  return v;
}

double v_isometry_check(const FockSpace& space, int n, int m, const Eigen::VectorXd& phi,
                        const Eigen::VectorXd& xi) {
  if (space.top_level(phi) + n > space.max_level() || space.top_level(xi) + m > space.max_level()) {
    throw std::invalid_argument("v_isometry_check: raised vectors leave the truncation");
  }
  const double lhs = space.inner(raise0(space, phi, n), raise0(space, xi, m));
  const double rhs = (n == m) ? factorial(n, space.q()) * space.inner(phi, xi) : 0.0;
  return lhs - rhs;
}

CompletenessReport completeness_check(const FockSpace& space, int level, double rank_tol) {
  if (level < 0 || level > space.max_level()) throw std::out_of_range("completeness_check: level");
  CompletenessReport rep;
  rep.level = level;
  rep.expected = static_cast<int>(space.level_dim(level));
  const auto off = static_cast<Eigen::Index>(space.level_offset(level));
  const auto nl = static_cast<Eigen::Index>(space.level_dim(level));
  std::vector<Eigen::VectorXd> cols;
  for (int n = 0; n <= level; ++n) {
    const KernelBasis kb = kernel_basis(space, level - n, rank_tol);
    rep.sum_dims += kb.dim();
    for (int k = 0; k < kb.dim(); ++k) cols.push_back(raise0(space, kb.vectors.col(k), n).segment(off, nl));
  }
  Eigen::MatrixXd t(nl, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) t.col(static_cast<Eigen::Index>(k)) = cols[k];
  const Eigen::MatrixXd m = t.transpose() * space.gram(level) * t;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  const double top = ev.size() ? std::max(1.0, ev[ev.size() - 1]) : 1.0;
  for (Eigen::Index k = 0; k < ev.size(); ++k) rep.rank += ev[k] > rank_tol * top;
  rep.defect = rep.expected - rep.rank;
  return rep;
}

// ---------------------------------------------------------------------------

TowerBasis::TowerBasis(const FockSpace& space, double rank_tol) {
  const int top = space.max_level();
  const SparseMatrix as = creation_op(space, 0).matrix;
  std::vector<std::vector<Eigen::VectorXd>> per_level(top + 1);
  columns_.resize(top + 1);
  for (int m = 0; m <= top; ++m) {
    const KernelBasis kb = kernel_basis(space, m, rank_tol);
    for (int k = 0; k < kb.dim(); ++k) {
      const int id = static_cast<int>(towers_.size());
      towers_.push_back({m, kb.mode1_counts[k], kb.vectors.col(k)});
      Eigen::VectorXd v = kb.vectors.col(k);
      for (int n = 0; m + n <= top; ++n) {
        if (n > 0) v = (as * v) / std::sqrt(bracket(n, space.q()));
        const int l = m + n;
        const auto off = static_cast<Eigen::Index>(space.level_offset(l));
        const auto nl = static_cast<Eigen::Index>(space.level_dim(l));
        per_level[l].push_back(v.segment(off, nl));
        columns_[l].push_back({id, n});
      }
    }
  }
  blocks_.resize(top + 1);
  for (int l = 0; l <= top; ++l) {
    const auto nl = static_cast<Eigen::Index>(space.level_dim(l));
    const auto nc = static_cast<Eigen::Index>(per_level[l].size());
    blocks_[l].resize(nl, nc);
    for (Eigen::Index c = 0; c < nc; ++c) blocks_[l].col(c) = per_level[l][c];
    if (nc != nl) {
      defect_ = std::max(defect_, 1.0);
      continue;
    }
    const Eigen::MatrixXd e =
        blocks_[l].transpose() * space.gram(l) * blocks_[l] - Eigen::MatrixXd::Identity(nc, nc);
    defect_ = std::max(defect_, e.cwiseAbs().maxCoeff());
  }
}

// ---------------------------------------------------------------------------

void write_gram_csv(std::ostream& os, const FockSpace& space, int level) {
  const Eigen::MatrixXd& g = space.gram(level);
  const std::size_t off = space.level_offset(level);
  os << std::setprecision(17) << "word";
  for (Eigen::Index c = 0; c < g.cols(); ++c) os << ',' << space.basis()[off + c].label();
  os << '\n';
  for (Eigen::Index r = 0; r < g.rows(); ++r) {
    os << space.basis()[off + r].label();
    for (Eigen::Index c = 0; c < g.cols(); ++c) os << ',' << g(r, c);
    os << '\n';
  }
}

void write_operator_csv(std::ostream& os, const FockSpace& space, const OperatorRep& op) {
  const Eigen::MatrixXd m(op.matrix);
  os << std::setprecision(17) << "word";
  for (const auto& w : space.basis()) os << ',' << w.label();
  os << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    os << space.basis()[r].label();
    for (Eigen::Index c = 0; c < m.cols(); ++c) os << ',' << m(r, c);
    os << '\n';
  }
}

}  // namespace qfock
