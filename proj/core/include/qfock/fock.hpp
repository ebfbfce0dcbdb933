#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace qfock {

/// A tensor word f_{i_1} (x) ... (x) f_{i_n} over modes {0, 1}.
/// Letters are packed most-significant first; the empty word is the vacuum.
struct FockWord {
  int level = 0;
  std::uint64_t bits = 0;

  int letter(int i) const noexcept {
    return static_cast<int>((bits >> (level - 1 - i)) & 1u);
  }
  int count(int mode) const noexcept;
  /// The word with letter `mode` prepended (creation).
  FockWord prepend(int mode) const noexcept;
  /// The word with letter i removed.
  FockWord remove(int i) const noexcept;
  /// "vac" for the vacuum, otherwise the letters, e.g. "0110".
  std::string label() const;

  friend bool operator==(const FockWord&, const FockWord&) = default;
};

using SparseMatrix = Eigen::SparseMatrix<double>;

enum class OperatorKind { raising, lowering, mixed };

/// An operator on the truncated word basis of some FockSpace.
struct OperatorRep {
  SparseMatrix matrix;
  OperatorKind kind = OperatorKind::mixed;
};

/// Truncated q-Fock space over C^d (d = 1 or 2).
///
/// Basis: all words of level <= N, enumerated level by level and
/// lexicographically inside a level.  An optional cap on the number of mode-1
/// letters restricts the space to a union of particle-number sectors; every
/// operator here preserves or shifts that number by one, so capped spaces are
/// truncations of the same kind as the level cutoff.
///
/// The Gram form of each level is built once from the recursion
///   <g_1..g_n, h_1..h_n>_q = sum_k q^{k-1} <g_1, h_k> <g_2..g_n, h_1..^h_k..h_n>_q
/// memoised through the previous level.
class FockSpace {
 public:
  FockSpace(int modes, int max_level, double q, std::optional<int> mode1_cap = std::nullopt);

  int modes() const noexcept { return modes_; }
  int max_level() const noexcept { return max_level_; }
  double q() const noexcept { return q_; }
  int mode1_cap() const noexcept { return cap_; }

  std::size_t dim() const noexcept { return basis_.size(); }
  const std::vector<FockWord>& basis() const noexcept { return basis_; }
  std::size_t level_offset(int level) const { return offsets_.at(level); }
  std::size_t level_dim(int level) const { return offsets_.at(level + 1) - offsets_.at(level); }

  std::optional<std::size_t> index_of(const FockWord& w) const;
  /// Gram matrix of the level in level-local coordinates.
  const Eigen::MatrixXd& gram(int level) const { return gram_.at(level); }

  /// <x, y>_q for full-space coordinate vectors.
  double inner(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;
  double norm2(const Eigen::VectorXd& x) const { return inner(x, x); }

  Eigen::VectorXd vacuum() const;
  Eigen::VectorXd word_vector(const FockWord& w) const;

  /// True when raising basis word `idx` by `raise_level` letters, `raise_mode1`
  /// of them mode-1, stays inside the truncation.
  bool below_cutoff(std::size_t idx, int raise_level, int raise_mode1 = 0) const;

  /// Highest level carrying a nonzero coefficient of x (-1 for x = 0).
  int top_level(const Eigen::VectorXd& x) const;

 private:
  void build_gram(int level);

  int modes_;
  int max_level_;
  double q_;
  int cap_;
  std::vector<FockWord> basis_;
  std::vector<std::size_t> offsets_;
  std::vector<std::unordered_map<std::uint64_t, std::size_t>> local_index_;
  std::vector<Eigen::MatrixXd> gram_;
};

/// Copy of the level's Gram matrix.
Eigen::MatrixXd gram_matrix(const FockSpace& space, int level);

/// a(f_mode)^*: prepends the letter; words at the cutoff map to zero.
OperatorRep creation_op(const FockSpace& space, int mode);
/// a(f_mode): deletes matching letters with weights q^{k-1}; a Omega = 0.
OperatorRep annihilation_op(const FockSpace& space, int mode);
/// X_mode = a + a^*.
OperatorRep field_op(const FockSpace& space, int mode);

/// Adjoint with respect to the q-inner product, G^{-1} A^T G.
OperatorRep gram_adjoint(const FockSpace& space, const OperatorRep& op);

/// max |a_i a_j^* - q a_j^* a_i - delta_ij Id| over columns whose image stays
/// below the cutoff.
double commutation_check(const FockSpace& space, int i, int j);

/// max |<a^* e_i, e_j>_q - <e_i, a e_j>_q| over basis words, e_i below the
/// cutoff so its image is not truncated.
double adjointness_check(const FockSpace& space, int mode);

/// Smallest eigenvalue of the level's Gram matrix.
double min_gram_eigenvalue(const FockSpace& space, int level);

/// P_n(x) = prod_{j=1}^n (q^j x + [j]_q).
double pn_eval(int n, double x, double q);
/// max |a_0^n (a_0^*)^n - P_n(a_0^* a_0)| on levels <= N - n.
double pn_operator_check(const FockSpace& space, int n);

/// Gram-orthonormal basis of ker a_0 inside one level (full-space columns).
struct KernelBasis {
  int level = 0;
  Eigen::MatrixXd vectors;
  std::vector<int> mode1_counts;  ///< sector of each column
  int dim() const noexcept { return static_cast<int>(vectors.cols()); }
};

KernelBasis kernel_basis(const FockSpace& space, int level, double rank_tol = 1e-10);

/// (a_0^*)^n applied to x.
Eigen::VectorXd raise0(const FockSpace& space, const Eigen::VectorXd& x, int n);

/// <(a_0^*)^n phi, (a_0^*)^m xi>_q - delta_nm [n]_q! <phi, xi>_q.
double v_isometry_check(const FockSpace& space, int n, int m, const Eigen::VectorXd& phi,
                        const Eigen::VectorXd& xi);

struct CompletenessReport {
  int level = 0;
  int expected = 0;  ///< number of words at the level
  int sum_dims = 0;  ///< sum_n dim (a_0^*)^n K^{(level - n)}
  int rank = 0;      ///< numerical rank of their union
  int defect = 0;    ///< expected - rank
};

CompletenessReport completeness_check(const FockSpace& space, int level,
                                      double rank_tol = 1e-10);

/// Gram-orthonormal basis b = (a_0^*)^n phi / sqrt([n]_q!) of the truncated
/// space, phi running over kernel bases of every level: the image of
/// e_n (x) phi under V, normalised.
class TowerBasis {
 public:
  struct Tower {
    int base_level;       ///< level of phi
    int mode1_count;      ///< sector of phi
    Eigen::VectorXd phi;  ///< full-space coordinates
  };
  struct Column {
    int tower;
    int n;  ///< power of a_0^*
  };

  explicit TowerBasis(const FockSpace& space, double rank_tol = 1e-10);

  const std::vector<Tower>& towers() const noexcept { return towers_; }
  /// Level-local matrix whose columns are the basis vectors landing at `level`.
  const Eigen::MatrixXd& block(int level) const { return blocks_.at(level); }
  const std::vector<Column>& columns(int level) const { return columns_.at(level); }

  /// max |B^T G B - I| over all levels.
  double orthonormality_defect() const noexcept { return defect_; }

 private:
  std::vector<Tower> towers_;
  std::vector<Eigen::MatrixXd> blocks_;
  std::vector<std::vector<Column>> columns_;
  double defect_ = 0.0;
};

/// CSV dump (header row of word labels, row-major values).
void write_gram_csv(std::ostream& os, const FockSpace& space, int level);
void write_operator_csv(std::ostream& os, const FockSpace& space, const OperatorRep& op);

}  // namespace qfock
