#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qfock/fock.hpp"
#include "qfock/involution.hpp"

namespace qfock {

struct WOptions {
  /// Number of columns n = 0..columns computed; the default -1 means all K + 1.
  int columns = -1;
  /// Highest index i, j used by the completed-identity diagnostics; -1 means
  /// min(K / 2, 24).
  int check_order = -1;
  /// Recompute the first column on a rule with twice as many panels.
  bool convergence_check = false;
  int panel_scale = 1;
};

struct WDiagnostics {
  int nodes = 0;
  int check_order = 0;
  /// max |w~_kn| over k + n odd (orthonormal form; the monic entries carry
  /// sqrt([n]_q!/[k]_q!) and amplify rounding for large n).
  double parity_max = 0.0;
  /// max_k |w_k1(panels) - w_k1(2 panels)|; negative when not computed.
  double convergence = -1.0;
  /// max |int h_i(gamma) h_j(gamma) dnu - delta_ij|: unitarity of the full
  /// operator, independent of K.
  double completed_gram_defect = 0.0;
  /// max |int h_i h_j(gamma o gamma) dnu - delta_ij|.
  double completed_involution_defect = 0.0;
  /// max |sum_{k<=K} w~_ki w~_kj - delta_ij| for i, j <= check_order.
  double truncated_gram_defect = 0.0;
  /// max |sum_{k<=K} w~_ik w~_kj - delta_ij| for i, j <= check_order.
  double truncated_involution_defect = 0.0;
};

/// Coefficients of the one-mode operator f -> f o gamma in the Hermite basis.
///
/// H_n o gamma = sum_k w_kn H_k with monic H_k, so
///   w_kn = int H_k(x) H_n(gamma(x)) dnu_q / [k]_q!.
/// Internally the orthonormal matrix w~_kn = w_kn sqrt([k]_q! / [n]_q!) is
/// stored; it is symmetric and orthogonal in the limit K -> infinity.
class WCoefficients {
 public:
  WCoefficients(double q, int K, Eigen::MatrixXd ortho, WDiagnostics diag);

  double q() const noexcept { return q_; }
  int K() const noexcept { return K_; }
  int columns() const noexcept { return static_cast<int>(ortho_.cols()) - 1; }

  /// w_kn in the monic normalisation.
  double w(int k, int n) const;
  /// w~_kn in the orthonormal normalisation.
  double ortho(int k, int n) const { return ortho_(k, n); }
  const Eigen::MatrixXd& ortho_matrix() const noexcept { return ortho_; }

  /// sum_{k<=upto} w_kn^2 [k]_q! / [n]_q!, the captured part of ||W~ e_n||^2.
  double column_mass(int n, int upto) const;
  /// 1 - column_mass(n, K).
  double tail_mass(int n) const { return 1.0 - column_mass(n, K_); }

  const WDiagnostics& diagnostics() const noexcept { return diag_; }

 private:
  double q_;
  int K_;
  Eigen::MatrixXd ortho_;
  std::vector<double> log_fact_;
  WDiagnostics diag_;
};

/// Computes w up to row K.  Throws std::runtime_error when the completed Gram
/// defect exceeds 1e-5 (under-resolved quadrature).
WCoefficients w_matrix(const GammaMap& g, int K, const WOptions& opt = {});

/// W = V (W~ (x) Id) V* on a two-mode truncated space.
///
/// Each tower (a_0^*)^n phi / sqrt([n]_q!), n <= N - level(phi), is acted on
/// by the leading square block of w~ of matching size.
class BigW {
 public:
  BigW(const FockSpace& space, const WCoefficients& w, double rank_tol = 1e-10);

  const FockSpace& space() const noexcept { return *space_; }
  const TowerBasis& towers() const noexcept { return towers_; }

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const { return apply_power(x, 1); }
  /// Each tower acted on by the p-th power of its own truncated block; p = 2
  /// gives what W^2 must equal on the truncated space.
  Eigen::VectorXd apply_power(const Eigen::VectorXd& x, int p) const;
  const Eigen::MatrixXd& block() const noexcept { return block_; }
  /// Coordinates of x in the tower basis, indexed like towers().columns(level).
  std::vector<Eigen::VectorXd> tower_coordinates(const Eigen::VectorXd& x) const;
  /// Dense matrix in word coordinates.
  Eigen::MatrixXd matrix() const;
  OperatorRep rep() const;

  /// Orthonormality defect of the tower basis (1 when it is incomplete).
  double projection_defect() const noexcept { return towers_.orthonormality_defect(); }
  /// Norm of the part of W~ e_1 cut off by the level cutoff,
  /// (sum_{k>N} w~_k1^2)^{1/2}.
  double truncation_tail() const noexcept { return tail_; }

 private:
  const FockSpace* space_;
  TowerBasis towers_;
  Eigen::MatrixXd block_;  // w~ restricted to (N+1) x (N+1)
  double tail_ = 0.0;
};

/// Builds W; throws std::runtime_error if the projection defect exceeds 1e-3.
BigW build_big_w(const FockSpace& space, const WCoefficients& w);

struct LemmaReport {
  /// max |G W - (G W)^T|.
  double self_adjoint = 0.0;
  /// max ||(W^2 - Id) e|| / ||e|| over basis words e of level <= N - 1.
  double square_literal = 0.0;
  /// Same for W^2 - V (w~_T^2 (x) Id) V*, the square of the truncated blocks.
  double square_consistency = 0.0;
  /// <Omega, (W X_0 W)^m Omega>_q for m = 1..6.
  std::vector<double> vacuum_moments;
  /// int gamma^m dnu_q for m = 1..6.
  std::vector<double> gamma_moments;
  /// max_m |vacuum_moments - (w~_T J_T w~_T)^m_00|, J_T the truncated Jacobi matrix.
  double moment_consistency = 0.0;
  /// max ||W phi - phi|| over kernel vectors phi.
  double kernel_fixing = 0.0;
  /// max ||W (a_0^*)^n phi - sum_k w_kn (a_0^*)^k phi|| for n <= 2.
  double series_identity = 0.0;
  /// norm of the omitted series part, (sum_{k>T} w~_k1^2)^{1/2}.
  double series_tail = 0.0;
};

LemmaReport lemma_checks(const BigW& W, const WCoefficients& w, const GammaMap& g);

}  // namespace qfock
