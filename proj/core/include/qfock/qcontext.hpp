#pragma once

#include <optional>

namespace qfock {

/// Numeric tolerances shared by every stage of the pipeline.
struct Tolerances {
  double product = 1e-16;  ///< truncation of infinite q-products
  double quad = 1e-10;     ///< quadrature / root-finding target
};

/// Deformation parameter q together with the derived support half-width
/// L = 2/sqrt(1-q) and the truncation orders used downstream.
///
/// Construction validates 0 < q < 1; all other members are derived or
/// checked here so consumers never re-validate.
class QContext {
 public:
  explicit QContext(double q, Tolerances tol = {},
                    std::optional<int> series_cutoff = std::nullopt,
                    int fock_level = 6);

  double q() const noexcept { return q_; }
  /// Support half-width L.
  double support() const noexcept { return support_; }
  double tol_product() const noexcept { return tol_.product; }
  double tol_quad() const noexcept { return tol_.quad; }
  const Tolerances& tolerances() const noexcept { return tol_; }
  /// Cutoff K for the w-coefficient series.
  int series_cutoff() const noexcept { return series_cutoff_; }
  /// Fock level cutoff N.
  int fock_level() const noexcept { return fock_level_; }

  /// max(24, ceil(log(tol)/log(q))): q^K falls below tol.
  static int default_series_cutoff(double q, double tol);

 private:
  double q_;
  double support_;
  Tolerances tol_;
  int series_cutoff_;
  int fock_level_;
};

}  // namespace qfock
