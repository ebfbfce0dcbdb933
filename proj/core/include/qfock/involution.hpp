#pragma once

#include <memory>
#include <vector>

#include "qfock/cdf.hpp"

namespace qfock {

/// The nu_q-preserving involution gamma of [-L, L].
///
/// gamma reverses the orientation of each half-support and swaps the ends:
/// on (0, L] it solves F(gamma(x)) + F(x) = 3/2, on [-L, 0) it solves
/// F(gamma(x)) + F(x) = 1/2, so gamma(+-L) = 0 and gamma(0+-) = +-L.
/// gamma(0) := 0; the jump sits on a null set.
class GammaMap {
 public:
  explicit GammaMap(std::shared_ptr<const CdfModel> cdf);

  const CdfModel& cdf() const noexcept { return *cdf_; }
  const QContext& context() const noexcept { return cdf_->context(); }

  /// gamma(x).  Throws std::domain_error for |x| > L.
  double operator()(double x) const;

  /// gamma in the angle variable: for theta in [0, pi] returns theta' with
  /// L cos theta' = gamma(L cos theta).
  double theta_image(double theta) const;

  /// x* in (0, L) with F(x*) = 3/4, the fixed point on the right half.
  double fixed_point() const;

 private:
  std::shared_ptr<const CdfModel> cdf_;
};

/// nu_q'(x) + nu_q'(gamma(x)) gamma'(x) with a central difference of step h.
/// Throws std::domain_error if [x-h, x+h] touches 0 or leaves (-L, L).
double ode_residual(double x, const GammaMap& g, double h);

/// Quadrature for integrals of f(x, gamma(x)) against nu_q.
///
/// Nodes live in the mass variable u = nu_q([x, L]), where gamma is the
/// reflection u -> c - u of each half (c the mass of [0, L]).  Panels are
/// uniform in the bulk of (0, c) and geometrically graded towards both ends,
/// where x(u) has algebraic or, for q near 1, logarithmic singularities.
/// The node set of each half is symmetric under the reflection, so gamma at a
/// node is the abscissa of its mirror node.
struct MassRule {
  std::vector<double> x;
  std::vector<double> gamma;    ///< gamma(x) by CDF reflection
  std::vector<double> weights;  ///< nu_q mass per node

  std::size_t size() const noexcept { return x.size(); }
};

/// Bulk panels are sized so that polynomials up to `max_degree` in x are
/// resolved; `panel_scale` multiplies every panel count.
MassRule mass_rule(const GammaMap& g, int max_degree, int panel_scale = 1);

struct PushforwardRow {
  int order;
  double gamma_moment;  ///< int gamma(x)^m dnu_q
  double moment;        ///< int x^m dnu_q
};

struct PushforwardReport {
  std::vector<PushforwardRow> rows;
  double max_abs_discrepancy = 0.0;
};

/// Moments of gamma(X), with gamma evaluated pointwise by GammaMap, against the
/// Gauss-rule moments of X for 1 <= m <= m_max (m_max <= 12).
PushforwardReport check_pushforward(const GammaMap& g, int m_max);

}  // namespace qfock
