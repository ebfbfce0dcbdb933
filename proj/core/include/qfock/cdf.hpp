#pragma once

#include <array>
#include <vector>

#include "qfock/qspecial.hpp"

namespace qfock {

/// Cumulative distribution of nu_q and its inverse.
///
/// Internally the law is carried in the angle variable theta in [0, pi]
/// (x = L cos theta).  The theta axis is cut into 4096 panels, refined where
/// the density is not resolved by a degree-16 Chebyshev interpolant; each
/// panel stores the Chebyshev series of the integrated density, so the
/// cumulative mass is available to near machine precision anywhere.
///
/// upper_mass(theta) = nu_q([L cos theta, L]) is the primitive quantity:
/// evaluating the lower tail through the reflection x -> -x avoids
/// cancellation at both ends of the support.
class CdfModel {
 public:
  static constexpr int kInitialPanels = 4096;
  static constexpr int kDegree = 16;

  explicit CdfModel(const DensityModel& density);

  const DensityModel& density() const noexcept { return density_; }
  const QContext& context() const noexcept { return density_.context(); }

  /// nu_q([-L, x]); x outside [-L, L] is clamped.
  double cdf(double x) const;
  /// Smallest x with cdf(x) = p.  Throws std::domain_error for p outside [0, 1].
  double inv_cdf(double p) const;

  /// nu_q([L cos theta, L]) for theta in [0, pi].
  double upper_mass(double theta) const;
  /// Inverse of upper_mass on [0, 1].
  double theta_of_upper_mass(double mass) const;

  /// nu_q([0, L]), one half up to rounding.
  double half_mass() const noexcept { return half_mass_; }
  /// nu_q([0, |x|]).  Near 0 this comes from a fit of nu_q([0, x]) / x rather
  /// than a difference of tail masses, so it keeps relative precision.
  double central_mass(double x) const;
  /// y in [0, L] with central_mass(y) = m, for m in [0, half_mass()].
  double central_quantile(double m) const;

  std::size_t panel_count() const noexcept { return panels_.size(); }
  /// Total mass of the tabulated density before normalisation.
  double raw_total_mass() const noexcept { return raw_total_; }

 private:
  struct Panel {
    double a, b;                              // theta range
    std::array<double, kDegree + 1> rho;      // density Chebyshev coefficients
    std::array<double, kDegree + 2> prim;     // primitive, zero at u = -1
    double mass_before;                       // cumulative mass up to a
  };

  void build_panel(double a, double b, int depth);
  void build_central_fits();
  double panel_mass(const Panel& p, double u) const;
  double panel_density(const Panel& p, double u) const;
  std::size_t locate_theta(double theta) const;

  DensityModel density_;
  std::vector<Panel> panels_;
  double raw_total_ = 0.0;
  double half_mass_ = 0.5;
  static constexpr int kCentralDegree = 40;
  double central_cut_ = 0.0;       // below this, central_mass uses the fits
  double central_cut_mass_ = 0.0;  // central_mass(central_cut_)
  // Chebyshev fits on [0, central_cut_] of nu([0, x]) / x and of the density
  std::array<double, kCentralDegree + 1> central_ratio_{};
  std::array<double, kCentralDegree + 1> central_density_{};
};

}  // namespace qfock
