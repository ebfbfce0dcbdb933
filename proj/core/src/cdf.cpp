#include "qfock/cdf.hpp"

#include "qfock/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qfock {

namespace {

constexpr int kMaxDepth = 20;
constexpr double kRefineRelTol = 1e-12;  // above the rounding floor of the product

template <std::size_t M>
double clenshaw(const std::array<double, M>& c, double u) {
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t k = M; k-- > 1;) {
    const double b0 = 2.0 * u * b1 - b2 + c[k];
    b2 = b1;
    b1 = b0;
  }
  return u * b1 - b2 + c[0];
}

// Chebyshev coefficients of f on [a, b] from its values at the Lobatto points.
template <std::size_t M>
std::array<double, M> chebyshev_fit(const std::array<double, M>& f) {
  constexpr int n = static_cast<int>(M) - 1;
  std::array<double, M> c{};
  for (int k = 0; k <= n; ++k) {
    double s = 0.0;
    for (int j = 0; j <= n; ++j) {
      const double w = (j == 0 || j == n) ? 0.5 : 1.0;
      s += w * f[j] * std::cos(j * k * std::numbers::pi / n);
    }
    c[k] = ((k == 0 || k == n) ? 1.0 : 2.0) * s / n;
  }
  return c;
}

}  // namespace

CdfModel::CdfModel(const DensityModel& density) : density_(density) {
  const double h = std::numbers::pi / kInitialPanels;
  panels_.reserve(kInitialPanels);
  for (int i = 0; i < kInitialPanels; ++i) {
    const double a = i * h;
    const double b = (i + 1 == kInitialPanels) ? std::numbers::pi : (i + 1) * h;
    build_panel(a, b, 0);
  }
  double cum = 0.0;
  for (auto& p : panels_) {
    p.mass_before = cum;
    cum += panel_mass(p, 1.0);
  }
  raw_total_ = cum;
  for (auto& p : panels_) {
    p.mass_before /= cum;
    for (double& c : p.rho) c /= cum;
    for (double& c : p.prim) c /= cum;
  }
  half_mass_ = upper_mass(0.5 * std::numbers::pi);
  build_central_fits();
}

void CdfModel::build_panel(double a, double b, int depth) {
  constexpr int n = kDegree;
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::array<double, n + 1> f{};
  for (int j = 0; j <= n; ++j) {
    f[j] = density_.evaluate_theta(mid + half * std::cos(j * std::numbers::pi / n));
  }
  Panel p{};
  p.a = a;
  p.b = b;
  for (int k = 0; k <= n; ++k) {
    double s = 0.0;
    for (int j = 0; j <= n; ++j) {
      const double w = (j == 0 || j == n) ? 0.5 : 1.0;
      s += w * f[j] * std::cos(j * k * std::numbers::pi / n);
    }
    p.rho[k] = ((k == 0 || k == n) ? 1.0 : 2.0) * s / n;
  }

  double cmax = 0.0;
  for (double c : p.rho) cmax = std::max(cmax, std::abs(c));
  const double tail = std::abs(p.rho[n - 1]) + std::abs(p.rho[n]);
  if (tail > kRefineRelTol * cmax && depth < kMaxDepth) {
    build_panel(a, mid, depth + 1);
    build_panel(mid, b, depth + 1);
    return;
  }

  // primitive in u, scaled to theta
  p.prim.fill(0.0);
  p.prim[1] += p.rho[0];
  p.prim[2] += p.rho[1] / 4.0;
  for (int k = 2; k <= n; ++k) {
    p.prim[k + 1] += p.rho[k] / (2.0 * (k + 1));
    p.prim[k - 1] -= p.rho[k] / (2.0 * (k - 1));
  }
  for (double& c : p.prim) c *= half;
  double at_minus_one = 0.0;
  for (int k = 0; k <= n + 1; ++k) at_minus_one += (k % 2 == 0 ? 1.0 : -1.0) * p.prim[k];
  p.prim[0] -= at_minus_one;
  p.mass_before = 0.0;
  panels_.push_back(p);
}

double CdfModel::panel_mass(const Panel& p, double u) const { return clenshaw(p.prim, u); }

double CdfModel::panel_density(const Panel& p, double u) const { return clenshaw(p.rho, u); }

std::size_t CdfModel::locate_theta(double theta) const {
  auto it = std::upper_bound(panels_.begin(), panels_.end(), theta,
                             [](double t, const Panel& p) { return t < p.a; });
  if (it == panels_.begin()) return 0;
  return static_cast<std::size_t>(std::distance(panels_.begin(), it) - 1);
}

double CdfModel::upper_mass(double theta) const {
  if (theta <= 0.0) return 0.0;
  if (theta >= std::numbers::pi) return 1.0;
  const Panel& p = panels_[locate_theta(theta)];
  const double u = std::clamp((2.0 * theta - p.a - p.b) / (p.b - p.a), -1.0, 1.0);
  return p.mass_before + panel_mass(p, u);
}

double CdfModel::theta_of_upper_mass(double mass) const {
  if (mass <= 0.0) return 0.0;
  if (mass >= 1.0) return std::numbers::pi;
  auto it = std::upper_bound(panels_.begin(), panels_.end(), mass,
                             [](double m, const Panel& p) { return m < p.mass_before; });
  const Panel& p = *(it == panels_.begin() ? it : std::prev(it));
  const double target = mass - p.mass_before;
  const double half = 0.5 * (p.b - p.a);
  const double total = panel_mass(p, 1.0);

  double lo = -1.0, hi = 1.0;
  double u = (total > 0.0) ? std::clamp(2.0 * target / total - 1.0, -1.0, 1.0) : 0.0;
  for (int it2 = 0; it2 < 200; ++it2) {
    const double r = panel_mass(p, u) - target;
    if (r > 0.0) hi = u; else lo = u;
    if (std::abs(r) <= 1e-16 * mass || (hi - lo) * half < 1e-17) break;
    const double d = half * panel_density(p, u);
    double next = (d > 0.0) ? u - r / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - u) * half < 1e-18) {
      u = next;
      break;
    }
    u = next;
  }
  return std::clamp(0.5 * (p.a + p.b) + half * u, 0.0, std::numbers::pi);
}

void CdfModel::build_central_fits() {
  constexpr int n = kCentralDegree;
  central_cut_ = std::min(0.125 * context().support(), 1.0);
  const double half = 0.5 * central_cut_;
  const GaussLegendre gl = gauss_legendre(30);
  std::array<double, n + 1> ratio{}, dens{};
  for (int j = 0; j <= n; ++j) {
    const double x = half * (1.0 + std::cos(j * std::numbers::pi / n));
    dens[j] = density_.evaluate(x) / raw_total_;
    // nu([0, x]) / x = int_0^1 rho(x t) dt
    double s = 0.0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      s += gl.weights[i] * density_.evaluate(0.5 * x * (gl.nodes[i] + 1.0));
    }
    ratio[j] = 0.5 * s / raw_total_;
  }
  central_ratio_ = chebyshev_fit(ratio);
  central_density_ = chebyshev_fit(dens);
  central_cut_mass_ = central_mass(central_cut_);
}

double CdfModel::central_mass(double x) const {
  const double L = context().support();
  const double y = std::min(std::abs(x), L);
  if (y > central_cut_) return half_mass_ - upper_mass(density_.theta_of_x(y));
  return y * clenshaw(central_ratio_, 2.0 * y / central_cut_ - 1.0);
}

double CdfModel::central_quantile(double m) const {
  if (m <= 0.0) return 0.0;
  if (m >= half_mass_) return context().support();
  if (m > central_cut_mass_) return density_.x_of_theta(theta_of_upper_mass(half_mass_ - m));
  double lo = 0.0, hi = central_cut_;
  double y = std::min(m / clenshaw(central_ratio_, -1.0), hi);
  for (int it = 0; it < 100; ++it) {
    const double r = central_mass(y) - m;
    if (r > 0.0) hi = y; else lo = y;
    if (r == 0.0 || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
    double next = y - r / clenshaw(central_density_, 2.0 * y / central_cut_ - 1.0);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - y) <= 2.0 * std::numeric_limits<double>::epsilon() * y) {
      y = next;
      break;
    }
    y = next;
  }
  return y;
}

double CdfModel::cdf(double x) const {
  // nu([-L, x]) = nu([-x, L]) by symmetry
  return upper_mass(density_.theta_of_x(-x));
}

double CdfModel::inv_cdf(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::domain_error("inv_cdf: probability must lie in [0, 1], got " + std::to_string(p));
  }
  return -density_.x_of_theta(theta_of_upper_mass(p));
}

}  // namespace qfock
