#include "qfock/involution.hpp"

#include "qfock/integrate.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qfock {

GammaMap::GammaMap(std::shared_ptr<const CdfModel> cdf) : cdf_(std::move(cdf)) {
  if (!cdf_) throw std::invalid_argument("GammaMap: null CDF model");
}

double GammaMap::theta_image(double theta) const {
  constexpr double half = 0.5 * std::numbers::pi;
  if (theta <= 0.0 || theta >= std::numbers::pi || theta == half) return half;
  const DensityModel& rho = cdf_->density();
  return rho.theta_of_x((*this)(rho.x_of_theta(theta)));
}

double GammaMap::operator()(double x) const {
  const double L = context().support();
  if (std::abs(x) > L) {
    throw std::domain_error("gamma: argument " + std::to_string(x) + " outside [-L, L]");
  }
  if (x == 0.0 || std::abs(x) == L) return 0.0;
  if (x < 0.0) return -(*this)(-x);
  // mass of [0, x] equals mass of [gamma(x), L]; each branch works with the
  // smaller of the two masses so that neither is formed by cancellation
  const double upper = cdf_->upper_mass(cdf_->density().theta_of_x(x));
  if (upper < 0.5 * cdf_->half_mass()) return cdf_->central_quantile(upper);
  return cdf_->density().x_of_theta(cdf_->theta_of_upper_mass(cdf_->central_mass(x)));
}

double GammaMap::fixed_point() const { return cdf_->inv_cdf(0.75); }

namespace {

constexpr int kPoints = 20;
constexpr double kGrading = 0.2;        // panel length ratio towards an end
constexpr double kSmallestMass = 1e-40;  // mass left out at each end

}  // namespace

MassRule mass_rule(const GammaMap& g, int max_degree, int panel_scale) {
  if (max_degree < 0 || panel_scale < 1) {
    throw std::invalid_argument("mass_rule: degree must be >= 0 and panel scale >= 1");
  }
  const CdfModel& cdf = g.cdf();
  const DensityModel& rho = cdf.density();
  const double c = cdf.half_mass();
  const double a = c / 8.0;
  const GaussLegendre gl = gauss_legendre(kPoints);

  // nodes of (0, c/2]; the other quarter is the mirror image u -> c - u
  std::vector<double> u, w;
  auto panel = [&](double lo, double hi) {
    for (int i = 0; i < kPoints; ++i) {
      u.push_back(lo + 0.5 * (hi - lo) * (gl.nodes[i] + 1.0));
      w.push_back(0.5 * (hi - lo) * gl.weights[i]);
    }
  };
  const double ratio = std::pow(kGrading, 1.0 / panel_scale);
  for (double hi = a; hi > kSmallestMass; hi *= ratio) panel(hi * ratio, hi);
  const int bulk = std::max(2, (max_degree + 5) / 6) * panel_scale;
  const double h = (0.5 * c - a) / bulk;
  for (int p = 0; p < bulk; ++p) panel(a + p * h, a + (p + 1) * h);

  const std::size_t n = u.size();
  std::vector<double> near(n), far(n);
  for (std::size_t i = 0; i < n; ++i) {
    near[i] = rho.x_of_theta(cdf.theta_of_upper_mass(u[i]));
    far[i] = cdf.central_quantile(u[i]);
  }
  MassRule rule;
  rule.x.reserve(4 * n);
  rule.gamma.reserve(4 * n);
  rule.weights.reserve(4 * n);
  for (const double sign : {1.0, -1.0}) {
    for (std::size_t i = 0; i < n; ++i) {
      rule.x.push_back(sign * near[i]);
      rule.gamma.push_back(sign * far[i]);
      rule.weights.push_back(w[i]);
      rule.x.push_back(sign * far[i]);
      rule.gamma.push_back(sign * near[i]);
      rule.weights.push_back(w[i]);
    }
  }
  return rule;
}

double ode_residual(double x, const GammaMap& g, double h) {
  const double L = g.context().support();
  if (!(h > 0.0)) throw std::domain_error("ode_residual: step must be positive");
  if (x == 0.0 || std::abs(x) - h <= 0.0 || std::abs(x) + h >= L) {
    throw std::domain_error("ode_residual: stencil around " + std::to_string(x) +
                            " straddles 0 or an endpoint");
  }
  const DensityModel& rho = g.cdf().density();
  const double gx = g(x);
  const double dgamma = (g(x + h) - g(x - h)) / (2.0 * h);
  return rho.evaluate(x) + rho.evaluate(gx) * dgamma;
}

PushforwardReport check_pushforward(const GammaMap& g, int m_max) {
  if (m_max < 1 || m_max > 12) {
    throw std::invalid_argument("check_pushforward: m_max must lie in [1, 12]");
  }
  const MassRule rule = mass_rule(g, 24);
  const QuadratureRule gauss = quadrature(g.context(), 16);
  std::vector<double> gx(rule.size());
  for (std::size_t i = 0; i < rule.size(); ++i) gx[i] = g(rule.x[i]);

  PushforwardReport rep;
  for (int m = 1; m <= m_max; ++m) {
    double mg = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) mg += rule.weights[i] * std::pow(gx[i], m);
    const double mx = gauss.integrate([m](double x) { return std::pow(x, m); });
    rep.rows.push_back({m, mg, mx});
    rep.max_abs_discrepancy = std::max(rep.max_abs_discrepancy, std::abs(mg - mx));
  }
  return rep;
}

}  // namespace qfock
