#include "qfock/qcontext.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qfock {

QContext::QContext(double q, Tolerances tol, std::optional<int> series_cutoff,
                   int fock_level)
    : q_(q), support_(0.0), tol_(tol), series_cutoff_(0), fock_level_(fock_level) {
  if (!(q > 0.0 && q < 1.0)) {
    throw std::invalid_argument("QContext: q must lie strictly inside (0, 1), got " +
                                std::to_string(q));
  }
  if (!(tol.product > 0.0) || !(tol.quad > 0.0)) {
    throw std::invalid_argument("QContext: tolerances must be positive");
  }
  support_ = 2.0 / std::sqrt(1.0 - q);
  series_cutoff_ = series_cutoff.value_or(default_series_cutoff(q, tol.quad));
  if (series_cutoff_ < 4) {
    throw std::invalid_argument("QContext: series cutoff K must be >= 4");
  }
  if (fock_level_ < 4) {
    throw std::invalid_argument("QContext: Fock level N must be >= 4");
  }
}

int QContext::default_series_cutoff(double q, double tol) {
  const double k = std::ceil(std::log(tol) / std::log(q));
  return std::max(24, static_cast<int>(k));
}

}  // namespace qfock
