#include "certiq/stats.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/erf.hpp>

namespace certiq {

namespace {

void check_binomial(std::uint64_t k, std::uint64_t n, double alpha) {
  if (n == 0) throw std::invalid_argument("Clopper-Pearson needs n >= 1");
  if (k > n)
    throw std::invalid_argument("successes " + std::to_string(k) +
                                " exceed trials " + std::to_string(n));
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("alpha must lie in (0, 1)");
}

}  // namespace

double std_normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("normal quantile needs p in (0, 1), got " +
                            std::to_string(p));
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double clopper_pearson_lower(std::uint64_t k, std::uint64_t n, double alpha) {
  check_binomial(k, n, alpha);
  if (k == 0) return 0.0;
  // alpha-quantile of Beta(k, n - k + 1)
  return boost::math::ibeta_inv(static_cast<double>(k),
                                static_cast<double>(n - k + 1), alpha);
}

double clopper_pearson_upper(std::uint64_t k, std::uint64_t n, double alpha) {
  check_binomial(k, n, alpha);
  if (k == n) return 1.0;
  // (1 - alpha)-quantile of Beta(k + 1, n - k)
  return boost::math::ibetac_inv(static_cast<double>(k + 1),
                                 static_cast<double>(n - k), alpha);
}

}  // namespace certiq
