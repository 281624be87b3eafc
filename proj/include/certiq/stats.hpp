#pragma once

#include <cstdint>

namespace certiq {

/// Standard normal CDF.
double std_normal_cdf(double x);

/// Inverse standard normal CDF; p must lie in (0, 1).
double std_normal_quantile(double p);

/// One-sided Clopper-Pearson bounds at level 1 - alpha for k successes in n
/// trials: P(p >= lower) >= 1 - alpha and P(p <= upper) >= 1 - alpha.
double clopper_pearson_lower(std::uint64_t k, std::uint64_t n, double alpha);
double clopper_pearson_upper(std::uint64_t k, std::uint64_t n, double alpha);

}  // namespace certiq
