#pragma once

#include <span>
#include <string>
#include <vector>

#include "certiq/smoothing.hpp"

namespace certiq {

/// Robustness metrics averaged over a test set. Abstentions count as
/// incorrect and contribute zero volume and zero semi-axes.
struct MetricsReport {
  double cagm = 0.0;             // mean of V^{1/D}
  double semi_axis_avg = 0.0;    // mean over samples of mean_i s_e sigma_i
  double semi_axis_std = 0.0;    // mean over samples of std_i s_e sigma_i
  double smoothed_accuracy = 0.0;
  double cagm_certified = 0.0;   // mean of V^{1/D} over non-abstained samples
  std::size_t samples = 0;
  std::size_t abstained = 0;

  std::string to_json() const;
  static MetricsReport from_json(std::string_view text);
};

MetricsReport metrics_report(std::span<const CertificationResult> results,
                             std::span<const int> labels);

}  // namespace certiq
