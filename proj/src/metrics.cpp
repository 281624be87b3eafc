#include "certiq/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace certiq {

MetricsReport metrics_report(std::span<const CertificationResult> results,
                             std::span<const int> labels) {
  if (results.empty()) throw std::invalid_argument("metrics of an empty result set");
  if (results.size() != labels.size())
    throw std::invalid_argument("one label per certification result required");

  MetricsReport m;
  m.samples = results.size();
  std::size_t correct = 0;
  double cagm_sum = 0.0;
  for (std::size_t k = 0; k < results.size(); ++k) {
    const auto& r = results[k];
    if (r.abstained()) {
      ++m.abstained;
      continue;
    }
    if (r.predicted_class == labels[k]) ++correct;
    const auto& axes = r.semi_axes;
    const double d = static_cast<double>(axes.size());
    double mean = 0.0;
    for (double a : axes) mean += a;
    mean /= d;
    double var = 0.0;
    for (double a : axes) var += (a - mean) * (a - mean);
    m.semi_axis_avg += mean;
    m.semi_axis_std += std::sqrt(var / d);

    // V^{1/D} from the semi-axes: log V = log c_D + sum log a_i. Using unit
    // sigma with s_e = 1 reuses the volume constant.
    const std::vector<double> ones(axes.size(), 1.0);
    double log_v = log_certified_volume(ones, 1.0);
    for (double a : axes) log_v += std::log(a);
    cagm_sum += std::exp(log_v / d);
  }
  const double n = static_cast<double>(m.samples);
  m.cagm = cagm_sum / n;
  m.semi_axis_avg /= n;
  m.semi_axis_std /= n;
  m.smoothed_accuracy = static_cast<double>(correct) / n;
  const std::size_t certified = m.samples - m.abstained;
  m.cagm_certified = certified ? cagm_sum / static_cast<double>(certified) : 0.0;
  return m;
}

std::string MetricsReport::to_json() const {
  nlohmann::json j{{"cagm", cagm},
                   {"semi_axis_avg", semi_axis_avg},
                   {"semi_axis_std", semi_axis_std},
                   {"smoothed_accuracy", smoothed_accuracy},
                   {"cagm_certified", cagm_certified},
                   {"samples", samples},
                   {"abstained", abstained}};
  return j.dump();
}

MetricsReport MetricsReport::from_json(std::string_view text) {
  const auto j = nlohmann::json::parse(text);
  MetricsReport m;
  m.cagm = j.at("cagm").get<double>();
  m.semi_axis_avg = j.at("semi_axis_avg").get<double>();
  m.semi_axis_std = j.at("semi_axis_std").get<double>();
  m.smoothed_accuracy = j.at("smoothed_accuracy").get<double>();
  m.cagm_certified = j.value("cagm_certified", 0.0);
  m.samples = j.value("samples", std::size_t{0});
  m.abstained = j.value("abstained", std::size_t{0});
  return m;
}

}  // namespace certiq
