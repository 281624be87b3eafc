#include "certiq/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "certiq/parallel.hpp"
#include "certiq/stats.hpp"
#include "json.hpp"

namespace certiq {

void SmoothedModel::validate() const {
  if (theta.size() != sigma.size())
    throw std::invalid_argument("theta and sigma lengths differ");
  for (double s : sigma)
    if (!(s > 0.0) || !std::isfinite(s))
      throw std::invalid_argument("sigma entries must be finite and > 0");
}

std::vector<double> sample_perturbed_params(const SmoothedModel& model,
                                            RngStream& stream) {
  std::vector<double> z(model.dim());
  for (std::size_t i = 0; i < z.size(); ++i)
    z[i] = model.theta[i] + model.sigma[i] * stream.normal();
  return z;
}

std::vector<std::uint64_t> mc_top_class_counts(
    const SmoothedModel& model, const Statevector& x_state,
    const ParamCircuit& circuit, const ClassReadout& readout,
    std::uint64_t shots, const RngStream& stream) {
  if (shots < 1) throw std::invalid_argument("shots must be >= 1");
  model.validate();
  std::vector<std::size_t> top(shots);
  parallel_for(shots, [&](std::size_t k) {
    RngStream s = stream.fork(k);
    const auto z = sample_perturbed_params(model, s);
    top[k] = argmax(classifier_eval(circuit, readout, x_state, z));
  });
  std::vector<std::uint64_t> counts(readout.class_count(), 0);
  for (auto c : top) ++counts[c];
  return counts;
}

double certified_radius(double pA_lower, double pB_upper) {
  const double gap = std_normal_quantile(pA_lower) - std_normal_quantile(pB_upper);
  return std::max(0.0, gap / 2.0);
}

CertificationResult certify(const SmoothedModel& model,
                            const Statevector& x_state,
                            const ParamCircuit& circuit,
                            const ClassReadout& readout,
                            const CertifyOptions& opts,
                            const RngStream& stream) {
  if (opts.n0 < 1 || opts.n < 1)
    throw std::invalid_argument("certify needs n0 >= 1 and n >= 1");

  const auto select = mc_top_class_counts(model, x_state, circuit, readout,
                                          opts.n0, stream.fork("select"));
  const std::size_t guess = argmax(std::vector<double>(select.begin(), select.end()));
  const auto counts = mc_top_class_counts(model, x_state, circuit, readout,
                                          opts.n, stream.fork("estimate"));

  CertificationResult r;
  r.alpha = opts.alpha;
  r.shots_used = opts.n0 + opts.n;
  r.semi_axes.assign(model.dim(), 0.0);

  const std::size_t n_classes = counts.size();
  if (opts.per_class_upper && n_classes > 2) {
    const double a_half = opts.alpha / 2.0;
    r.pA_lower = clopper_pearson_lower(counts[guess], opts.n, a_half);
    r.pB_upper = 0.0;
    const double a_other = a_half / static_cast<double>(n_classes - 1);
    for (std::size_t c = 0; c < n_classes; ++c)
      if (c != guess)
        r.pB_upper = std::max(r.pB_upper,
                              clopper_pearson_upper(counts[c], opts.n, a_other));
  } else {
    r.pA_lower = clopper_pearson_lower(counts[guess], opts.n, opts.alpha);
    r.pB_upper = 1.0 - r.pA_lower;
  }

  if (r.pA_lower <= r.pB_upper) return r;  // abstain
  r.s_e = certified_radius(r.pA_lower, r.pB_upper);
  if (!(r.s_e > 0.0)) {
    r.s_e = 0.0;
    return r;
  }
  r.predicted_class = static_cast<int>(guess);
  for (std::size_t i = 0; i < model.dim(); ++i) r.semi_axes[i] = r.s_e * model.sigma[i];
  return r;
}

std::string_view predict_mode_name(PredictMode m) {
  return m == PredictMode::CountArgmax ? "count-argmax" : "mean-prob";
}

PredictMode predict_mode_from_name(std::string_view name) {
  if (name == "count-argmax") return PredictMode::CountArgmax;
  if (name == "mean-prob") return PredictMode::MeanProb;
  throw std::invalid_argument("unknown prediction mode '" + std::string(name) + "'");
}

std::size_t smoothed_predict(const SmoothedModel& model,
                             const Statevector& x_state,
                             const ParamCircuit& circuit,
                             const ClassReadout& readout, std::uint64_t M,
                             const RngStream& stream, PredictMode mode) {
  if (M < 1) throw std::invalid_argument("M must be >= 1");
  model.validate();
  const std::size_t n_classes = readout.class_count();
  std::vector<std::vector<double>> probs(M);
  parallel_for(M, [&](std::size_t k) {
    RngStream s = stream.fork(k);
    probs[k] = classifier_eval(circuit, readout, x_state,
                               sample_perturbed_params(model, s));
  });
  std::vector<double> score(n_classes, 0.0);
  for (const auto& p : probs) {
    if (mode == PredictMode::CountArgmax)
      score[argmax(p)] += 1.0;
    else
      for (std::size_t c = 0; c < n_classes; ++c) score[c] += p[c];
  }
  return argmax(score);
}

bool ellipsoid_contains(std::span<const double> delta,
                        std::span<const double> sigma, double s_e) {
  if (delta.size() != sigma.size())
    throw std::invalid_argument("delta and sigma lengths differ");
  if (!(s_e > 0.0)) return false;
  double q = 0.0;
  for (std::size_t i = 0; i < delta.size(); ++i) {
    const double axis = s_e * sigma[i];
    q += (delta[i] / axis) * (delta[i] / axis);
  }
  return q < 1.0;
}

double log_certified_volume(std::span<const double> sigma, double s_e) {
  if (sigma.empty()) throw std::invalid_argument("volume of a 0-dimensional ellipsoid");
  if (s_e < 0.0) throw std::invalid_argument("s_e must be >= 0");
  if (s_e == 0.0) return -INFINITY;
  const double d = static_cast<double>(sigma.size());
  double log_v = std::log(2.0) + 0.5 * d * std::log(std::numbers::pi) -
                 std::log(d) - std::lgamma(d / 2.0);
  for (double s : sigma) log_v += std::log(s_e * s);
  return log_v;
}

double certified_volume(std::span<const double> sigma, double s_e) {
  if (s_e == 0.0) return 0.0;
  // small D: direct product keeps the closed-form cases exact to rounding
  if (sigma.size() <= 16) {
    const double d = static_cast<double>(sigma.size());
    double v = 2.0 * std::pow(std::numbers::pi, d / 2.0) / (d * std::tgamma(d / 2.0));
    for (double s : sigma) v *= s_e * s;
    return v;
  }
  return std::exp(log_certified_volume(sigma, s_e));
}

double certified_area_geometric_mean(std::span<const double> sigma, double s_e) {
  if (s_e == 0.0) return 0.0;
  return std::exp(log_certified_volume(sigma, s_e) / static_cast<double>(sigma.size()));
}

std::string certification_to_json(const CertificationResult& r) {
  nlohmann::json j{{"predicted_class", r.predicted_class},
                   {"abstained", r.abstained()},
                   {"pA_lower", r.pA_lower},
                   {"pB_upper", r.pB_upper},
                   {"s_e", r.s_e},
                   {"semi_axes", r.semi_axes},
                   {"shots_used", r.shots_used},
                   {"alpha", r.alpha}};
  return j.dump();
}

}  // namespace certiq
