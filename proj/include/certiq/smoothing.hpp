#pragma once

#include <span>
#include <string>
#include <vector>

#include "certiq/circuit.hpp"
#include "certiq/rng.hpp"

namespace certiq {

/// Gaussian smoothing N(theta, diag(sigma^2)) around a parameter vector.
struct SmoothedModel {
  std::vector<double> theta;
  std::vector<double> sigma;

  /// Throws unless lengths match and every sigma_i > 0.
  void validate() const;
  std::size_t dim() const { return theta.size(); }
};

/// theta + sigma (.) s with s ~ N(0, I) drawn from `stream`.
std::vector<double> sample_perturbed_params(const SmoothedModel& model,
                                            RngStream& stream);

/// Argmax-class counts over `shots` perturbed evaluations. Shot k draws from
/// stream.fork(k), so the result does not depend on the thread count.
std::vector<std::uint64_t> mc_top_class_counts(
    const SmoothedModel& model, const Statevector& x_state,
    const ParamCircuit& circuit, const ClassReadout& readout,
    std::uint64_t shots, const RngStream& stream);

/// max(0, (Phi^-1(pA_lower) - Phi^-1(pB_upper)) / 2). Inputs must lie in
/// (0, 1).
double certified_radius(double pA_lower, double pB_upper);

inline constexpr int kAbstain = -1;

struct CertificationResult {
  int predicted_class = kAbstain;
  double pA_lower = 0.0;
  double pB_upper = 1.0;
  double s_e = 0.0;                 // robust scale
  std::vector<double> semi_axes;    // s_e * sigma
  std::uint64_t shots_used = 0;
  double alpha = 0.0;

  bool abstained() const { return predicted_class == kAbstain; }
};

struct CertifyOptions {
  std::uint64_t n0 = 100;    // selection shots
  std::uint64_t n = 1000;    // estimation shots
  double alpha = 0.01;
  // false: pB_upper = 1 - pA_lower. true: per-class upper bounds, with alpha
  // split evenly between pA and the N - 1 competitors.
  bool per_class_upper = false;
};

/// Two-stage certificate: select the top class on n0 shots, then bound its
/// probability on n independent shots. Abstains when no positive radius
/// results.
CertificationResult certify(const SmoothedModel& model,
                            const Statevector& x_state,
                            const ParamCircuit& circuit,
                            const ClassReadout& readout,
                            const CertifyOptions& opts,
                            const RngStream& stream);

enum class PredictMode { CountArgmax, MeanProb };

std::string_view predict_mode_name(PredictMode m);
PredictMode predict_mode_from_name(std::string_view name);

/// Monte-Carlo prediction of the smoothed classifier from M perturbed
/// evaluations: majority vote of argmax classes (CountArgmax) or argmax of
/// the averaged probability vectors (MeanProb).
std::size_t smoothed_predict(const SmoothedModel& model,
                             const Statevector& x_state,
                             const ParamCircuit& circuit,
                             const ClassReadout& readout, std::uint64_t M,
                             const RngStream& stream,
                             PredictMode mode = PredictMode::CountArgmax);

/// sum_i delta_i^2 / (s_e sigma_i)^2 < 1. Always false when s_e == 0.
bool ellipsoid_contains(std::span<const double> delta,
                        std::span<const double> sigma, double s_e);

/// Volume 2 pi^{D/2} / (D Gamma(D/2)) * prod_i s_e sigma_i of the certified
/// ellipsoid, and its logarithm (-inf when s_e == 0).
double certified_volume(std::span<const double> sigma, double s_e);
double log_certified_volume(std::span<const double> sigma, double s_e);

/// V^{1/D}, computed in log space.
double certified_area_geometric_mean(std::span<const double> sigma, double s_e);

std::string certification_to_json(const CertificationResult& r);

}  // namespace certiq
