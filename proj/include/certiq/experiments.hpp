#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "certiq/dataset.hpp"
#include "certiq/metrics.hpp"
#include "certiq/qcnn.hpp"
#include "certiq/smoothing.hpp"
#include "certiq/snes.hpp"

namespace certiq {

// ---------------------------------------------------------------------------
// Certification of a whole test set

struct TestCertification {
  std::vector<CertificationResult> results;
  MetricsReport metrics;
};

/// Certifies every sample; sample i uses stream.fork(i).
TestCertification certify_dataset(const SmoothedModel& model, const Qcnn& qcnn,
                                  std::span<const Sample> test,
                                  const CertifyOptions& opts,
                                  const RngStream& stream);

// ---------------------------------------------------------------------------
// Noise injection: accuracy of a smoothed and a plain model as the
// parameters receive N(0, diag((c sigma)^2)) noise.

struct NoiseSweepOptions {
  std::vector<double> scales{0.0, 0.5, 1.0, 2.0, 4.0};
  std::size_t draws = 100;
  std::size_t points = 20;            // leading test samples used
  std::uint64_t smoothing_samples = 100;
  PredictMode mode = PredictMode::CountArgmax;
  double z = 1.96;                    // normal-approximation CI width
};

struct NoiseSweepRow {
  double scale = 0.0;
  double noise_norm = 0.0;            // mean ||noise||_2 over draws
  double plain_acc = 0.0, plain_ci_lo = 0.0, plain_ci_hi = 0.0;
  double smoothed_acc = 0.0, smoothed_ci_lo = 0.0, smoothed_ci_hi = 0.0;
  double diff_mean = 0.0;             // smoothed - plain, paired by draw
  double diff_se = 0.0;
};

/// Both models see the same noise vector in each draw (scaled by the
/// smoothed model's sigma). The smoothed model's own Monte-Carlo sampling uses
/// common random numbers per test point across draws and scales.
std::vector<NoiseSweepRow> noise_sweep(const SmoothedModel& smoothed,
                                       std::span<const double> plain_theta,
                                       const Qcnn& qcnn,
                                       std::span<const Sample> test,
                                       const NoiseSweepOptions& opts,
                                       const RngStream& stream);

std::string noise_sweep_csv(std::span<const NoiseSweepRow> rows);

// ---------------------------------------------------------------------------
// Randomized hyperparameter sweep

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct SearchSpace {
  Range lambda{10, 40};          // uniform integer
  Range eta_sigma{1e-3, 1e-1};   // log-uniform
  Range eta_theta{2e-2, 1.0};    // log-uniform
  Range eta_r{1e-6, 1e-2};       // log-uniform
  Range sigma0{1e-2, 5e-1};      // log-uniform
  std::vector<RegKind> reg_kinds{RegKind::L2, RegKind::Area};

  std::string to_json() const;
  static SearchSpace from_json(std::string_view text);
};

/// Draws one configuration; fields not in the search space come from `base`.
SnesConfig sample_config(const SearchSpace& space, const SnesConfig& base,
                         RngStream& stream);

struct SweepRecord {
  std::string run_id;            // hash of (config, seed)
  std::size_t index = 0;
  std::string status;            // "completed" or "failed"
  SnesConfig hyperparameters;
  std::optional<MetricsReport> metrics;
  std::string error;

  std::string to_json() const;
  static SweepRecord from_json(std::string_view text);
};

std::string run_id_for(const SnesConfig& config);

std::vector<SweepRecord> load_journal(const std::string& path);

struct SweepOptions {
  std::size_t budget = 10;
  std::uint64_t seed = 0;
  SearchSpace space;
  SnesConfig base;               // iterations, batch size, clamp
  CertifyOptions certify;
  QcnnSpec qcnn;
  std::string journal_path;      // JSON lines, append-only
};

/// Trains and certifies `budget` sampled configurations. Runs already
/// completed in the journal are skipped; new records are appended in run
/// index order. Returns all records sorted by index.
std::vector<SweepRecord> run_hp_sweep(const SweepOptions& opts,
                                      std::span<const Sample> train_set,
                                      std::span<const Sample> test_set);

// ---------------------------------------------------------------------------
// Frontier and correlation analytics

enum class RobustMetric { Cagm, SemiAxisAvg };
std::string_view robust_metric_name(RobustMetric m);
RobustMetric robust_metric_from_name(std::string_view name);
double metric_value(const MetricsReport& m, RobustMetric which);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Least squares y = slope x + intercept; empty with < 2 points or no spread
/// in x.
std::optional<LinearFit> fit_line(std::span<const double> x, std::span<const double> y);

struct FrontierPoint {
  long bin = 0;                   // floor(accuracy / bin_width)
  double accuracy = 0.0;
  double metric = 0.0;
  std::string run_id;
};

struct FrontierResult {
  std::vector<FrontierPoint> points;  // descending accuracy
  std::optional<LinearFit> fit;       // metric against accuracy
};

/// Best-metric run per accuracy bin, dropping bins whose best run is beaten
/// on the metric by a run in a higher-accuracy bin.
FrontierResult frontier_extract(std::span<const SweepRecord> records,
                                RobustMetric metric, double bin_width = 0.02);

struct CorrelationBin {
  double metric_lo = 0.0, metric_hi = 0.0;
  double metric_mean = 0.0;
  std::size_t count = 0;
  double std_mean = 0.0;          // mean of semi_axis_std in the bin
  double std_std = 0.0;           // population std of semi_axis_std
};

struct CorrelationResult {
  double min_accuracy = 0.0;
  std::vector<CorrelationBin> bins;
  std::optional<LinearFit> fit;   // semi_axis_std against metric
};

CorrelationResult correlation_extract(std::span<const SweepRecord> records,
                                      RobustMetric metric, double min_accuracy,
                                      std::size_t n_bins = 10);

std::string frontier_csv(const FrontierResult& f);
std::string correlation_csv(const CorrelationResult& c);
std::string fit_json(const std::optional<LinearFit>& fit);

}  // namespace certiq
