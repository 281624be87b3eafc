#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "certiq/circuit.hpp"
#include "certiq/dataset.hpp"
#include "certiq/rng.hpp"
#include "certiq/smoothing.hpp"

namespace certiq {

enum class RegKind { L2, Area };

std::string_view reg_kind_name(RegKind k);
RegKind reg_kind_from_name(std::string_view name);

struct SnesConfig {
  std::size_t lambda = 24;     // population
  double eta_theta = 0.1;
  double eta_sigma = 1e-2;
  double eta_r = 1e-4;         // may be negative to shrink sigma
  double sigma0 = 0.1;
  RegKind reg_kind = RegKind::L2;
  std::size_t iterations = 1500;
  std::size_t batch_size = 50;
  double prob_clamp = 1e-6;
  std::vector<bool> frozen_mask;  // empty: nothing frozen
  std::uint64_t seed = 0;

  void validate() const;

  std::string to_json() const;
  /// Keys absent from `text` keep their defaults.
  static SnesConfig from_json(std::string_view text);
};

inline constexpr double kSigmaFloor = 1e-8;

/// Rank-based utilities for ranks 1..lambda (rank 1 = best). Zero-sum and
/// nonincreasing.
std::vector<double> rank_utilities(std::size_t lambda);

/// Half the probit gap between the label's probability and the strongest
/// other class, both clamped to [clamp, 1 - clamp].
double fitness_margin(std::span<const double> class_probs, std::size_t label,
                      double clamp);

/// sigma + eta_r * reg(sigma) element-wise: reg = sigma (L2) or 1/sigma (Area).
std::vector<double> regularize_sigma(std::span<const double> sigma, RegKind kind,
                                     double eta_r);

using FitnessFn = std::function<double(std::span<const double>)>;

struct SnesStepResult {
  std::vector<double> theta;
  std::vector<double> sigma;
  double mean_fitness = 0.0;       // over finite candidates
  std::size_t nonfinite = 0;       // candidates ranked last for NaN/inf
};

/// One separable-NES generation. `evaluate` must be safe to call
/// concurrently; candidates are drawn sequentially from `stream` and ranked
/// by descending fitness with ties kept in candidate order.
SnesStepResult snes_step(std::span<const double> theta,
                         std::span<const double> sigma, const SnesConfig& config,
                         const FitnessFn& evaluate, RngStream& stream);

struct HistoryRow {
  std::size_t iteration = 0;
  double mean_fitness = 0.0;
  double mean_sigma = 0.0;
  double train_accuracy = 0.0;  // plain argmax accuracy at theta on the batch
};

struct TrainHistory {
  std::vector<HistoryRow> rows;
  std::string to_csv() const;
};

struct TrainResult {
  SmoothedModel model;
  TrainHistory history;
};

using HistoryCallback = std::function<void(const HistoryRow&)>;

/// Robust training: theta ~ U[-pi, pi), sigma = sigma0, then `iterations`
/// sNES steps maximising the mean fitness_margin over a seeded minibatch.
TrainResult train(const ParamCircuit& circuit, const ClassReadout& readout,
                  std::span<const Sample> data, const SnesConfig& config,
                  const HistoryCallback& on_row = {});

/// Baseline trainer settings: the same loop without sigma regularisation;
/// the resulting sigma is discarded at deployment.
SnesConfig plain_baseline_config(SnesConfig config);

/// Fraction of samples whose plain argmax at `theta` equals the label.
double plain_accuracy(const ParamCircuit& circuit, const ClassReadout& readout,
                      std::span<const Sample> data, std::span<const double> theta);

}  // namespace certiq
