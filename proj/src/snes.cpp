#include "certiq/snes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "certiq/parallel.hpp"
#include "certiq/stats.hpp"
#include "json.hpp"

namespace certiq {

std::string_view reg_kind_name(RegKind k) { return k == RegKind::L2 ? "L2" : "AREA"; }

RegKind reg_kind_from_name(std::string_view name) {
  if (name == "L2" || name == "l2") return RegKind::L2;
  if (name == "AREA" || name == "area") return RegKind::Area;
  throw std::invalid_argument("unknown regularizer '" + std::string(name) + "'");
}

void SnesConfig::validate() const {
  if (lambda < 2) throw std::invalid_argument("population lambda must be >= 2");
  if (!(eta_theta > 0.0) || !(eta_sigma > 0.0))
    throw std::invalid_argument("learning rates eta_theta, eta_sigma must be > 0");
  if (!std::isfinite(eta_r)) throw std::invalid_argument("eta_r must be finite");
  if (!(sigma0 > 0.0)) throw std::invalid_argument("sigma0 must be > 0");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (!(prob_clamp > 0.0 && prob_clamp < 0.5))
    throw std::invalid_argument("prob_clamp must lie in (0, 0.5)");
}

std::string SnesConfig::to_json() const {
  nlohmann::json j{{"lambda", lambda},       {"eta_theta", eta_theta},
                   {"eta_sigma", eta_sigma}, {"eta_r", eta_r},
                   {"sigma0", sigma0},       {"reg_kind", reg_kind_name(reg_kind)},
                   {"iterations", iterations}, {"batch_size", batch_size},
                   {"prob_clamp", prob_clamp}, {"seed", seed}};
  if (!frozen_mask.empty()) j["frozen_mask"] = frozen_mask;
  return j.dump();
}

SnesConfig SnesConfig::from_json(std::string_view text) {
  const auto j = nlohmann::json::parse(text);
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  static const std::vector<std::string> known = {
      "lambda", "eta_theta", "eta_sigma", "eta_r", "sigma0", "reg_kind",
      "iterations", "batch_size", "prob_clamp", "frozen_mask", "seed"};
  for (const auto& [key, _] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw std::invalid_argument("unknown config key '" + key + "'");
  SnesConfig c;
  c.lambda = j.value("lambda", c.lambda);
  c.eta_theta = j.value("eta_theta", c.eta_theta);
  c.eta_sigma = j.value("eta_sigma", c.eta_sigma);
  c.eta_r = j.value("eta_r", c.eta_r);
  c.sigma0 = j.value("sigma0", c.sigma0);
  if (j.contains("reg_kind")) c.reg_kind = reg_kind_from_name(j["reg_kind"].get<std::string>());
  c.iterations = j.value("iterations", c.iterations);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.prob_clamp = j.value("prob_clamp", c.prob_clamp);
  if (j.contains("frozen_mask")) c.frozen_mask = j["frozen_mask"].get<std::vector<bool>>();
  c.seed = j.value("seed", c.seed);
  return c;
}

std::vector<double> rank_utilities(std::size_t lambda) {
  if (lambda < 2) throw std::invalid_argument("rank_utilities needs lambda >= 2");
  const double lam = static_cast<double>(lambda);
  const double top = std::log(lam / 2.0 + 1.0);
  std::vector<double> u(lambda);
  double total = 0.0;
  for (std::size_t k = 1; k <= lambda; ++k) {
    u[k - 1] = std::max(0.0, top - std::log(static_cast<double>(k)));
    total += u[k - 1];
  }
  for (auto& v : u) v = v / total - 1.0 / lam;
  return u;
}

double fitness_margin(std::span<const double> class_probs, std::size_t label,
                      double clamp) {
  if (label >= class_probs.size()) throw std::out_of_range("label out of range");
  if (class_probs.size() < 2) throw std::invalid_argument("need >= 2 classes");
  auto clamped = [clamp](double p) { return std::clamp(p, clamp, 1.0 - clamp); };
  double p_b = -INFINITY;
  for (std::size_t c = 0; c < class_probs.size(); ++c)
    if (c != label) p_b = std::max(p_b, class_probs[c]);
  return 0.5 * (std_normal_quantile(clamped(class_probs[label])) -
                std_normal_quantile(clamped(p_b)));
}

std::vector<double> regularize_sigma(std::span<const double> sigma, RegKind kind,
                                     double eta_r) {
  std::vector<double> out(sigma.begin(), sigma.end());
  for (auto& s : out) {
    if (!(s > 0.0)) throw std::invalid_argument("sigma must be > 0");
    s += eta_r * (kind == RegKind::L2 ? s : 1.0 / s);
  }
  return out;
}

SnesStepResult snes_step(std::span<const double> theta,
                         std::span<const double> sigma, const SnesConfig& config,
                         const FitnessFn& evaluate, RngStream& stream) {
  const std::size_t d = theta.size();
  if (sigma.size() != d) throw std::invalid_argument("theta and sigma lengths differ");
  if (!config.frozen_mask.empty() && config.frozen_mask.size() != d)
    throw std::invalid_argument("frozen_mask length differs from parameter count");
  const std::size_t lambda = config.lambda;

  std::vector<std::vector<double>> s(lambda);
  std::vector<std::vector<double>> z(lambda, std::vector<double>(d));
  for (std::size_t k = 0; k < lambda; ++k) {
    s[k] = stream.normal_vector(d);
    for (std::size_t i = 0; i < d; ++i) z[k][i] = theta[i] + sigma[i] * s[k][i];
  }

  std::vector<double> f(lambda);
  parallel_for(lambda, [&](std::size_t k) { f[k] = evaluate(z[k]); });

  SnesStepResult out;
  std::size_t finite = 0;
  double sum = 0.0;
  for (auto& v : f) {
    if (std::isfinite(v)) {
      sum += v;
      ++finite;
    } else {
      v = -INFINITY;
      ++out.nonfinite;
    }
  }
  out.mean_fitness = finite ? sum / static_cast<double>(finite) : NAN;

  std::vector<std::size_t> order(lambda);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return f[a] > f[b]; });

  const auto u = rank_utilities(lambda);
  std::vector<double> grad_theta(d, 0.0), grad_sigma(d, 0.0);
  for (std::size_t r = 0; r < lambda; ++r) {
    const auto& sk = s[order[r]];
    for (std::size_t i = 0; i < d; ++i) {
      grad_theta[i] += u[r] * sk[i];
      grad_sigma[i] += u[r] * (sk[i] * sk[i] - 1.0);
    }
  }

  out.theta.assign(theta.begin(), theta.end());
  out.sigma.assign(sigma.begin(), sigma.end());
  for (std::size_t i = 0; i < d; ++i) {
    const bool frozen = !config.frozen_mask.empty() && config.frozen_mask[i];
    if (!frozen) out.theta[i] += config.eta_theta * sigma[i] * grad_theta[i];
    out.sigma[i] *= std::exp(config.eta_sigma / 2.0 * grad_sigma[i]);
  }
  out.sigma = regularize_sigma(out.sigma, config.reg_kind, config.eta_r);
  for (auto& v : out.sigma)
    if (!(v >= kSigmaFloor)) v = kSigmaFloor;
  return out;
}

std::string TrainHistory::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "iter,mean_fitness,mean_sigma,acc\n";
  for (const auto& r : rows)
    os << r.iteration << ',' << r.mean_fitness << ',' << r.mean_sigma << ','
       << r.train_accuracy << '\n';
  return os.str();
}

double plain_accuracy(const ParamCircuit& circuit, const ClassReadout& readout,
                      std::span<const Sample> data, std::span<const double> theta) {
  if (data.empty()) return 0.0;
  std::vector<int> hit(data.size());
  parallel_for(data.size(), [&](std::size_t i) {
    const auto p = classifier_eval(circuit, readout, data[i].state, theta);
    hit[i] = static_cast<int>(argmax(p)) == data[i].label;
  });
  return static_cast<double>(std::accumulate(hit.begin(), hit.end(), 0)) /
         static_cast<double>(data.size());
}

TrainResult train(const ParamCircuit& circuit, const ClassReadout& readout,
                  std::span<const Sample> data, const SnesConfig& config,
                  const HistoryCallback& on_row) {
  config.validate();
  if (data.empty()) throw std::invalid_argument("training set is empty");
  for (const auto& s : data) {
    if (s.state.n_qubits() != circuit.n_qubits())
      throw std::invalid_argument("sample qubit count differs from the circuit");
    if (s.label < 0 || static_cast<std::size_t>(s.label) >= readout.class_count())
      throw std::invalid_argument("sample label outside the readout classes");
  }
  const std::size_t d = circuit.param_count();
  if (!config.frozen_mask.empty() && config.frozen_mask.size() != d)
    throw std::invalid_argument("frozen_mask length differs from parameter count");

  const RngStream root(config.seed);
  RngStream init = root.fork("init");
  TrainResult result;
  result.model.theta.resize(d);
  for (auto& t : result.model.theta) t = init.uniform(-std::numbers::pi, std::numbers::pi);
  result.model.sigma.assign(d, config.sigma0);

  const std::size_t batch = std::min(config.batch_size, data.size());
  std::vector<std::size_t> idx(data.size());
  std::iota(idx.begin(), idx.end(), 0);
  const RngStream batch_root = root.fork("batch");
  const RngStream step_root = root.fork("snes");

  for (std::size_t it = 0; it < config.iterations; ++it) {
    if (batch < data.size()) {
      // partial Fisher-Yates over a fresh identity permutation
      std::iota(idx.begin(), idx.end(), 0);
      RngStream b = batch_root.fork(it);
      for (std::size_t i = 0; i < batch; ++i) {
        const auto j = static_cast<std::size_t>(
            b.uniform_int(static_cast<std::int64_t>(i),
                          static_cast<std::int64_t>(data.size() - 1)));
        std::swap(idx[i], idx[j]);
      }
    }
    const std::span<const std::size_t> members(idx.data(), batch);

    const FitnessFn fitness = [&](std::span<const double> z) {
      double total = 0.0;
      for (auto m : members) {
        const auto p = classifier_eval(circuit, readout, data[m].state, z);
        total += fitness_margin(p, static_cast<std::size_t>(data[m].label),
                                config.prob_clamp);
      }
      return total / static_cast<double>(members.size());
    };

    RngStream step = step_root.fork(it);
    auto next = snes_step(result.model.theta, result.model.sigma, config, fitness, step);
    result.model.theta = std::move(next.theta);
    result.model.sigma = std::move(next.sigma);

    HistoryRow row;
    row.iteration = it;
    row.mean_fitness = next.mean_fitness;
    row.mean_sigma = std::accumulate(result.model.sigma.begin(),
                                     result.model.sigma.end(), 0.0) /
                     static_cast<double>(d);
    std::size_t hits = 0;
    for (auto m : members) {
      const auto p = classifier_eval(circuit, readout, data[m].state, result.model.theta);
      hits += static_cast<int>(argmax(p)) == data[m].label;
    }
    row.train_accuracy = static_cast<double>(hits) / static_cast<double>(batch);
    result.history.rows.push_back(row);
    if (on_row) on_row(row);
  }
  return result;
}

SnesConfig plain_baseline_config(SnesConfig config) {
  config.eta_r = 0.0;
  return config;
}

}  // namespace certiq
