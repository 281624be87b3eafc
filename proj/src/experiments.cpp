#include "certiq/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "certiq/hash.hpp"
#include "certiq/parallel.hpp"
#include "json.hpp"

namespace certiq {

TestCertification certify_dataset(const SmoothedModel& model, const Qcnn& qcnn,
                                  std::span<const Sample> test,
                                  const CertifyOptions& opts,
                                  const RngStream& stream) {
  if (test.empty()) throw std::invalid_argument("certification set is empty");
  TestCertification out;
  out.results.resize(test.size());
  parallel_for(test.size(), [&](std::size_t i) {
    out.results[i] = certify(model, test[i].state, qcnn.circuit, qcnn.readout,
                             opts, stream.fork(i));
  });
  std::vector<int> labels;
  labels.reserve(test.size());
  for (const auto& s : test) labels.push_back(s.label);
  out.metrics = metrics_report(out.results, labels);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct MeanCi {
  double mean = 0.0, lo = 0.0, hi = 0.0, se = 0.0;
};

MeanCi mean_ci(std::span<const double> v, double z) {
  const double n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd = v.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  const double se = sd / std::sqrt(n);
  return {mean, mean - z * se, mean + z * se, se};
}

}  // namespace

std::vector<NoiseSweepRow> noise_sweep(const SmoothedModel& smoothed,
                                       std::span<const double> plain_theta,
                                       const Qcnn& qcnn,
                                       std::span<const Sample> test,
                                       const NoiseSweepOptions& opts,
                                       const RngStream& stream) {
  smoothed.validate();
  if (plain_theta.size() != smoothed.dim())
    throw std::invalid_argument("plain and smoothed models differ in size");
  if (opts.draws < 1) throw std::invalid_argument("noise sweep needs >= 1 draw");
  const std::size_t points = std::min(opts.points, test.size());
  if (points == 0) throw std::invalid_argument("noise sweep needs test points");
  const std::size_t d = smoothed.dim();
  const RngStream smoothing_root = stream.fork("smoothing");

  std::vector<NoiseSweepRow> rows;
  for (std::size_t si = 0; si < opts.scales.size(); ++si) {
    const double c = opts.scales[si];
    if (!(c >= 0.0)) throw std::invalid_argument("noise scales must be >= 0");
    const RngStream scale_root = stream.fork("noise").fork(si);

    std::vector<double> plain_acc(opts.draws), smooth_acc(opts.draws),
        norms(opts.draws), diff(opts.draws);
    parallel_for(opts.draws, [&](std::size_t k) {
      RngStream ns = scale_root.fork(k);
      std::vector<double> noise(d);
      double sq = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        noise[i] = c * smoothed.sigma[i] * ns.normal();
        sq += noise[i] * noise[i];
      }
      norms[k] = std::sqrt(sq);

      SmoothedModel shifted = smoothed;
      std::vector<double> plain(plain_theta.begin(), plain_theta.end());
      for (std::size_t i = 0; i < d; ++i) {
        shifted.theta[i] += noise[i];
        plain[i] += noise[i];
      }
      std::size_t plain_hits = 0, smooth_hits = 0;
      for (std::size_t p = 0; p < points; ++p) {
        const auto& s = test[p];
        const auto probs = classifier_eval(qcnn.circuit, qcnn.readout, s.state, plain);
        plain_hits += static_cast<int>(argmax(probs)) == s.label;
        const auto pred =
            smoothed_predict(shifted, s.state, qcnn.circuit, qcnn.readout,
                             opts.smoothing_samples, smoothing_root.fork(p), opts.mode);
        smooth_hits += static_cast<int>(pred) == s.label;
      }
      plain_acc[k] = static_cast<double>(plain_hits) / static_cast<double>(points);
      smooth_acc[k] = static_cast<double>(smooth_hits) / static_cast<double>(points);
      diff[k] = smooth_acc[k] - plain_acc[k];
    });

    NoiseSweepRow row;
    row.scale = c;
    double norm_sum = 0.0;
    for (double v : norms) norm_sum += v;
    row.noise_norm = norm_sum / static_cast<double>(opts.draws);
    const auto pc = mean_ci(plain_acc, opts.z);
    const auto sc = mean_ci(smooth_acc, opts.z);
    const auto dc = mean_ci(diff, opts.z);
    row.plain_acc = pc.mean;
    row.plain_ci_lo = pc.lo;
    row.plain_ci_hi = pc.hi;
    row.smoothed_acc = sc.mean;
    row.smoothed_ci_lo = sc.lo;
    row.smoothed_ci_hi = sc.hi;
    row.diff_mean = dc.mean;
    row.diff_se = dc.se;
    rows.push_back(row);
  }
  return rows;
}

std::string noise_sweep_csv(std::span<const NoiseSweepRow> rows) {
  std::ostringstream os;
  os.precision(17);
  os << "scale,noise_norm,plain_acc,plain_ci_lo,plain_ci_hi,smoothed_acc,"
        "smoothed_ci_lo,smoothed_ci_hi,diff_mean,diff_se\n";
  for (const auto& r : rows)
    os << r.scale << ',' << r.noise_norm << ',' << r.plain_acc << ','
       << r.plain_ci_lo << ',' << r.plain_ci_hi << ',' << r.smoothed_acc << ','
       << r.smoothed_ci_lo << ',' << r.smoothed_ci_hi << ',' << r.diff_mean
       << ',' << r.diff_se << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------

std::string SearchSpace::to_json() const {
  nlohmann::json kinds = nlohmann::json::array();
  for (auto k : reg_kinds) kinds.push_back(reg_kind_name(k));
  nlohmann::json j{{"lambda", {lambda.lo, lambda.hi}},
                   {"eta_sigma", {eta_sigma.lo, eta_sigma.hi}},
                   {"eta_theta", {eta_theta.lo, eta_theta.hi}},
                   {"eta_r", {eta_r.lo, eta_r.hi}},
                   {"sigma0", {sigma0.lo, sigma0.hi}},
                   {"reg_kinds", kinds}};
  return j.dump();
}

SearchSpace SearchSpace::from_json(std::string_view text) {
  const auto j = nlohmann::json::parse(text);
  SearchSpace s;
  auto range = [&](const char* key, Range& r, bool positive) {
    if (!j.contains(key)) return;
    r = {j[key].at(0).get<double>(), j[key].at(1).get<double>()};
    if (r.hi < r.lo || (positive && !(r.lo > 0.0)))
      throw std::invalid_argument(std::string("invalid search range for ") + key);
  };
  range("lambda", s.lambda, true);
  range("eta_sigma", s.eta_sigma, true);
  range("eta_theta", s.eta_theta, true);
  range("eta_r", s.eta_r, true);
  range("sigma0", s.sigma0, true);
  if (j.contains("reg_kinds")) {
    s.reg_kinds.clear();
    for (const auto& k : j["reg_kinds"]) s.reg_kinds.push_back(reg_kind_from_name(k.get<std::string>()));
    if (s.reg_kinds.empty()) throw std::invalid_argument("reg_kinds is empty");
  }
  if (s.lambda.lo < 2) throw std::invalid_argument("lambda range must start at >= 2");
  return s;
}

SnesConfig sample_config(const SearchSpace& space, const SnesConfig& base,
                         RngStream& stream) {
  auto log_uniform = [&](const Range& r) {
    return std::exp(stream.uniform(std::log(r.lo), std::log(r.hi)));
  };
  SnesConfig c = base;
  c.lambda = static_cast<std::size_t>(
      stream.uniform_int(static_cast<std::int64_t>(std::ceil(space.lambda.lo)),
                         static_cast<std::int64_t>(std::floor(space.lambda.hi))));
  c.eta_sigma = log_uniform(space.eta_sigma);
  c.eta_theta = log_uniform(space.eta_theta);
  c.eta_r = log_uniform(space.eta_r);
  c.sigma0 = log_uniform(space.sigma0);
  c.reg_kind = space.reg_kinds[static_cast<std::size_t>(
      stream.uniform_int(0, static_cast<std::int64_t>(space.reg_kinds.size()) - 1))];
  return c;
}

std::string run_id_for(const SnesConfig& config) {
  return hex64(fnv1a64(config.to_json()));
}

std::string SweepRecord::to_json() const {
  nlohmann::json j{{"run_id", run_id},
                   {"index", index},
                   {"status", status},
                   {"hyperparameters", nlohmann::json::parse(hyperparameters.to_json())}};
  if (metrics) j["metrics"] = nlohmann::json::parse(metrics->to_json());
  if (!error.empty()) j["error"] = error;
  return j.dump();
}

SweepRecord SweepRecord::from_json(std::string_view text) {
  const auto j = nlohmann::json::parse(text);
  SweepRecord r;
  r.run_id = j.at("run_id").get<std::string>();
  r.index = j.value("index", std::size_t{0});
  r.status = j.at("status").get<std::string>();
  r.hyperparameters = SnesConfig::from_json(j.at("hyperparameters").dump());
  if (j.contains("metrics")) r.metrics = MetricsReport::from_json(j["metrics"].dump());
  r.error = j.value("error", std::string{});
  if ((r.status == "completed") != r.metrics.has_value())
    throw std::invalid_argument("sweep record " + r.run_id +
                                ": metrics must be present iff completed");
  return r;
}

std::vector<SweepRecord> load_journal(const std::string& path) {
  std::vector<SweepRecord> out;
  std::ifstream in(path);
  if (!in) return out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(SweepRecord::from_json(line));
    } catch (const std::exception&) {
      // a torn final line from an interrupted sweep
    }
  }
  return out;
}

std::vector<SweepRecord> run_hp_sweep(const SweepOptions& opts,
                                      std::span<const Sample> train_set,
                                      std::span<const Sample> test_set) {
  const Qcnn qcnn = build_qcnn(opts.qcnn);
  const RngStream root(opts.seed);

  std::vector<SnesConfig> configs(opts.budget);
  for (std::size_t i = 0; i < opts.budget; ++i) {
    RngStream s = root.fork("hp").fork(i);
    configs[i] = sample_config(opts.space, opts.base, s);
    configs[i].seed = root.fork("run").fork(i).key();
  }

  std::map<std::string, SweepRecord> done;
  if (!opts.journal_path.empty())
    for (auto& r : load_journal(opts.journal_path))
      if (r.status == "completed") done[r.run_id] = r;

  std::vector<std::optional<SweepRecord>> records(opts.budget);
  std::mutex journal_mutex;
  std::size_t next_to_write = 0;
  std::ofstream journal;
  if (!opts.journal_path.empty()) {
    journal.open(opts.journal_path, std::ios::app | std::ios::binary);
    if (!journal) throw std::invalid_argument("cannot open journal " + opts.journal_path);
  }
  std::vector<bool> fresh(opts.budget, false);

  parallel_for(opts.budget, [&](std::size_t i) {
    SweepRecord rec;
    rec.index = i;
    rec.hyperparameters = configs[i];
    rec.run_id = run_id_for(configs[i]);
    bool is_fresh = false;
    if (auto it = done.find(rec.run_id); it != done.end()) {
      rec = it->second;
      rec.index = i;
    } else {
      is_fresh = true;
      try {
        const auto trained = train(qcnn.circuit, qcnn.readout, train_set, configs[i]);
        const auto cert = certify_dataset(trained.model, qcnn, test_set, opts.certify,
                                          RngStream(configs[i].seed).fork("certify"));
        rec.status = "completed";
        rec.metrics = cert.metrics;
      } catch (const std::exception& e) {
        rec.status = "failed";
        rec.error = e.what();
      }
    }
    std::lock_guard lock(journal_mutex);
    records[i] = rec;
    fresh[i] = is_fresh;
    while (next_to_write < opts.budget && records[next_to_write]) {
      if (journal.is_open() && fresh[next_to_write]) {
        journal << records[next_to_write]->to_json() << '\n';
        journal.flush();
      }
      ++next_to_write;
    }
  });

  std::vector<SweepRecord> out;
  out.reserve(opts.budget);
  for (auto& r : records) out.push_back(std::move(*r));
  return out;
}

// ---------------------------------------------------------------------------

std::string_view robust_metric_name(RobustMetric m) {
  return m == RobustMetric::Cagm ? "cagm" : "semi_axis_avg";
}

RobustMetric robust_metric_from_name(std::string_view name) {
  if (name == "cagm") return RobustMetric::Cagm;
  if (name == "semi_axis_avg") return RobustMetric::SemiAxisAvg;
  throw std::invalid_argument("unknown robustness metric '" + std::string(name) + "'");
}

double metric_value(const MetricsReport& m, RobustMetric which) {
  return which == RobustMetric::Cagm ? m.cagm : m.semi_axis_avg;
}

std::optional<LinearFit> fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_line: size mismatch");
  if (x.size() < 2) return std::nullopt;
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) return std::nullopt;
  const double slope = sxy / sxx;
  return LinearFit{slope, my - slope * mx};
}

FrontierResult frontier_extract(std::span<const SweepRecord> records,
                                RobustMetric metric, double bin_width) {
  if (!(bin_width > 0.0)) throw std::invalid_argument("bin width must be > 0");
  std::map<long, FrontierPoint> best;  // ascending bin
  for (const auto& r : records) {
    if (r.status != "completed" || !r.metrics) continue;
    const double acc = r.metrics->smoothed_accuracy;
    const double m = metric_value(*r.metrics, metric);
    const long bin = static_cast<long>(std::floor(acc / bin_width + 1e-9));
    auto it = best.find(bin);
    if (it == best.end() || m > it->second.metric)
      best[bin] = FrontierPoint{bin, acc, m, r.run_id};
  }
  if (best.empty()) throw std::invalid_argument("frontier: no completed records");

  FrontierResult out;
  double higher_max = -INFINITY;
  for (auto it = best.rbegin(); it != best.rend(); ++it) {
    if (it->second.metric >= higher_max) out.points.push_back(it->second);
    higher_max = std::max(higher_max, it->second.metric);
  }
  std::vector<double> xs, ys;
  for (const auto& p : out.points) {
    xs.push_back(p.accuracy);
    ys.push_back(p.metric);
  }
  out.fit = fit_line(xs, ys);
  return out;
}

CorrelationResult correlation_extract(std::span<const SweepRecord> records,
                                      RobustMetric metric, double min_accuracy,
                                      std::size_t n_bins) {
  if (n_bins < 1) throw std::invalid_argument("correlation needs >= 1 bin");
  std::vector<double> ms, stds;
  for (const auto& r : records) {
    if (r.status != "completed" || !r.metrics) continue;
    if (r.metrics->smoothed_accuracy + 1e-12 < min_accuracy) continue;
    ms.push_back(metric_value(*r.metrics, metric));
    stds.push_back(r.metrics->semi_axis_std);
  }
  if (ms.empty())
    throw std::invalid_argument("correlation: no records reach the minimum accuracy");

  CorrelationResult out;
  out.min_accuracy = min_accuracy;
  const double lo = *std::min_element(ms.begin(), ms.end());
  const double hi = *std::max_element(ms.begin(), ms.end());
  const std::size_t bins = hi > lo ? n_bins : 1;
  const double width = hi > lo ? (hi - lo) / static_cast<double>(bins) : 0.0;

  std::vector<std::vector<std::size_t>> members(bins);
  for (std::size_t i = 0; i < ms.size(); ++i) {
    std::size_t b = 0;
    if (width > 0.0)
      b = std::min(bins - 1, static_cast<std::size_t>((ms[i] - lo) / width));
    members[b].push_back(i);
  }
  for (std::size_t b = 0; b < bins; ++b) {
    if (members[b].empty()) continue;
    CorrelationBin cb;
    cb.metric_lo = lo + width * static_cast<double>(b);
    cb.metric_hi = width > 0.0 ? cb.metric_lo + width : hi;
    cb.count = members[b].size();
    for (auto i : members[b]) {
      cb.metric_mean += ms[i];
      cb.std_mean += stds[i];
    }
    cb.metric_mean /= static_cast<double>(cb.count);
    cb.std_mean /= static_cast<double>(cb.count);
    double ss = 0.0;
    for (auto i : members[b]) ss += (stds[i] - cb.std_mean) * (stds[i] - cb.std_mean);
    cb.std_std = std::sqrt(ss / static_cast<double>(cb.count));
    out.bins.push_back(cb);
  }
  out.fit = fit_line(ms, stds);
  return out;
}

std::string frontier_csv(const FrontierResult& f) {
  std::ostringstream os;
  os.precision(17);
  os << "bin,smoothed_accuracy,metric,run_id\n";
  for (const auto& p : f.points)
    os << p.bin << ',' << p.accuracy << ',' << p.metric << ',' << p.run_id << '\n';
  return os.str();
}

std::string correlation_csv(const CorrelationResult& c) {
  std::ostringstream os;
  os.precision(17);
  os << "metric_lo,metric_hi,metric_mean,count,semi_axis_std_mean,semi_axis_std_std\n";
  for (const auto& b : c.bins)
    os << b.metric_lo << ',' << b.metric_hi << ',' << b.metric_mean << ','
       << b.count << ',' << b.std_mean << ',' << b.std_std << '\n';
  return os.str();
}

std::string fit_json(const std::optional<LinearFit>& fit) {
  nlohmann::json j;
  if (fit) {
    j = {{"defined", true}, {"slope", fit->slope}, {"intercept", fit->intercept}};
  } else {
    j = {{"defined", false}, {"slope", nullptr}, {"intercept", nullptr}};
  }
  return j.dump();
}

}  // namespace certiq
