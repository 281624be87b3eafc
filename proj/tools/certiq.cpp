#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "certiq/dataset.hpp"
#include "certiq/experiments.hpp"
#include "certiq/hamiltonian.hpp"
#include "certiq/hash.hpp"
#include "certiq/model_io.hpp"
#include "certiq/parallel.hpp"
#include "certiq/phase_diagram.hpp"

using namespace certiq;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::uint64_t seed = 0;
  std::string config_path;
  std::string out_dir = ".";
  int threads = 0;
  json config = json::object();
};

json config_section(const Globals& g, const char* key) {
  if (g.config.contains(key)) return g.config[key];
  return json::object();
}

std::string out_path(const Globals& g, const std::string& name) {
  return (fs::path(g.out_dir) / name).string();
}

std::string resolve_input(const Globals& g, const std::string& given, const char* fallback) {
  return given.empty() ? out_path(g, fallback) : given;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Timestamps and other run context live only in *.meta.json files.
void write_meta(const Globals& g, const std::string& command, json extra) {
  extra["command"] = command;
  extra["seed"] = g.seed;
  extra["threads"] = thread_count();
  extra["created_utc"] = utc_timestamp();
  extra["version"] = "0.1.0";
  std::string stem = command;
  std::replace(stem.begin(), stem.end(), '-', '_');
  write_text_file(out_path(g, stem + ".meta.json"), extra.dump(1) + "\n");
}

SnesConfig snes_config_from(const Globals& g) {
  const json section = config_section(g, "train");
  SnesConfig c = section.empty() ? SnesConfig{} : SnesConfig::from_json(section.dump());
  return c;
}

CertifyOptions certify_options_from(const Globals& g) {
  const json s = config_section(g, "certify");
  CertifyOptions o;
  o.n0 = s.value("n0", o.n0);
  o.n = s.value("n", o.n);
  o.alpha = s.value("alpha", o.alpha);
  o.per_class_upper = s.value("per_class_upper", o.per_class_upper);
  return o;
}

QcnnSpec qcnn_from(const Globals& g, int n_qubits) {
  const json s = config_section(g, "qcnn");
  QcnnSpec q;
  q.n_qubits = n_qubits;
  q.conv_reps = s.value("conv_reps", q.conv_reps);
  return q;
}

// ---------------------------------------------------------------------------

struct GenDataArgs {
  int qubits = 4;
  std::size_t train = 50;
  std::size_t test = 50;
  std::string phase_file;
};

int cmd_gen_data(const Globals& g, const GenDataArgs& a) {
  if (a.qubits < 3 || a.qubits > 16) throw UsageError("--qubits must lie in [3, 16]");
  if (a.train < 1 || a.test < 1) throw UsageError("--train and --test must be >= 1");
  const PhaseBoundarySpec spec =
      a.phase_file.empty() ? default_phase_spec() : PhaseBoundarySpec::load(a.phase_file);
  const auto split = gen_split(a.qubits, g.seed, spec, a.train, a.test);
  save_dataset(split.train, out_path(g, "train.jsonl"));
  save_dataset(split.test, out_path(g, "test.jsonl"));
  write_meta(g, "gen-data", {{"qubits", a.qubits}, {"train", a.train}, {"test", a.test},
                             {"phase_spec_hash", hex64(spec.hash())}});
  std::printf("wrote %zu train and %zu test samples (%d qubits) to %s\n", a.train, a.test,
              a.qubits, g.out_dir.c_str());
  return 0;
}

struct TrainArgs {
  std::string data;
  bool plain = false;
  std::optional<std::size_t> iterations, lambda, batch_size;
  std::optional<double> eta_theta, eta_sigma, eta_r, sigma0;
  std::string reg_kind;
  std::string model_out;
};

int cmd_train(const Globals& g, const TrainArgs& a) {
  const Dataset data = load_dataset(resolve_input(g, a.data, "train.jsonl"));
  SnesConfig c = snes_config_from(g);
  if (a.iterations) c.iterations = *a.iterations;
  if (a.lambda) c.lambda = *a.lambda;
  if (a.batch_size) c.batch_size = *a.batch_size;
  if (a.eta_theta) c.eta_theta = *a.eta_theta;
  if (a.eta_sigma) c.eta_sigma = *a.eta_sigma;
  if (a.eta_r) c.eta_r = *a.eta_r;
  if (a.sigma0) c.sigma0 = *a.sigma0;
  if (!a.reg_kind.empty()) c.reg_kind = reg_kind_from_name(a.reg_kind);
  c.seed = g.seed;
  if (a.plain) c = plain_baseline_config(c);
  c.validate();

  const QcnnSpec qs = qcnn_from(g, data.n_qubits);
  const Qcnn q = build_qcnn(qs);
  const auto result = train(q.circuit, q.readout, data.samples, c);
  for (double v : result.model.theta)
    if (!std::isfinite(v)) throw std::domain_error("training diverged: non-finite theta");

  ModelFile mf;
  mf.kind = a.plain ? "plain" : "smoothed";
  mf.qcnn = qs;
  mf.model = result.model;
  mf.config = c;
  mf.circuit_hash = circuit_hash(q.circuit);
  const std::string stem = a.plain ? "model_plain" : "model";
  const std::string model_path = a.model_out.empty() ? out_path(g, stem + ".json") : a.model_out;
  mf.save(model_path);
  write_text_file(out_path(g, a.plain ? "history_plain.csv" : "history.csv"), result.history.to_csv());
  const double acc = plain_accuracy(q.circuit, q.readout, data.samples, result.model.theta);
  write_meta(g, a.plain ? "train-plain" : "train",
             {{"model", model_path}, {"train_accuracy", acc}, {"parameters", q.circuit.param_count()}});
  std::printf("trained %s model, D=%zu, train accuracy %.3f -> %s\n", mf.kind.c_str(),
              q.circuit.param_count(), acc, model_path.c_str());
  return 0;
}

struct CertifyArgs {
  std::string model, data;
  std::optional<std::uint64_t> n0, n;
  std::optional<double> alpha;
  bool per_class = false;
};

int cmd_certify(const Globals& g, const CertifyArgs& a) {
  const ModelFile mf = ModelFile::load(resolve_input(g, a.model, "model.json"));
  const Dataset test = load_dataset(resolve_input(g, a.data, "test.jsonl"));
  const Qcnn q = mf.rebuild();
  if (test.n_qubits != mf.qcnn.n_qubits) throw UsageError("test set and model differ in qubit count");
  CertifyOptions o = certify_options_from(g);
  if (a.n0) o.n0 = *a.n0;
  if (a.n) o.n = *a.n;
  if (a.alpha) o.alpha = *a.alpha;
  if (a.per_class) o.per_class_upper = true;
  if (!(o.alpha > 0.0 && o.alpha < 1.0)) throw UsageError("--alpha must lie in (0, 1)");

  const auto cert = certify_dataset(mf.model, q, test.samples, o, RngStream(g.seed).fork("certify"));
  std::ostringstream lines;
  for (std::size_t i = 0; i < cert.results.size(); ++i) {
    json j = json::parse(certification_to_json(cert.results[i]));
    j["index"] = i;
    j["label"] = test.samples[i].label;
    j["j1"] = test.samples[i].params.j1;
    j["j2"] = test.samples[i].params.j2;
    lines << j.dump() << '\n';
  }
  write_text_file(out_path(g, "certify.jsonl"), lines.str());
  write_text_file(out_path(g, "metrics.json"), cert.metrics.to_json() + "\n");
  std::ostringstream csv;
  csv.precision(17);
  const auto& m = cert.metrics;
  csv << "cagm,semi_axis_avg,semi_axis_std,smoothed_accuracy,cagm_certified,samples,abstained\n"
      << m.cagm << ',' << m.semi_axis_avg << ',' << m.semi_axis_std << ',' << m.smoothed_accuracy
      << ',' << m.cagm_certified << ',' << m.samples << ',' << m.abstained << '\n';
  write_text_file(out_path(g, "metrics.csv"), csv.str());
  write_meta(g, "certify", {{"n0", o.n0}, {"n", o.n}, {"alpha", o.alpha},
                            {"per_class_upper", o.per_class_upper}});
  std::printf("smoothed accuracy %.3f, cagm %.4g, abstained %zu/%zu\n", m.smoothed_accuracy,
              m.cagm, m.abstained, m.samples);
  return 0;
}

struct NoiseArgs {
  std::string model, plain_model, data;
  std::vector<double> scales;
  std::optional<std::size_t> draws, points;
  std::optional<std::uint64_t> samples;
  std::string mode;
};

int cmd_noise_sweep(const Globals& g, const NoiseArgs& a) {
  const ModelFile smoothed = ModelFile::load(resolve_input(g, a.model, "model.json"));
  const ModelFile plain = ModelFile::load(resolve_input(g, a.plain_model, "model_plain.json"));
  const Dataset test = load_dataset(resolve_input(g, a.data, "test.jsonl"));
  const Qcnn q = smoothed.rebuild();
  if (plain.circuit_hash != smoothed.circuit_hash)
    throw UsageError("plain and smoothed models use different circuits");
  NoiseSweepOptions o;
  const json s = config_section(g, "noise_sweep");
  o.scales = s.value("scales", o.scales);
  o.draws = s.value("draws", o.draws);
  o.points = s.value("points", o.points);
  o.smoothing_samples = s.value("smoothing_samples", o.smoothing_samples);
  if (!a.scales.empty()) o.scales = a.scales;
  if (a.draws) o.draws = *a.draws;
  if (a.points) o.points = *a.points;
  if (a.samples) o.smoothing_samples = *a.samples;
  if (!a.mode.empty()) o.mode = predict_mode_from_name(a.mode);

  const auto rows = noise_sweep(smoothed.model, plain.model.theta, q, test.samples, o,
                                RngStream(g.seed).fork("noise-sweep"));
  write_text_file(out_path(g, "noise_sweep.csv"), noise_sweep_csv(rows));
  write_meta(g, "noise-sweep",
             {{"scales", o.scales},
              {"draws", o.draws},
              {"points", std::min(o.points, test.samples.size())},
              {"smoothing_samples", o.smoothing_samples},
              {"predict_mode", predict_mode_name(o.mode)},
              {"ci_method", "normal approximation"},
              {"ci_z", o.z},
              {"noise", "N(0, diag((scale * sigma_smoothed)^2)), shared by both models per draw"}});
  for (const auto& r : rows)
    std::printf("scale %.3g: plain %.3f smoothed %.3f (noise norm %.4g)\n", r.scale, r.plain_acc,
                r.smoothed_acc, r.noise_norm);
  return 0;
}

struct SweepArgs {
  std::string train_data, test_data, space_file, journal;
  std::size_t budget = 10;
  std::optional<std::size_t> iterations;
  std::optional<std::uint64_t> n0, n;
};

std::string records_csv(const std::vector<SweepRecord>& rs) {
  std::ostringstream os;
  os.precision(17);
  os << "index,run_id,status,lambda,eta_theta,eta_sigma,eta_r,sigma0,reg_kind,"
        "cagm,semi_axis_avg,semi_axis_std,smoothed_accuracy\n";
  for (const auto& r : rs) {
    const auto& h = r.hyperparameters;
    os << r.index << ',' << r.run_id << ',' << r.status << ',' << h.lambda << ',' << h.eta_theta
       << ',' << h.eta_sigma << ',' << h.eta_r << ',' << h.sigma0 << ',' << reg_kind_name(h.reg_kind);
    if (r.metrics)
      os << ',' << r.metrics->cagm << ',' << r.metrics->semi_axis_avg << ','
         << r.metrics->semi_axis_std << ',' << r.metrics->smoothed_accuracy;
    else
      os << ",,,,";
    os << '\n';
  }
  return os.str();
}

int cmd_hp_sweep(const Globals& g, const SweepArgs& a) {
  const Dataset train_set = load_dataset(resolve_input(g, a.train_data, "train.jsonl"));
  const Dataset test_set = load_dataset(resolve_input(g, a.test_data, "test.jsonl"));
  if (a.budget < 1) throw UsageError("--budget must be >= 1");
  SweepOptions o;
  o.budget = a.budget;
  o.seed = g.seed;
  const json section = config_section(g, "hp_sweep");
  if (!a.space_file.empty())
    o.space = SearchSpace::from_json(read_text_file(a.space_file));
  else if (section.contains("search_space"))
    o.space = SearchSpace::from_json(section["search_space"].dump());
  o.base = snes_config_from(g);
  if (a.iterations) o.base.iterations = *a.iterations;
  o.certify = certify_options_from(g);
  if (a.n0) o.certify.n0 = *a.n0;
  if (a.n) o.certify.n = *a.n;
  o.qcnn = qcnn_from(g, train_set.n_qubits);
  o.journal_path = resolve_input(g, a.journal, "sweep_journal.jsonl");

  const auto records = run_hp_sweep(o, train_set.samples, test_set.samples);
  write_text_file(out_path(g, "sweep_records.csv"), records_csv(records));
  write_meta(g, "hp-sweep", {{"budget", o.budget}, {"journal", o.journal_path},
                             {"search_space", json::parse(o.space.to_json())}});
  std::size_t ok = 0;
  for (const auto& r : records) ok += r.status == "completed";
  std::printf("%zu/%zu runs completed; journal %s\n", ok, records.size(), o.journal_path.c_str());
  return 0;
}

struct AnalysisArgs {
  std::string journal;
  std::string metric = "cagm";
  double bin_width = 0.02;
  std::optional<double> min_accuracy;
  std::size_t bins = 10;
};

std::vector<SweepRecord> completed_records(const Globals& g, const AnalysisArgs& a) {
  const std::string path = resolve_input(g, a.journal, "sweep_journal.jsonl");
  if (!fs::exists(path)) throw UsageError("journal not found: " + path);
  auto rs = load_journal(path);
  std::erase_if(rs, [](const SweepRecord& r) { return r.status != "completed"; });
  if (rs.size() < 2) throw UsageError("frontier analysis needs >= 2 completed runs");
  return rs;
}

int cmd_frontier(const Globals& g, const AnalysisArgs& a) {
  const auto rs = completed_records(g, a);
  const auto f = frontier_extract(rs, robust_metric_from_name(a.metric), a.bin_width);
  write_text_file(out_path(g, "frontier.csv"), frontier_csv(f));
  write_text_file(out_path(g, "frontier_fit.json"), fit_json(f.fit) + "\n");
  write_meta(g, "frontier", {{"metric", a.metric}, {"bin_width", a.bin_width}, {"records", rs.size()}});
  std::printf("%zu frontier points\n", f.points.size());
  return 0;
}

int cmd_correlation(const Globals& g, const AnalysisArgs& a) {
  const auto rs = completed_records(g, a);
  const RobustMetric metric = robust_metric_from_name(a.metric);
  double min_acc = 0.0;
  if (a.min_accuracy) {
    min_acc = *a.min_accuracy;
  } else {
    const auto f = frontier_extract(rs, metric, a.bin_width);
    min_acc = f.points.back().accuracy;
  }
  const auto c = correlation_extract(rs, metric, min_acc, a.bins);
  write_text_file(out_path(g, "correlation.csv"), correlation_csv(c));
  write_text_file(out_path(g, "correlation_fit.json"), fit_json(c.fit) + "\n");
  write_meta(g, "correlation", {{"metric", a.metric}, {"min_accuracy", min_acc}, {"bins", a.bins}});
  std::printf("%zu bins above accuracy %.3f\n", c.bins.size(), min_acc);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"certiq: certified robustness for smoothed parameterized quantum classifiers"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Root seed");
  app.add_option("--config", g.config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--out", g.out_dir, "Output directory");
  app.add_option("--threads", g.threads, "Worker threads (env CERTIQ_THREADS)")->check(CLI::PositiveNumber);

  GenDataArgs gd;
  auto* gen = app.add_subcommand("gen-data", "Generate cluster-model train/test datasets");
  gen->add_option("--qubits", gd.qubits, "Chain length");
  gen->add_option("--train", gd.train, "Training samples");
  gen->add_option("--test", gd.test, "Test samples");
  gen->add_option("--phase-spec", gd.phase_file, "Phase boundary file")->check(CLI::ExistingFile);

  TrainArgs ta;
  auto* tr = app.add_subcommand("train", "Train a smoothed (or --plain) QCNN with sNES");
  tr->add_option("--data", ta.data, "Training set (default <out>/train.jsonl)");
  tr->add_flag("--plain", ta.plain, "Train the unregularized baseline");
  tr->add_option("--iterations", ta.iterations);
  tr->add_option("--lambda", ta.lambda);
  tr->add_option("--batch-size", ta.batch_size);
  tr->add_option("--eta-theta", ta.eta_theta);
  tr->add_option("--eta-sigma", ta.eta_sigma);
  tr->add_option("--eta-r", ta.eta_r);
  tr->add_option("--sigma0", ta.sigma0);
  tr->add_option("--reg", ta.reg_kind, "L2 or AREA");
  tr->add_option("--model-out", ta.model_out);

  CertifyArgs ca;
  auto* ce = app.add_subcommand("certify", "Certify every test sample");
  ce->add_option("--model", ca.model);
  ce->add_option("--data", ca.data);
  ce->add_option("--n0", ca.n0, "Selection shots");
  ce->add_option("--n", ca.n, "Estimation shots");
  ce->add_option("--alpha", ca.alpha);
  ce->add_flag("--per-class", ca.per_class, "Per-class Clopper-Pearson upper bounds");

  NoiseArgs na;
  auto* ns = app.add_subcommand("noise-sweep", "Accuracy of smoothed vs plain model under parameter noise");
  ns->add_option("--model", na.model);
  ns->add_option("--plain-model", na.plain_model);
  ns->add_option("--data", na.data);
  ns->add_option("--scales", na.scales)->delimiter(',');
  ns->add_option("--draws", na.draws);
  ns->add_option("--points", na.points);
  ns->add_option("--samples", na.samples, "Monte-Carlo samples per smoothed prediction");
  ns->add_option("--mode", na.mode, "count-argmax or mean-prob");

  SweepArgs sa;
  auto* hp = app.add_subcommand("hp-sweep", "Randomized hyperparameter sweep");
  hp->add_option("--train-data", sa.train_data);
  hp->add_option("--test-data", sa.test_data);
  hp->add_option("--budget", sa.budget);
  hp->add_option("--search-space", sa.space_file)->check(CLI::ExistingFile);
  hp->add_option("--journal", sa.journal);
  hp->add_option("--iterations", sa.iterations);
  hp->add_option("--n0", sa.n0);
  hp->add_option("--n", sa.n);

  AnalysisArgs fa;
  auto* fr = app.add_subcommand("frontier", "Accuracy/robustness frontier from a sweep journal");
  fr->add_option("--journal", fa.journal);
  fr->add_option("--metric", fa.metric, "cagm or semi_axis_avg");
  fr->add_option("--bin-width", fa.bin_width);

  AnalysisArgs co;
  auto* cr = app.add_subcommand("correlation", "Semi-axis spread against the robustness metric");
  cr->add_option("--journal", co.journal);
  cr->add_option("--metric", co.metric, "cagm or semi_axis_avg");
  cr->add_option("--min-accuracy", co.min_accuracy, "Default: lowest frontier accuracy");
  cr->add_option("--bins", co.bins);
  cr->add_option("--bin-width", co.bin_width, "Frontier bin width for the default filter");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (g.threads > 0) set_thread_count(g.threads);
    if (!g.config_path.empty()) {
      g.config = json::parse(read_text_file(g.config_path));
      if (!g.config.is_object()) throw UsageError("config must be a JSON object");
    }
    fs::create_directories(g.out_dir);
    if (*gen) return cmd_gen_data(g, gd);
    if (*tr) return cmd_train(g, ta);
    if (*ce) return cmd_certify(g, ca);
    if (*ns) return cmd_noise_sweep(g, na);
    if (*hp) return cmd_hp_sweep(g, sa);
    if (*fr) return cmd_frontier(g, fa);
    if (*cr) return cmd_correlation(g, co);
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
