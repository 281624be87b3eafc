#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "certiq/dataset.hpp"
#include "certiq/experiments.hpp"
#include "certiq/hamiltonian.hpp"
#include "certiq/qcnn.hpp"
#include "certiq/smoothing.hpp"
#include "certiq/snes.hpp"
#include "certiq/stats.hpp"
#include "../support/oracles.hpp"

using namespace certiq;
namespace o = certiq::oracle;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

void check(Outcome& out, bool ok, const std::string& what) {
  if (!ok) {
    out.pass = false;
    if (!out.detail.empty()) out.detail += "; ";
    out.detail += what;
  }
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// --- 1 -----------------------------------------------------------------------

Outcome circuits_vs_dense() {
  Outcome out;
  RngStream rng(1001);
  double worst = 0.0;
  for (int c = 0; c < 200; ++c) {
    const int n = 1 + c % 3;
    const std::size_t d = 4;
    const auto circuit = o::random_circuit(n, d, 2 + c % 9, rng);
    const auto theta = rng.normal_vector(d);
    const auto psi = o::random_state(n, rng);
    const Eigen::VectorXcd ref = o::dense_circuit(circuit, theta) * o::to_eigen(psi);
    const auto got = run_circuit(psi, circuit, theta);
    for (std::size_t i = 0; i < got.dim(); ++i)
      worst = std::max(worst, std::abs(got[i] - ref[static_cast<Eigen::Index>(i)]));
  }
  check(out, worst <= 1e-10, fmt("max amplitude error %.3g", worst));
  if (out.pass) out.detail = fmt("max amplitude error %.3g over 200 circuits", worst);
  return out;
}

// --- 2 -----------------------------------------------------------------------

double residual_dense(const Sample& s) {
  const Eigen::MatrixXd h = o::cluster_dense(s.params.n_qubits, s.params.j1, s.params.j2);
  const Eigen::VectorXcd v = o::to_eigen(s.state);
  return (h.cast<std::complex<double>>() * v - s.energy * v).norm();
}

Outcome hamiltonian_ground_states() {
  Outcome out;
  for (int n = 3; n <= 8; ++n) {
    const auto g = ground_state(build_hamiltonian({n, 0.0, 0.0}));
    const auto ones = (std::size_t{1} << n) - 1;
    check(out, std::abs(g.energy + n) <= 1e-9, fmt("n=%.0f zero-coupling energy %.12g", n, g.energy));
    check(out, std::abs(std::abs(g.state[ones]) - 1.0) <= 1e-9, fmt("n=%.0f state not |1..1>", n));
  }
  RngStream rng(1002);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const int n = 3 + t % 4;
    const double j1 = rng.uniform(-4, 4), j2 = rng.uniform(-4, 4);
    const auto g = ground_state(build_hamiltonian({n, j1, j2}));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(o::cluster_dense(n, j1, j2));
    worst = std::max(worst, std::abs(g.energy - es.eigenvalues()[0]));
  }
  check(out, worst <= 1e-9, fmt("Lanczos vs dense energy gap %.3g", worst));
  const auto split = gen_split(4, 7, default_phase_spec());
  double worst_res = 0.0;
  for (const auto* d : {&split.train, &split.test})
    for (const auto& s : d->samples) worst_res = std::max(worst_res, residual_dense(s));
  check(out, worst_res < 1e-8, fmt("dataset eigen-residual %.3g", worst_res));
  if (out.pass)
    out.detail = fmt("energy gap %.2g, dataset residual %.2g over 100 samples", worst, worst_res);
  return out;
}

// --- 3 -----------------------------------------------------------------------

// Smoothed probability of h(z) = [z <= beta] under z ~ N(theta + delta, sigma^2)
// by composite Simpson integration of the Gaussian density.
double smoothed_below(double theta, double sigma, double beta, double delta) {
  const double mu = theta + delta;
  const double lo = mu - 12 * sigma;
  if (beta <= lo) return 0.0;
  const int m = 20000;
  const double h = (beta - lo) / m;
  auto f = [&](double z) {
    const double u = (z - mu) / sigma;
    return std::exp(-0.5 * u * u) / (sigma * std::sqrt(2 * std::numbers::pi));
  };
  double s = f(lo) + f(beta);
  for (int i = 1; i < m; ++i) s += f(lo + i * h) * (i % 2 ? 4 : 2);
  return s * h / 3;
}

Outcome tightness() {
  Outcome out;
  RngStream rng(1003);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const double theta = rng.uniform(-1, 1), sigma = rng.uniform(0.1, 2.0);
    double beta = rng.uniform(-1, 1);
    if (std::abs(beta - theta) < 0.05 * sigma) beta = theta + 0.05 * sigma;
    const double p_below = smoothed_below(theta, sigma, beta, 0.0);
    const bool top_below = p_below > 0.5;
    const double p_a = top_below ? p_below : 1 - p_below;
    const double radius = certified_radius(p_a, 1 - p_a);
    // smallest shift along the one axis that flips the smoothed vote
    const double dir = top_below ? 1.0 : -1.0;
    double a = 0.0, b = 20 * sigma;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (a + b);
      const bool kept = (smoothed_below(theta, sigma, beta, dir * mid) > 0.5) == top_below;
      (kept ? a : b) = mid;
    }
    worst = std::max(worst, std::abs(radius - 0.5 * (a + b) / sigma));
  }
  check(out, worst <= 1e-3, fmt("radius vs flip distance %.3g", worst));
  if (out.pass) out.detail = fmt("max |s_e - flip distance / sigma| = %.3g over 50 triples", worst);
  return out;
}

// --- 4 -----------------------------------------------------------------------

Outcome clopper_pearson() {
  Outcome out;
  const double alpha = 0.01;
  for (std::uint64_t n : {10u, 100u, 1000u}) {
    const double got = clopper_pearson_lower(n, n, alpha);
    check(out, std::abs(got - std::pow(alpha, 1.0 / n)) <= 1e-5,
          fmt("lower(n,n) n=%.0f gives %.8f", static_cast<double>(n), got));
  }
  RngStream rng(1004);
  std::string cov;
  for (double p : {0.5, 0.9, 0.99}) {
    const int n = 500, reps = 10000;
    int covered = 0;
    for (int r = 0; r < reps; ++r) {
      std::uint64_t k = 0;
      for (int i = 0; i < n; ++i) k += rng.uniform() < p;
      covered += clopper_pearson_lower(k, n, alpha) <= p;
    }
    const double c = static_cast<double>(covered) / reps;
    check(out, c >= 1 - alpha - 0.005, fmt("coverage %.4f at p=%.2f", c, p));
    cov += fmt(" %.4f", c);
  }
  if (out.pass) out.detail = "closed form ok; coverage" + cov;
  return out;
}

// --- 5 -----------------------------------------------------------------------

Outcome ellipsoid_volume() {
  Outcome out;
  RngStream rng(1005);
  std::string rel;
  for (std::size_t d : {2u, 3u, 4u}) {
    std::vector<double> sigma(d);
    for (auto& s : sigma) s = rng.uniform(0.3, 1.5);
    const double s_e = rng.uniform(0.5, 2.0);
    std::vector<double> axes(d);
    double box = 1.0;
    for (std::size_t i = 0; i < d; ++i) {
      axes[i] = s_e * sigma[i];
      box *= 2 * axes[i];
    }
    const int shots = 400000;
    int inside = 0;
    for (int k = 0; k < shots; ++k) {
      double q = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        const double u = rng.uniform(-1, 1);
        q += u * u;
      }
      inside += q < 1.0;
    }
    const double mc = box * inside / shots;
    const double err = std::abs(certified_volume(sigma, s_e) / mc - 1);
    check(out, err <= 0.02, fmt("D=%.0f volume off by %.4f", static_cast<double>(d), err));
    rel += fmt(" %.4f", err);
  }
  const double a = 0.7, b = 1.9;
  check(out, std::abs(certified_volume(std::vector<double>{a, b}, 1.0) - std::numbers::pi * a * b) <= 1e-12,
        "D=2 closed form");
  check(out, std::abs(certified_volume(std::vector<double>{1, 1, 1}, 1.0) - 4 * std::numbers::pi / 3) <= 1e-12,
        "unit sphere");
  if (out.pass) out.detail = "closed forms exact; MC relative error" + rel;
  return out;
}

// --- 6 -----------------------------------------------------------------------

Outcome snes_sanity() {
  Outcome out;
  double worst_sum = 0.0;
  for (std::size_t lam = 2; lam <= 64; ++lam) {
    double s = 0.0;
    for (double u : rank_utilities(lam)) s += u;
    worst_sum = std::max(worst_sum, std::abs(s));
  }
  check(out, worst_sum <= 1e-12, fmt("utility sum %.3g", worst_sum));
  const auto u4 = rank_utilities(4);
  double denom = 0.0;
  for (int k = 1; k <= 4; ++k) denom += std::max(0.0, std::log(3.0) - std::log(k));
  for (int k = 1; k <= 4; ++k) {
    const double direct = std::max(0.0, std::log(3.0) - std::log(k)) / denom - 0.25;
    check(out, std::abs(u4[k - 1] - direct) <= 5e-4, fmt("lambda=4 rank %.0f", k));
  }
  SnesConfig c;
  c.lambda = 16;
  c.eta_theta = 1.0;
  c.eta_sigma = 0.1;
  c.eta_r = 0.0;
  std::vector<double> theta{2.0, 2.0}, sigma{0.5, 0.5};
  RngStream rng(67);
  double dist = 1e9;
  int it = 0;
  for (; it < 500 && dist >= 1e-2; ++it) {
    auto r = snes_step(theta, sigma, c,
                       [](std::span<const double> z) { return -(z[0] * z[0] + z[1] * z[1]); }, rng);
    theta = r.theta;
    sigma = r.sigma;
    dist = std::hypot(theta[0], theta[1]);
  }
  check(out, dist < 1e-2, fmt("bowl distance %.3g after 500 iterations", dist));
  if (out.pass) out.detail = fmt("zero-sum %.2g; bowl reached %.2g after %.0f iterations", worst_sum, dist, it);
  return out;
}

// --- 7 -----------------------------------------------------------------------

Outcome desk_experiment() {
  Outcome out;
  const std::uint64_t seed = 7;
  const auto split = gen_split(4, seed, default_phase_spec());
  const Qcnn q = build_qcnn({4, 1});
  SnesConfig cfg;
  cfg.seed = seed;
  const auto smoothed = train(q.circuit, q.readout, split.train.samples, cfg);
  const auto plain = train(q.circuit, q.readout, split.train.samples, plain_baseline_config(cfg));
  const auto cert = certify_dataset(smoothed.model, q, split.test.samples, CertifyOptions{},
                                    RngStream(seed).fork("certify"));
  const auto& m = cert.metrics;
  check(out, m.smoothed_accuracy >= 0.70, fmt("smoothed test accuracy %.3f < 0.70", m.smoothed_accuracy));
  check(out, m.cagm_certified > 0.0, "CAGM over certified samples not positive");

  NoiseSweepOptions ns;
  ns.scales = {0.0, 2.0};
  const auto rows = noise_sweep(smoothed.model, plain.model.theta, q, split.test.samples, ns,
                                RngStream(seed).fork("noise-sweep"));
  const auto& r2 = rows[1];
  // one-sided 95%: reject only if smoothed is significantly below plain
  const bool noninferior = r2.diff_mean + 1.645 * r2.diff_se >= 0.0;
  check(out, noninferior,
        fmt("scale 2: smoothed %.3f vs plain %.3f", r2.smoothed_acc, r2.plain_acc));
  std::ostringstream d;
  d.precision(4);
  d << "test acc " << m.smoothed_accuracy << ", cagm_certified " << m.cagm_certified
    << ", abstained " << m.abstained << "; scale 2 smoothed " << r2.smoothed_acc << " plain "
    << r2.plain_acc << " (diff " << r2.diff_mean << " +- " << r2.diff_se << ")";
  out.detail = out.pass ? d.str() : out.detail + " [" + d.str() + "]";
  return out;
}

// --- 8 -----------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome cli_determinism() {
  Outcome out;
  const fs::path root = fs::temp_directory_path() / "certiq_acceptance_cli";
  fs::remove_all(root);
  const std::vector<std::string> steps{
      "gen-data --qubits 4 --train 20 --test 20",
      "train --iterations 40",
      "train --plain --iterations 40",
      "certify --n0 50 --n 300",
      "noise-sweep --draws 10 --points 10 --samples 30",
      "hp-sweep --budget 3 --iterations 10 --n0 20 --n 100",
      "frontier --bin-width 0.05",
      "correlation --min-accuracy 0 --bins 4",
  };
  for (const char* run : {"a", "b"}) {
    const fs::path dir = root / run;
    // second pass uses a different worker count on purpose
    const std::string threads = std::string(run) == "a" ? "1" : "3";
    for (const auto& s : steps) {
      const std::string cmd = std::string(CERTIQ_CLI_PATH) + " --seed 11 --threads " + threads +
                              " --out " + dir.string() + " " + s + " > /dev/null";
      const int rc = std::system(cmd.c_str());
      check(out, rc == 0, "command failed: " + s);
    }
  }
  std::size_t compared = 0;
  for (const auto& e : fs::directory_iterator(root / "a")) {
    const std::string name = e.path().filename().string();
    if (name.ends_with(".meta.json")) continue;
    ++compared;
    const fs::path other = root / "b" / name;
    check(out, fs::exists(other) && slurp(e.path()) == slurp(other), "differs: " + name);
  }
  check(out, compared >= 15, fmt("only %.0f data files produced", static_cast<double>(compared)));
  if (out.pass) out.detail = fmt("%.0f data files byte-identical across two runs", static_cast<double>(compared));
  fs::remove_all(root);
  return out;
}

// --- 9 -----------------------------------------------------------------------

SweepRecord synthetic(double acc, double metric, double axis_std) {
  SweepRecord r;
  r.status = "completed";
  MetricsReport m;
  m.smoothed_accuracy = acc;
  m.cagm = metric;
  m.semi_axis_avg = metric;
  m.semi_axis_std = axis_std;
  r.metrics = m;
  return r;
}

Outcome analytics() {
  Outcome out;
  RngStream rng(1009);
  std::vector<SweepRecord> rs;
  for (int i = 0; i < 1000; ++i) rs.push_back(synthetic(rng.uniform(0.2, 1.0), rng.uniform(0.0, 0.05), 0.0));
  const double w = 0.02;
  const auto f = frontier_extract(rs, RobustMetric::Cagm, w);
  std::size_t violations = 0;
  for (const auto& p : f.points)
    for (const auto& r : rs) {
      const auto& m = *r.metrics;
      const long bin = static_cast<long>(std::floor(m.smoothed_accuracy / w + 1e-9));
      if (bin >= p.bin && m.cagm > p.metric) ++violations;
    }
  check(out, !f.points.empty() && violations == 0,
        fmt("%.0f dominance violations", static_cast<double>(violations)));

  std::vector<SweepRecord> lin;
  for (int i = 0; i < 300; ++i) {
    const double m = rng.uniform(0.001, 0.05);
    lin.push_back(synthetic(0.9, m, 2 * m));
  }
  const auto c = correlation_extract(lin, RobustMetric::Cagm, 0.5);
  const double slope = c.fit ? c.fit->slope : NAN;
  check(out, c.fit && std::abs(slope - 2.0) <= 1e-9, fmt("fitted slope %.12g", slope));
  if (out.pass)
    out.detail = fmt("%.0f frontier points, 0 violations; slope error %.2g",
                     static_cast<double>(f.points.size()), std::abs(slope - 2.0));
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all{
      {1, "gate/circuit dense oracle", 10, circuits_vs_dense},
      {2, "hamiltonian and ground states", 60, hamiltonian_ground_states},
      {3, "certificate tightness", 5, tightness},
      {4, "clopper-pearson", 30, clopper_pearson},
      {5, "ellipsoid volume", 20, ellipsoid_volume},
      {6, "snes sanity", 10, snes_sanity},
      {7, "desk experiment", 1800, desk_experiment},
      {8, "cli determinism", 300, cli_determinism},
      {9, "frontier/correlation analytics", 5, analytics},
  };
  int failed = 0;
  for (const auto& c : all) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget_s) {
      r.pass = false;
      r.detail += fmt(" [runtime %.1f s over budget %.0f s]", secs, c.budget_s);
    }
    std::printf("%s criterion %d (%s): %s [%.2f s]\n", r.pass ? "PASS" : "FAIL", c.id, c.name,
                r.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !r.pass;
  }
  return failed == 0 ? 0 : 1;
}
