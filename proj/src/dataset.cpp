#include "certiq/dataset.hpp"

#include <fstream>
#include <sstream>

#include "certiq/hash.hpp"
#include "certiq/parallel.hpp"
#include "certiq/rng.hpp"
#include "json.hpp"

namespace certiq {

Dataset gen_dataset(int n_qubits, std::size_t count, std::uint64_t seed,
                    const PhaseBoundarySpec& spec,
                    const std::set<std::pair<double, double>>& exclude) {
  if (count < 1) throw std::invalid_argument("dataset count must be >= 1");
  if (n_qubits < 3)
    throw std::invalid_argument("cluster datasets need n >= 3 qubits");

  Dataset d;
  d.n_qubits = n_qubits;
  d.seed = seed;
  d.spec_hash = spec.hash();

  RngStream coords = RngStream(seed).fork("couplings");
  std::set<std::pair<double, double>> seen;
  d.samples.resize(count);
  for (auto& s : d.samples) {
    std::pair<double, double> jj;
    do {
      jj = {coords.uniform(spec.lo, spec.hi), coords.uniform(spec.lo, spec.hi)};
    } while (exclude.contains(jj) || seen.contains(jj));
    seen.insert(jj);
    s.params = {n_qubits, jj.first, jj.second};
    s.label = phase_label(jj.first, jj.second, spec);
  }

  parallel_for(count, [&](std::size_t i) {
    auto& s = d.samples[i];
    LanczosOptions opts;
    opts.seed = splitmix64(seed ^ splitmix64(i + 1));
    auto gs = ground_state(build_hamiltonian(s.params), opts);
    s.energy = gs.energy;
    s.state = std::move(gs.state);
  });
  return d;
}

DatasetSplit gen_split(int n_qubits, std::uint64_t seed,
                       const PhaseBoundarySpec& spec, std::size_t n_train,
                       std::size_t n_test) {
  const RngStream root(seed);
  const std::uint64_t train_seed = root.fork("train").key();
  const std::uint64_t test_seed = root.fork("test").key();
  DatasetSplit split;
  split.train = gen_dataset(n_qubits, n_train, train_seed, spec);
  std::set<std::pair<double, double>> used;
  for (const auto& s : split.train.samples) used.insert({s.params.j1, s.params.j2});
  split.test = gen_dataset(n_qubits, n_test, test_seed, spec, used);
  return split;
}

double eigen_residual(const Sample& s) {
  const auto h = build_hamiltonian(s.params);
  const auto d = static_cast<Eigen::Index>(s.state.dim());
  Eigen::VectorXd re(d), im(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    re[i] = s.state[static_cast<std::size_t>(i)].real();
    im[i] = s.state[static_cast<std::size_t>(i)].imag();
  }
  // H is real, so it acts on the real and imaginary parts separately.
  const Eigen::VectorXd r_re = h * re - s.energy * re;
  const Eigen::VectorXd r_im = h * im - s.energy * im;
  return std::sqrt(r_re.squaredNorm() + r_im.squaredNorm());
}

std::string dataset_to_jsonl(const Dataset& d) {
  std::string out;
  nlohmann::json header{{"version", kDatasetVersion},
                        {"n_qubits", d.n_qubits},
                        {"count", d.samples.size()},
                        {"spec_hash", hex64(d.spec_hash)},
                        {"seed", d.seed}};
  out += header.dump();
  out += '\n';
  for (const auto& s : d.samples) {
    nlohmann::json amps = nlohmann::json::array();
    for (const auto& a : s.state.amplitudes()) amps.push_back({a.real(), a.imag()});
    nlohmann::json rec{{"j1", s.params.j1},
                       {"j2", s.params.j2},
                       {"label", s.label},
                       {"energy", s.energy},
                       {"amplitudes", std::move(amps)}};
    out += rec.dump();
    out += '\n';
  }
  return out;
}

Dataset dataset_from_jsonl(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.empty())
    throw ParseError("dataset: missing header line");

  Dataset d;
  std::size_t count = 0;
  try {
    const auto h = nlohmann::json::parse(line);
    const int version = h.at("version").get<int>();
    if (version != kDatasetVersion)
      throw ParseError("dataset: unsupported version " + std::to_string(version));
    d.n_qubits = h.at("n_qubits").get<int>();
    count = h.at("count").get<std::size_t>();
    d.spec_hash = std::stoull(h.at("spec_hash").get<std::string>(), nullptr, 16);
    d.seed = h.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("dataset: malformed header: ") + e.what());
  }
  if (d.n_qubits < 1 || d.n_qubits > 30)
    throw ParseError("dataset: invalid n_qubits in header");

  const std::size_t dim = std::size_t{1} << d.n_qubits;
  std::size_t index = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      const auto r = nlohmann::json::parse(line);
      Sample s;
      s.params = {d.n_qubits, r.at("j1").get<double>(), r.at("j2").get<double>()};
      s.label = r.at("label").get<int>();
      s.energy = r.at("energy").get<double>();
      const auto& amps = r.at("amplitudes");
      if (amps.size() != dim)
        throw ParseError("record " + std::to_string(index) + ": expected " +
                         std::to_string(dim) + " amplitudes, found " +
                         std::to_string(amps.size()));
      std::vector<Complex> a(dim);
      for (std::size_t i = 0; i < dim; ++i)
        a[i] = {amps[i].at(0).get<double>(), amps[i].at(1).get<double>()};
      s.state = Statevector(d.n_qubits, std::move(a));
      d.samples.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("record " + std::to_string(index) + ": " + e.what());
    }
    ++index;
  }
  if (d.samples.size() != count)
    throw ParseError("dataset: header announces " + std::to_string(count) +
                     " records, found " + std::to_string(d.samples.size()) +
                     " (record " + std::to_string(d.samples.size()) +
                     " missing)");
  return d;
}

void save_dataset(const Dataset& d, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write dataset to " + path);
  out << dataset_to_jsonl(d);
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open dataset " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return dataset_from_jsonl(ss.str());
}

}  // namespace certiq
