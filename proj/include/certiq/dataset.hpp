#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "certiq/hamiltonian.hpp"
#include "certiq/phase_diagram.hpp"
#include "certiq/statevector.hpp"

namespace certiq {

inline constexpr int kDatasetVersion = 1;

struct Sample {
  ClusterParams params;
  int label = 0;
  Statevector state;  // ground state
  double energy = 0.0;

  friend bool operator==(const Sample&, const Sample&) = default;
};

struct Dataset {
  int n_qubits = 0;
  std::uint64_t seed = 0;
  std::uint64_t spec_hash = 0;
  std::vector<Sample> samples;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct DatasetSplit {
  Dataset train;
  Dataset test;
};

/// `count` i.i.d. uniform (j1, j2) draws over the phase-boundary domain with their
/// ground states and labels. Pairs present in `exclude` are redrawn.
Dataset gen_dataset(int n_qubits, std::size_t count, std::uint64_t seed,
                    const PhaseBoundarySpec& spec,
                    const std::set<std::pair<double, double>>& exclude = {});

/// Train and test sets from independent streams of `seed` with no shared
/// (j1, j2) pair. Defaults give 50 + 50 samples.
DatasetSplit gen_split(int n_qubits, std::uint64_t seed,
                       const PhaseBoundarySpec& spec, std::size_t n_train = 50,
                       std::size_t n_test = 50);

/// ||H psi - E psi|| for a stored sample.
double eigen_residual(const Sample& s);

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// JSON lines: header {version, n_qubits, count, spec_hash, seed}, then one
/// {j1, j2, label, energy, amplitudes: [[re, im], ...]} per sample.
std::string dataset_to_jsonl(const Dataset& d);
Dataset dataset_from_jsonl(const std::string& text);

void save_dataset(const Dataset& d, const std::string& path);
Dataset load_dataset(const std::string& path);

}  // namespace certiq
