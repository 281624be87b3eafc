#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

#include <gtest/gtest.h>

#include "certiq/dataset.hpp"
#include "certiq/hamiltonian.hpp"
#include "certiq/phase_diagram.hpp"
#include "../support/oracles.hpp"

using namespace certiq;
namespace o = certiq::oracle;

TEST(Hamiltonian, ZeroCouplingsIsSumOfZ) {
  const auto h = build_hamiltonian({4, 0.0, 0.0}).to_dense();
  for (Eigen::Index i = 0; i < h.rows(); ++i)
    for (Eigen::Index j = 0; j < h.cols(); ++j)
      if (i != j) EXPECT_EQ(h(i, j), 0.0);
  EXPECT_EQ(h(15, 15), -4.0);  // |1111>
  EXPECT_EQ(h(0, 0), 4.0);
}

TEST(Hamiltonian, MatchesKroneckerPauliStrings) {
  RngStream rng(11);
  for (int n : {3, 4, 5}) {
    for (int trial = 0; trial < 4; ++trial) {
      const double j1 = rng.uniform(-4, 4), j2 = rng.uniform(-4, 4);
      const Eigen::MatrixXd ref = o::cluster_dense(n, j1, j2);
      const Eigen::MatrixXd got = build_hamiltonian({n, j1, j2}).to_dense();
      EXPECT_LT((ref - got).cwiseAbs().maxCoeff(), 1e-12) << "n=" << n;
    }
  }
}

TEST(Hamiltonian, IsSymmetric) {
  const Eigen::MatrixXd h = build_hamiltonian({4, 1.5, -2.0}).to_dense();
  EXPECT_EQ((h - h.transpose()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Hamiltonian, RejectsBadSizes) {
  EXPECT_THROW(build_hamiltonian({2, 0.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(build_hamiltonian({9, 0.0, 0.0}, 8), std::invalid_argument);
}

TEST(GroundState, ZeroCouplingsGivesAllOnes) {
  for (int n = 3; n <= 8; ++n) {
    const auto gs = ground_state(build_hamiltonian({n, 0.0, 0.0}));
    EXPECT_NEAR(gs.energy, -n, 1e-9);
    const std::size_t ones = gs.state.dim() - 1;
    EXPECT_NEAR(gs.state[ones].real(), 1.0, 1e-9);
    EXPECT_NEAR(gs.state.norm(), 1.0, 1e-12);
  }
}

TEST(GroundState, MatchesDenseDiagonalization) {
  RngStream rng(12);
  for (int n : {3, 4, 5, 6}) {
    for (int trial = 0; trial < 3; ++trial) {
      const double j1 = rng.uniform(-4, 4), j2 = rng.uniform(-4, 4);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(o::cluster_dense(n, j1, j2));
      const auto gs = ground_state(build_hamiltonian({n, j1, j2}));
      EXPECT_NEAR(gs.energy, es.eigenvalues()[0], 1e-9) << n << " " << j1 << " " << j2;
      EXPECT_LT(gs.residual, 1e-8);
    }
  }
}

TEST(GroundState, ResidualOnEightQubits) {
  const auto h = build_hamiltonian({8, 1.3, -0.7});
  const auto gs = ground_state(h);
  Sample s{{8, 1.3, -0.7}, 0, gs.state, gs.energy};
  EXPECT_LT(eigen_residual(s), 1e-8);
}

TEST(GroundState, DeterministicAndPhaseFixed) {
  const auto h = build_hamiltonian({5, -2.5, 0.4});
  const auto a = ground_state(h);
  const auto b = ground_state(h);
  EXPECT_EQ(a.state, b.state);
  std::size_t big = 0;
  for (std::size_t i = 0; i < a.state.dim(); ++i)
    if (std::abs(a.state[i]) > std::abs(a.state[big])) big = i;
  EXPECT_GT(a.state[big].real(), 0.0);
  EXPECT_EQ(a.state[big].imag(), 0.0);
}

TEST(GroundState, ConvergenceFailureIsReported) {
  LanczosOptions opts;
  opts.krylov_dim = 2;
  opts.max_restarts = 0;
  opts.tolerance = 1e-14;
  EXPECT_THROW(ground_state(build_hamiltonian({6, 1.1, 0.9}), opts), ConvergenceError);
}

TEST(GroundState, SpectrumInvariantUnderCyclicShift) {
  // Relabel qubits q -> q+1 by conjugating with the shift permutation.
  RngStream rng(13);
  for (int n : {3, 4, 5}) {
    const double j1 = rng.uniform(-3, 3), j2 = rng.uniform(-3, 3);
    const Eigen::MatrixXd h = build_hamiltonian({n, j1, j2}).to_dense();
    const auto d = h.rows();
    Eigen::MatrixXd perm = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      const auto bits = static_cast<std::uint64_t>(i);
      const std::uint64_t rotated = ((bits >> 1) | ((bits & 1) << (n - 1)));
      perm(static_cast<Eigen::Index>(rotated), i) = 1.0;
    }
    const Eigen::MatrixXd shifted = perm * h * perm.transpose();
    EXPECT_LT((shifted - h).cwiseAbs().maxCoeff(), 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> a(h), b(shifted);
    EXPECT_NEAR(a.eigenvalues()[0], b.eigenvalues()[0], 1e-9);
  }
}

TEST(PhaseLabel, OriginIsTrivial) {
  EXPECT_EQ(phase_label(0.0, 0.0, default_phase_spec()), 0);
}

TEST(PhaseLabel, OutsideDomainThrows) {
  EXPECT_THROW(phase_label(4.5, 0.0, default_phase_spec()), std::out_of_range);
}

TEST(PhaseLabel, LatticePartition) {
  const auto& spec = default_phase_spec();
  for (int a = 0; a <= 100; ++a)
    for (int b = 0; b <= 100; ++b) {
      const double j1 = -4.0 + 0.08 * a, j2 = -4.0 + 0.08 * b;
      int matches = 0;
      for (const auto& r : spec.regions) {
        PhaseBoundarySpec single = spec;
        single.regions = {r};
        try {
          phase_label(j1, j2, single);
          ++matches;
        } catch (const std::out_of_range&) {
        }
      }
      EXPECT_GE(matches, 1) << j1 << "," << j2;
      EXPECT_NO_THROW(phase_label(j1, j2, spec));
    }
}

TEST(PhaseLabel, AllFourClassesAppear) {
  RngStream rng(14);
  std::map<int, int> counts;
  for (int i = 0; i < 1000; ++i)
    ++counts[phase_label(rng.uniform(-4, 4), rng.uniform(-4, 4), default_phase_spec())];
  for (int c = 0; c < 4; ++c) EXPECT_GT(counts[c], 0) << c;
}

TEST(PhaseLabel, AgreesWithFreeFermionWindingNumber) {
  RngStream rng(15);
  int checked = 0;
  while (checked < 2000) {
    const double j1 = rng.uniform(-4, 4), j2 = rng.uniform(-4, 4);
    if (o::boundary_distance(j1, j2) < 1e-6) continue;
    EXPECT_EQ(phase_label(j1, j2, default_phase_spec()), o::winding_phase(j1, j2))
        << j1 << "," << j2;
    ++checked;
  }
}

TEST(PhaseSpec, ShippedFileMatchesBuiltIn) {
  const auto file = PhaseBoundarySpec::load(CERTIQ_DATA_DIR "/cluster_phases_v1.json");
  EXPECT_EQ(file.hash(), default_phase_spec().hash());
}

TEST(PhaseSpec, AcceptsBareRegionList) {
  const auto spec = PhaseBoundarySpec::from_json(
      R"([{"class": 2, "polygon": [[-4,-4],[4,-4],[4,4],[-4,4]]}])");
  EXPECT_EQ(phase_label(1.0, 1.0, spec), 2);
}

TEST(Dataset, DeterministicPerSeed) {
  const auto a = gen_dataset(4, 50, 7, default_phase_spec());
  const auto b = gen_dataset(4, 50, 7, default_phase_spec());
  EXPECT_EQ(dataset_to_jsonl(a), dataset_to_jsonl(b));
}

TEST(Dataset, SamplesAreEigenpairsWithConsistentLabels) {
  const auto d = gen_dataset(5, 20, 3, default_phase_spec());
  for (const auto& s : d.samples) {
    EXPECT_LT(eigen_residual(s), 1e-8);
    EXPECT_EQ(s.label, phase_label(s.params.j1, s.params.j2, default_phase_spec()));
    EXPECT_NEAR(s.state.norm(), 1.0, 1e-12);
  }
}

TEST(Dataset, DefaultSplitIsFiftyFiftyAndDisjoint) {
  const auto split = gen_split(4, 7, default_phase_spec());
  EXPECT_EQ(split.train.samples.size(), 50u);
  EXPECT_EQ(split.test.samples.size(), 50u);
  for (const auto& a : split.train.samples)
    for (const auto& b : split.test.samples)
      EXPECT_FALSE(a.params.j1 == b.params.j1 && a.params.j2 == b.params.j2);
}

TEST(Dataset, ExcludedPairsAreRedrawn) {
  const auto first = gen_dataset(3, 5, 9, default_phase_spec());
  std::set<std::pair<double, double>> used;
  for (const auto& s : first.samples) used.insert({s.params.j1, s.params.j2});
  const auto again = gen_dataset(3, 5, 9, default_phase_spec(), used);
  for (const auto& s : again.samples) EXPECT_FALSE(used.contains({s.params.j1, s.params.j2}));
}

TEST(DatasetIo, RoundTripIsBitExact) {
  const auto d = gen_dataset(4, 6, 21, default_phase_spec());
  const auto path = std::filesystem::temp_directory_path() / "certiq_roundtrip.jsonl";
  save_dataset(d, path.string());
  EXPECT_EQ(load_dataset(path.string()), d);
  std::filesystem::remove(path);
}

TEST(DatasetIo, TruncatedFileNamesRecord) {
  const auto d = gen_dataset(3, 4, 22, default_phase_spec());
  std::string text = dataset_to_jsonl(d);
  text.resize(text.size() - 40);
  try {
    dataset_from_jsonl(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("record 3"), std::string::npos) << e.what();
  }
}

TEST(DatasetIo, HeaderCountAndQubitsAreChecked) {
  const auto d = gen_dataset(3, 3, 23, default_phase_spec());
  std::string text = dataset_to_jsonl(d);
  // drop the whole last record
  text.resize(text.rfind('\n', text.size() - 2) + 1);
  EXPECT_THROW(dataset_from_jsonl(text), ParseError);

  std::string wrong = dataset_to_jsonl(d);
  const auto pos = wrong.find("\"n_qubits\":3");
  ASSERT_NE(pos, std::string::npos);
  wrong.replace(pos, 12, "\"n_qubits\":4");
  EXPECT_THROW(dataset_from_jsonl(wrong), ParseError);

  std::string version = dataset_to_jsonl(d);
  version.replace(version.find("\"version\":1"), 11, "\"version\":9");
  EXPECT_THROW(dataset_from_jsonl(version), ParseError);
}
