#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "certiq/statevector.hpp"

namespace certiq {

inline constexpr int kDefaultMaxHamiltonianQubits = 16;

struct ClusterParams {
  int n_qubits = 0;
  double j1 = 0.0;
  double j2 = 0.0;
  bool operator==(const ClusterParams&) const = default;
};

/// Real Pauli string with X on `x_mask` and Z on `z_mask` (disjoint masks),
/// scaled by `coef`.
struct PauliTerm {
  double coef = 0.0;
  std::uint64_t x_mask = 0;
  std::uint64_t z_mask = 0;
};

/// Sparse real-symmetric operator stored as a sum of X/Z Pauli strings.
class PauliSumOperator {
 public:
  PauliSumOperator(int n_qubits, std::vector<PauliTerm> terms);

  int n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return std::size_t{1} << n_qubits_; }
  const std::vector<PauliTerm>& terms() const { return terms_; }

  /// out = H * in
  void apply(const Eigen::VectorXd& in, Eigen::VectorXd& out) const;
  Eigen::VectorXd operator*(const Eigen::VectorXd& v) const;

  /// Dense matrix, for small registers only.
  Eigen::MatrixXd to_dense() const;

 private:
  int n_qubits_;
  std::vector<PauliTerm> terms_;
};

/// H = sum_j Z_j + j1 X_j X_{j+1} - j2 X_{j-1} Z_j X_{j+1} on a periodic chain.
PauliSumOperator build_hamiltonian(const ClusterParams& p,
                                   int max_qubits = kDefaultMaxHamiltonianQubits);

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GroundState {
  double energy = 0.0;
  Statevector state;
  double residual = 0.0;  // ||H v - E v||
};

struct LanczosOptions {
  std::size_t krylov_dim = 120;  // basis size per restart
  std::size_t max_restarts = 60;
  double tolerance = 1e-10;      // residual target
  std::uint64_t seed = 0x5eed;   // start vector
};

/// Lowest eigenpair by restarted Lanczos with full reorthogonalization. The
/// returned state has its largest-magnitude amplitude real and positive.
GroundState ground_state(const PauliSumOperator& h, const LanczosOptions& opts = {});

/// Rotates the global phase so the largest-magnitude amplitude (lowest index
/// on ties) is real positive.
void fix_global_phase(Statevector& s);

}  // namespace certiq
