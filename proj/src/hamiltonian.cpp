#include "certiq/hamiltonian.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "certiq/rng.hpp"

namespace certiq {

PauliSumOperator::PauliSumOperator(int n_qubits, std::vector<PauliTerm> terms)
    : n_qubits_(n_qubits), terms_(std::move(terms)) {
  for (const auto& t : terms_)
    if (t.x_mask & t.z_mask)
      throw std::invalid_argument("Pauli term with overlapping X and Z masks");
}

void PauliSumOperator::apply(const Eigen::VectorXd& in,
                             Eigen::VectorXd& out) const {
  const std::size_t d = dim();
  out.setZero(static_cast<Eigen::Index>(d));
  for (const auto& t : terms_) {
    for (std::size_t i = 0; i < d; ++i) {
      const double sign = (std::popcount(i & t.z_mask) & 1) ? -1.0 : 1.0;
      out[static_cast<Eigen::Index>(i)] +=
          t.coef * sign * in[static_cast<Eigen::Index>(i ^ t.x_mask)];
    }
  }
}

Eigen::VectorXd PauliSumOperator::operator*(const Eigen::VectorXd& v) const {
  Eigen::VectorXd out;
  apply(v, out);
  return out;
}

Eigen::MatrixXd PauliSumOperator::to_dense() const {
  const auto d = static_cast<Eigen::Index>(dim());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
  for (const auto& t : terms_)
    for (Eigen::Index i = 0; i < d; ++i) {
      const auto ui = static_cast<std::uint64_t>(i);
      const double sign = (std::popcount(ui & t.z_mask) & 1) ? -1.0 : 1.0;
      m(i, static_cast<Eigen::Index>(ui ^ t.x_mask)) += t.coef * sign;
    }
  return m;
}

PauliSumOperator build_hamiltonian(const ClusterParams& p, int max_qubits) {
  const int n = p.n_qubits;
  if (n < 3)
    throw std::invalid_argument("cluster Hamiltonian needs n >= 3, got " +
                                std::to_string(n));
  if (n > max_qubits)
    throw std::invalid_argument("n = " + std::to_string(n) +
                                " exceeds the configured maximum of " +
                                std::to_string(max_qubits) + " qubits");
  auto bit = [n](int q) {
    return std::uint64_t{1} << (n - 1 - ((q % n + n) % n));
  };
  std::vector<PauliTerm> terms;
  terms.reserve(3 * static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    terms.push_back({1.0, 0, bit(j)});
    if (p.j1 != 0.0) terms.push_back({p.j1, bit(j) | bit(j + 1), 0});
    if (p.j2 != 0.0) terms.push_back({-p.j2, bit(j - 1) | bit(j + 1), bit(j)});
  }
  return PauliSumOperator(n, std::move(terms));
}

void fix_global_phase(Statevector& s) {
  auto amps = s.amplitudes();
  std::size_t best = 0;
  for (std::size_t i = 1; i < amps.size(); ++i)
    if (std::abs(amps[i]) > std::abs(amps[best])) best = i;
  const double mag = std::abs(amps[best]);
  if (mag == 0.0) return;
  const Complex rot = std::conj(amps[best]) / mag;
  for (auto& a : amps) a *= rot;
  amps[best] = mag;
}

GroundState ground_state(const PauliSumOperator& h, const LanczosOptions& opts) {
  using Eigen::Index;
  const auto d = static_cast<Index>(h.dim());
  const Index m_max = std::min<Index>(d, static_cast<Index>(opts.krylov_dim));

  RngStream rng(opts.seed);
  Eigen::VectorXd start(d);
  for (Index i = 0; i < d; ++i) start[i] = rng.normal();
  start.normalize();

  Eigen::MatrixXd basis(d, m_max);
  Eigen::VectorXd w(d), hx(d);
  double best_residual = INFINITY;

  for (std::size_t restart = 0; restart <= opts.max_restarts; ++restart) {
    std::vector<double> alpha, beta;
    basis.col(0) = start;
    Index m = 0;
    for (Index k = 0; k < m_max; ++k) {
      h.apply(basis.col(k), w);
      alpha.push_back(basis.col(k).dot(w));
      // two passes of classical Gram-Schmidt against the whole basis
      for (int pass = 0; pass < 2; ++pass) {
        const Eigen::VectorXd coeffs = basis.leftCols(k + 1).transpose() * w;
        w -= basis.leftCols(k + 1) * coeffs;
      }
      m = k + 1;
      const double b = w.norm();
      if (k + 1 == m_max || b < 1e-12) break;
      beta.push_back(b);
      basis.col(k + 1) = w / b;
    }

    Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
    Eigen::VectorXd sub(std::max<Index>(m - 1, 0));
    for (Index i = 0; i + 1 < m; ++i) sub[i] = beta[static_cast<std::size_t>(i)];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (tri.info() != Eigen::Success)
      throw ConvergenceError("tridiagonal eigensolve failed");

    const double theta = tri.eigenvalues()[0];
    Eigen::VectorXd x = basis.leftCols(m) * tri.eigenvectors().col(0);
    x.normalize();
    h.apply(x, hx);
    const double residual = (hx - theta * x).norm();
    best_residual = std::min(best_residual, residual);

    if (residual < opts.tolerance) {
      std::vector<Complex> amps(static_cast<std::size_t>(d));
      for (Index i = 0; i < d; ++i) amps[static_cast<std::size_t>(i)] = x[i];
      GroundState gs{x.dot(hx), Statevector(h.n_qubits(), std::move(amps)),
                     residual};
      fix_global_phase(gs.state);
      return gs;
    }
    start = x;
  }
  throw ConvergenceError("Lanczos did not reach residual " +
                         std::to_string(opts.tolerance) + " (best " +
                         std::to_string(best_residual) + ")");
}

}  // namespace certiq
