#include "certiq/statevector.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace certiq {

namespace {
constexpr int kMaxQubits = 30;

void check_qubits(int n) {
  if (n < 1 || n > kMaxQubits)
    throw std::invalid_argument("qubit count must be in [1, 30], got " +
                                std::to_string(n));
}
}  // namespace

Statevector::Statevector(int n_qubits) : n_qubits_(n_qubits) {
  check_qubits(n_qubits);
  amps_.assign(std::size_t{1} << n_qubits, Complex{0.0, 0.0});
  amps_[0] = 1.0;
}

Statevector::Statevector(int n_qubits, std::vector<Complex> amplitudes)
    : n_qubits_(n_qubits), amps_(std::move(amplitudes)) {
  check_qubits(n_qubits);
  if (amps_.size() != (std::size_t{1} << n_qubits))
    throw std::invalid_argument("amplitude count " +
                                std::to_string(amps_.size()) +
                                " does not equal 2^" + std::to_string(n_qubits));
}

Statevector Statevector::basis(int n_qubits, std::uint64_t index) {
  Statevector s(n_qubits);
  if (index >= s.dim())
    throw std::invalid_argument("basis index out of range");
  s.amps_[0] = 0.0;
  s.amps_[index] = 1.0;
  return s;
}

Statevector Statevector::from_bits(std::string_view bits) {
  std::uint64_t index = 0;
  for (char c : bits) {
    if (c != '0' && c != '1')
      throw std::invalid_argument("bit string may only contain 0 and 1");
    index = (index << 1) | static_cast<std::uint64_t>(c == '1');
  }
  return basis(static_cast<int>(bits.size()), index);
}

double Statevector::norm() const {
  double s = 0.0;
  for (const auto& a : amps_) s += std::norm(a);
  return std::sqrt(s);
}

void Statevector::normalize() {
  const double n = norm();
  if (n == 0.0) throw std::domain_error("cannot normalize the zero vector");
  for (auto& a : amps_) a /= n;
}

Complex Statevector::inner(const Statevector& other) const {
  if (other.dim() != dim())
    throw std::invalid_argument("inner product of states of different size");
  Complex s{0.0, 0.0};
  for (std::size_t i = 0; i < amps_.size(); ++i)
    s += std::conj(amps_[i]) * other.amps_[i];
  return s;
}

}  // namespace certiq
