#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace certiq {

using Complex = std::complex<double>;

/// Pure n-qubit state. Qubit 0 is the most significant bit of the basis
/// index, so |q0 q1 ... q_{n-1}> reads as a binary number.
class Statevector {
 public:
  Statevector() = default;

  /// |0...0> on `n_qubits` qubits.
  explicit Statevector(int n_qubits);

  /// Takes ownership of `amplitudes`; length must be a power of two.
  /// The state is not renormalized.
  Statevector(int n_qubits, std::vector<Complex> amplitudes);

  /// Computational basis state |index>.
  static Statevector basis(int n_qubits, std::uint64_t index);

  /// Basis state from a bit string such as "1100" (qubit 0 first).
  static Statevector from_bits(std::string_view bits);

  int n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return amps_.size(); }

  std::span<const Complex> amplitudes() const { return amps_; }
  std::span<Complex> amplitudes() { return amps_; }

  const Complex& operator[](std::size_t i) const { return amps_[i]; }
  Complex& operator[](std::size_t i) { return amps_[i]; }

  double norm() const;
  void normalize();

  /// <this|other>
  Complex inner(const Statevector& other) const;

  /// Bit mask selecting qubit `q` in a basis index.
  std::uint64_t mask(int q) const {
    return std::uint64_t{1} << (n_qubits_ - 1 - q);
  }

  friend bool operator==(const Statevector&, const Statevector&) = default;

 private:
  int n_qubits_ = 0;
  std::vector<Complex> amps_;
};

}  // namespace certiq
