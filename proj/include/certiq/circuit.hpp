#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "certiq/statevector.hpp"

namespace certiq {

// Rotation convention: R_P(theta) = exp(-i theta/2 P) for P in {X, Y, Z} and
// R_PP(theta) = exp(-i theta/2 P (x) P). Certified radii are expressed in
// these half-angle units.
enum class GateKind { RX, RY, RZ, RXX, RYY, RZZ, CX, CRX, CRY, CRZ, H, X };

std::string_view gate_name(GateKind kind);
GateKind gate_from_name(std::string_view name);

int gate_arity(GateKind kind);
bool gate_is_rotation(GateKind kind);

/// Where a rotation gate takes its angle from.
struct AngleSource {
  std::optional<std::size_t> param;  // index into theta
  double fixed = 0.0;                // used when `param` is empty

  static AngleSource parameter(std::size_t index) { return {index, 0.0}; }
  static AngleSource constant(double radians) { return {std::nullopt, radians}; }

  double resolve(std::span<const double> params) const;

  friend bool operator==(const AngleSource&, const AngleSource&) = default;
};

/// One gate. For controlled gates qubits[0] is the control.
struct GateOp {
  GateKind kind = GateKind::X;
  std::array<int, 2> qubits{0, -1};
  AngleSource angle{};

  static GateOp single(GateKind kind, int q, AngleSource a = {});
  static GateOp pair(GateKind kind, int a, int b, AngleSource angle = {});

  int arity() const { return gate_arity(kind); }

  friend bool operator==(const GateOp&, const GateOp&) = default;
};

/// Ordered gate list over a fixed register with `param_count` parameter slots.
class ParamCircuit {
 public:
  ParamCircuit() = default;
  ParamCircuit(int n_qubits, std::size_t param_count);

  int n_qubits() const { return n_qubits_; }
  std::size_t param_count() const { return param_count_; }
  const std::vector<GateOp>& gates() const { return gates_; }

  /// Appends after validating qubit and parameter indices.
  void add(const GateOp& gate);
  void append(std::span<const GateOp> gates);

  /// Grows the parameter count; existing indices stay valid.
  void set_param_count(std::size_t d);

  friend bool operator==(const ParamCircuit&, const ParamCircuit&) = default;

 private:
  int n_qubits_ = 0;
  std::size_t param_count_ = 0;
  std::vector<GateOp> gates_;
};

/// Computational-basis projectors on a set of readout qubits. The readout bit
/// pattern (first readout qubit most significant) indexes `mapping`.
class ClassReadout {
 public:
  ClassReadout() = default;

  /// Pattern p maps to class p; class_count = 2^|qubits|.
  explicit ClassReadout(std::vector<int> qubits);
  ClassReadout(std::vector<int> qubits, std::size_t class_count,
               std::vector<std::size_t> mapping);

  const std::vector<int>& qubits() const { return qubits_; }
  std::size_t class_count() const { return class_count_; }
  const std::vector<std::size_t>& mapping() const { return mapping_; }

  friend bool operator==(const ClassReadout&, const ClassReadout&) = default;

 private:
  std::vector<int> qubits_;
  std::size_t class_count_ = 0;
  std::vector<std::size_t> mapping_;
};

void apply_gate_inplace(Statevector& state, const GateOp& gate,
                        std::span<const double> params);

Statevector apply_gate(const Statevector& state, const GateOp& gate,
                       std::span<const double> params);

Statevector run_circuit(const Statevector& state0, const ParamCircuit& circuit,
                        std::span<const double> theta);

std::vector<double> class_probabilities(const Statevector& state,
                                        const ClassReadout& readout);

/// C(theta, x): class probabilities of the circuit applied to `x_state`.
std::vector<double> classifier_eval(const ParamCircuit& circuit,
                                    const ClassReadout& readout,
                                    const Statevector& x_state,
                                    std::span<const double> theta);

/// Index of the largest entry; ties go to the lowest index.
std::size_t argmax(std::span<const double> values);

/// JSON export of the gate list (kinds, qubits, parameter indices).
std::string circuit_to_json(const ParamCircuit& circuit);
ParamCircuit circuit_from_json(std::string_view text);

/// 64-bit FNV-1a of the circuit JSON export.
std::uint64_t circuit_hash(const ParamCircuit& circuit);

}  // namespace certiq
