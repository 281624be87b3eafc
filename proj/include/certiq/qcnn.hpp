#pragma once

#include <vector>

#include "certiq/circuit.hpp"

namespace certiq {

struct QcnnSpec {
  int n_qubits = 4;
  int conv_reps = 1;
};

/// RZ, RY, RZ on `qubit` with parameters param_base .. param_base+2.
std::vector<GateOp> one_qubit_block(int qubit, std::size_t param_base);

/// Generic two-qubit block, 15 parameters: one_qubit_block on a and b,
/// then RXX, RYY, RZZ, then one_qubit_block on a and b again. All-zero
/// parameters give the identity.
std::vector<GateOp> two_qubit_block(int qubit_a, int qubit_b,
                                    std::size_t param_base);

inline constexpr std::size_t kOneQubitBlockParams = 3;
inline constexpr std::size_t kTwoQubitBlockParams = 15;
inline constexpr std::size_t kPoolParams = 2;

struct Qcnn {
  ParamCircuit circuit;
  ClassReadout readout;
};

/// Convolution layers of two-qubit blocks on neighbouring active qubits,
/// pooling by CRZ+CRX from each discarded qubit onto its kept partner, until
/// two qubits remain; those get a final block and a 4-class readout
/// (bits b1 b0 -> class 2*b1 + b0).
Qcnn build_qcnn(const QcnnSpec& spec);

/// Parameter count build_qcnn(spec) will produce, from the layer arithmetic.
std::size_t qcnn_param_count(const QcnnSpec& spec);

}  // namespace certiq
