#include "certiq/qcnn.hpp"

#include <stdexcept>

namespace certiq {

namespace {

// Pairs convolved by one repetition of a layer over `active`. The odd
// (ring-shifted) sublayer only exists above four active qubits; at four, the
// shifted pairs would just re-couple the same two blocks.
std::vector<std::pair<int, int>> conv_pairs(const std::vector<int>& active) {
  std::vector<std::pair<int, int>> pairs;
  const std::size_t m = active.size();
  for (std::size_t i = 0; i + 1 < m; i += 2) pairs.emplace_back(active[i], active[i + 1]);
  if (m > 4)
    for (std::size_t i = 1; i < m; i += 2)
      pairs.emplace_back(active[i], active[(i + 1) % m]);
  return pairs;
}

}  // namespace

std::vector<GateOp> one_qubit_block(int qubit, std::size_t param_base) {
  return {GateOp::single(GateKind::RZ, qubit, AngleSource::parameter(param_base)),
          GateOp::single(GateKind::RY, qubit, AngleSource::parameter(param_base + 1)),
          GateOp::single(GateKind::RZ, qubit, AngleSource::parameter(param_base + 2))};
}

std::vector<GateOp> two_qubit_block(int qubit_a, int qubit_b,
                                    std::size_t param_base) {
  if (qubit_a == qubit_b)
    throw std::invalid_argument("two_qubit_block needs distinct qubits");
  std::vector<GateOp> g;
  g.reserve(15);
  std::size_t p = param_base;
  auto local = [&](int q) {
    for (auto& op : one_qubit_block(q, p)) g.push_back(op);
    p += kOneQubitBlockParams;
  };
  local(qubit_a);
  local(qubit_b);
  for (GateKind k : {GateKind::RXX, GateKind::RYY, GateKind::RZZ})
    g.push_back(GateOp::pair(k, qubit_a, qubit_b, AngleSource::parameter(p++)));
  local(qubit_a);
  local(qubit_b);
  return g;
}

Qcnn build_qcnn(const QcnnSpec& spec) {
  if (spec.n_qubits < 4)
    throw std::invalid_argument("QCNN needs at least 4 qubits");
  if (spec.conv_reps < 1)
    throw std::invalid_argument("QCNN needs conv_reps >= 1");

  std::vector<GateOp> gates;
  std::size_t params = 0;
  std::vector<int> active(static_cast<std::size_t>(spec.n_qubits));
  for (int q = 0; q < spec.n_qubits; ++q) active[static_cast<std::size_t>(q)] = q;

  while (active.size() > 2) {
    for (int rep = 0; rep < spec.conv_reps; ++rep)
      for (auto [a, b] : conv_pairs(active)) {
        for (auto& op : two_qubit_block(a, b, params)) gates.push_back(op);
        params += kTwoQubitBlockParams;
      }
    std::vector<int> kept;
    for (std::size_t i = 0; i + 1 < active.size(); i += 2) {
      const int gone = active[i];
      const int keep = active[i + 1];
      gates.push_back(GateOp::pair(GateKind::CRZ, gone, keep, AngleSource::parameter(params++)));
      gates.push_back(GateOp::pair(GateKind::CRX, gone, keep, AngleSource::parameter(params++)));
      kept.push_back(keep);
    }
    if (active.size() % 2 == 1) kept.push_back(active.back());
    active = std::move(kept);
  }
  for (auto& op : two_qubit_block(active[0], active[1], params)) gates.push_back(op);
  params += kTwoQubitBlockParams;

  Qcnn out{ParamCircuit(spec.n_qubits, params), ClassReadout({active[0], active[1]})};
  out.circuit.append(gates);
  return out;
}

std::size_t qcnn_param_count(const QcnnSpec& spec) {
  std::size_t m = static_cast<std::size_t>(spec.n_qubits);
  std::size_t d = 0;
  const auto reps = static_cast<std::size_t>(spec.conv_reps);
  while (m > 2) {
    const std::size_t blocks = m / 2 + (m > 4 ? m / 2 : 0);
    d += reps * blocks * kTwoQubitBlockParams + (m / 2) * kPoolParams;
    m = (m + 1) / 2;
  }
  return d + kTwoQubitBlockParams;
}

}  // namespace certiq
