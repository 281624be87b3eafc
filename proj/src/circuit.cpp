#include "certiq/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "certiq/hash.hpp"
#include "json.hpp"

namespace certiq {

namespace {

constexpr std::array<std::string_view, 12> kGateNames = {
    "RX", "RY", "RZ", "RXX", "RYY", "RZZ", "CX", "CRX", "CRY", "CRZ", "H", "X"};

using Mat2 = std::array<Complex, 4>;  // row-major

Mat2 single_qubit_matrix(GateKind kind, double angle) {
  const double c = std::cos(angle / 2);
  const double s = std::sin(angle / 2);
  const Complex i{0.0, 1.0};
  switch (kind) {
    case GateKind::RX:
    case GateKind::CRX:
      return {c, -i * s, -i * s, c};
    case GateKind::RY:
    case GateKind::CRY:
      return {c, -s, s, c};
    case GateKind::RZ:
    case GateKind::CRZ:
      return {std::exp(-i * (angle / 2)), 0.0, 0.0, std::exp(i * (angle / 2))};
    case GateKind::H: {
      const double r = 1.0 / std::sqrt(2.0);
      return {r, r, r, -r};
    }
    case GateKind::X:
    case GateKind::CX:
      return {0.0, 1.0, 1.0, 0.0};
    default:
      throw std::logic_error("not a single-qubit gate");
  }
}

// Applies `m` to the qubit selected by `target` on every basis pair whose
// `control` bits are all set.
void apply_mat2(std::span<Complex> amps, std::uint64_t target,
                std::uint64_t control, const Mat2& m) {
  const std::size_t dim = amps.size();
  for (std::size_t i = 0; i < dim; ++i) {
    if ((i & target) || (i & control) != control) continue;
    const std::size_t j = i | target;
    const Complex a0 = amps[i];
    const Complex a1 = amps[j];
    amps[i] = m[0] * a0 + m[1] * a1;
    amps[j] = m[2] * a0 + m[3] * a1;
  }
}

void check_qubit(int q, int n) {
  if (q < 0 || q >= n)
    throw std::out_of_range("qubit index " + std::to_string(q) +
                            " out of range for " + std::to_string(n) +
                            " qubits");
}

void validate_gate(const GateOp& g, int n) {
  check_qubit(g.qubits[0], n);
  if (g.arity() == 2) {
    check_qubit(g.qubits[1], n);
    if (g.qubits[0] == g.qubits[1])
      throw std::invalid_argument("two-qubit gate on a repeated qubit");
  }
}

}  // namespace

std::string_view gate_name(GateKind kind) {
  return kGateNames[static_cast<std::size_t>(kind)];
}

GateKind gate_from_name(std::string_view name) {
  for (std::size_t k = 0; k < kGateNames.size(); ++k)
    if (kGateNames[k] == name) return static_cast<GateKind>(k);
  throw std::invalid_argument("unknown gate kind '" + std::string(name) + "'");
}

int gate_arity(GateKind kind) {
  switch (kind) {
    case GateKind::RX:
    case GateKind::RY:
    case GateKind::RZ:
    case GateKind::H:
    case GateKind::X:
      return 1;
    default:
      return 2;
  }
}

bool gate_is_rotation(GateKind kind) {
  return kind != GateKind::CX && kind != GateKind::H && kind != GateKind::X;
}

double AngleSource::resolve(std::span<const double> params) const {
  if (!param) return fixed;
  if (*param >= params.size())
    throw std::out_of_range("parameter index " + std::to_string(*param) +
                            " out of range for " +
                            std::to_string(params.size()) + " parameters");
  return params[*param];
}

GateOp GateOp::single(GateKind kind, int q, AngleSource a) {
  if (gate_arity(kind) != 1)
    throw std::invalid_argument("gate kind needs two qubits");
  if (!gate_is_rotation(kind)) a = {};
  return {kind, {q, -1}, a};
}

GateOp GateOp::pair(GateKind kind, int a, int b, AngleSource angle) {
  if (gate_arity(kind) != 2)
    throw std::invalid_argument("gate kind acts on one qubit");
  if (!gate_is_rotation(kind)) angle = {};
  return {kind, {a, b}, angle};
}

ParamCircuit::ParamCircuit(int n_qubits, std::size_t param_count)
    : n_qubits_(n_qubits), param_count_(param_count) {
  if (n_qubits < 1) throw std::invalid_argument("circuit needs >= 1 qubit");
}

void ParamCircuit::add(const GateOp& gate) {
  validate_gate(gate, n_qubits_);
  if (gate.angle.param && *gate.angle.param >= param_count_)
    throw std::out_of_range("parameter index " +
                            std::to_string(*gate.angle.param) +
                            " >= circuit parameter count " +
                            std::to_string(param_count_));
  gates_.push_back(gate);
}

void ParamCircuit::append(std::span<const GateOp> gates) {
  for (const auto& g : gates) add(g);
}

void ParamCircuit::set_param_count(std::size_t d) {
  if (d < param_count_)
    throw std::invalid_argument("parameter count may only grow");
  param_count_ = d;
}

ClassReadout::ClassReadout(std::vector<int> qubits)
    : qubits_(std::move(qubits)),
      class_count_(std::size_t{1} << qubits_.size()) {
  mapping_.resize(class_count_);
  for (std::size_t p = 0; p < class_count_; ++p) mapping_[p] = p;
}

ClassReadout::ClassReadout(std::vector<int> qubits, std::size_t class_count,
                           std::vector<std::size_t> mapping)
    : qubits_(std::move(qubits)),
      class_count_(class_count),
      mapping_(std::move(mapping)) {
  if (mapping_.size() != (std::size_t{1} << qubits_.size()))
    throw std::invalid_argument("readout mapping needs one entry per pattern");
  for (auto c : mapping_)
    if (c >= class_count_)
      throw std::invalid_argument("readout mapping names an unknown class");
}

void apply_gate_inplace(Statevector& state, const GateOp& gate,
                        std::span<const double> params) {
  const int n = state.n_qubits();
  validate_gate(gate, n);
  const double angle =
      gate_is_rotation(gate.kind) ? gate.angle.resolve(params) : 0.0;
  auto amps = state.amplitudes();

  switch (gate.kind) {
    case GateKind::RX:
    case GateKind::RY:
    case GateKind::RZ:
    case GateKind::H:
    case GateKind::X:
      apply_mat2(amps, state.mask(gate.qubits[0]), 0,
                 single_qubit_matrix(gate.kind, angle));
      return;
    case GateKind::CX:
    case GateKind::CRX:
    case GateKind::CRY:
    case GateKind::CRZ:
      apply_mat2(amps, state.mask(gate.qubits[1]), state.mask(gate.qubits[0]),
                 single_qubit_matrix(gate.kind, angle));
      return;
    case GateKind::RXX:
    case GateKind::RYY:
    case GateKind::RZZ:
      break;
  }

  const std::uint64_t ma = state.mask(gate.qubits[0]);
  const std::uint64_t mb = state.mask(gate.qubits[1]);
  const std::uint64_t both = ma | mb;
  const double c = std::cos(angle / 2);
  const double s = std::sin(angle / 2);
  const Complex minus_is{0.0, -s};

  if (gate.kind == GateKind::RZZ) {
    const Complex same = std::polar(1.0, -angle / 2);
    const Complex diff = std::polar(1.0, angle / 2);
    for (std::size_t i = 0; i < amps.size(); ++i) {
      const bool equal = ((i & ma) != 0) == ((i & mb) != 0);
      amps[i] *= equal ? same : diff;
    }
    return;
  }

  // exp(-i a/2 P(x)P) = cos(a/2) I - i sin(a/2) P(x)P, where P(x)P flips both
  // bits; YY additionally picks up -1 when the two bits are equal.
  const bool yy = gate.kind == GateKind::RYY;
  for (std::size_t i = 0; i < amps.size(); ++i) {
    if (i & ma) continue;  // visit each {i, i^both} orbit once via bit a = 0
    const std::size_t j = i ^ both;
    const double sign_i = (yy && !(i & mb)) ? -1.0 : 1.0;
    const double sign_j = (yy && (j & mb)) ? -1.0 : 1.0;
    const Complex ai = amps[i];
    const Complex aj = amps[j];
    amps[i] = c * ai + minus_is * sign_i * aj;
    amps[j] = c * aj + minus_is * sign_j * ai;
  }
}

Statevector apply_gate(const Statevector& state, const GateOp& gate,
                       std::span<const double> params) {
  Statevector out = state;
  apply_gate_inplace(out, gate, params);
  return out;
}

Statevector run_circuit(const Statevector& state0, const ParamCircuit& circuit,
                        std::span<const double> theta) {
  if (theta.size() != circuit.param_count())
    throw std::invalid_argument("theta has " + std::to_string(theta.size()) +
                                " entries, circuit expects " +
                                std::to_string(circuit.param_count()));
  if (state0.n_qubits() != circuit.n_qubits())
    throw std::invalid_argument("state and circuit qubit counts differ");
  Statevector s = state0;
  for (const auto& g : circuit.gates()) apply_gate_inplace(s, g, theta);
  return s;
}

std::vector<double> class_probabilities(const Statevector& state,
                                        const ClassReadout& readout) {
  for (int q : readout.qubits()) check_qubit(q, state.n_qubits());
  std::vector<std::uint64_t> masks;
  masks.reserve(readout.qubits().size());
  for (int q : readout.qubits()) masks.push_back(state.mask(q));

  std::vector<double> probs(readout.class_count(), 0.0);
  const auto amps = state.amplitudes();
  const auto& mapping = readout.mapping();
  for (std::size_t i = 0; i < amps.size(); ++i) {
    std::size_t pattern = 0;
    for (auto m : masks) pattern = (pattern << 1) | ((i & m) ? 1u : 0u);
    probs[mapping[pattern]] += std::norm(amps[i]);
  }
  return probs;
}

std::vector<double> classifier_eval(const ParamCircuit& circuit,
                                    const ClassReadout& readout,
                                    const Statevector& x_state,
                                    std::span<const double> theta) {
  return class_probabilities(run_circuit(x_state, circuit, theta), readout);
}

std::size_t argmax(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("argmax of empty vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

std::string circuit_to_json(const ParamCircuit& circuit) {
  nlohmann::json gates = nlohmann::json::array();
  for (const auto& g : circuit.gates()) {
    nlohmann::json j;
    j["kind"] = gate_name(g.kind);
    j["qubits"] = g.arity() == 1 ? nlohmann::json::array({g.qubits[0]})
                                 : nlohmann::json::array({g.qubits[0], g.qubits[1]});
    if (gate_is_rotation(g.kind)) {
      if (g.angle.param)
        j["param"] = *g.angle.param;
      else
        j["angle"] = g.angle.fixed;
    }
    gates.push_back(std::move(j));
  }
  nlohmann::json doc;
  doc["n_qubits"] = circuit.n_qubits();
  doc["param_count"] = circuit.param_count();
  doc["gates"] = std::move(gates);
  return doc.dump();
}

ParamCircuit circuit_from_json(std::string_view text) {
  const auto doc = nlohmann::json::parse(text);
  ParamCircuit c(doc.at("n_qubits").get<int>(),
                 doc.at("param_count").get<std::size_t>());
  for (const auto& j : doc.at("gates")) {
    const GateKind kind = gate_from_name(j.at("kind").get<std::string>());
    const auto& qs = j.at("qubits");
    if (qs.size() != static_cast<std::size_t>(gate_arity(kind)))
      throw std::invalid_argument("gate qubit list has the wrong length");
    AngleSource a;
    if (j.contains("param"))
      a = AngleSource::parameter(j["param"].get<std::size_t>());
    else if (j.contains("angle"))
      a = AngleSource::constant(j["angle"].get<double>());
    c.add(gate_arity(kind) == 1
              ? GateOp::single(kind, qs[0].get<int>(), a)
              : GateOp::pair(kind, qs[0].get<int>(), qs[1].get<int>(), a));
  }
  return c;
}

std::uint64_t circuit_hash(const ParamCircuit& circuit) {
  return fnv1a64(circuit_to_json(circuit));
}

}  // namespace certiq
