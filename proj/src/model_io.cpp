#include "certiq/model_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "certiq/hash.hpp"
#include "json.hpp"

namespace certiq {

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write " + path);
  out << text;
}

std::string ModelFile::to_json() const {
  nlohmann::json j{{"kind", kind},
                   {"qcnn", {{"n_qubits", qcnn.n_qubits}, {"conv_reps", qcnn.conv_reps}}},
                   {"theta", model.theta},
                   {"sigma", model.sigma},
                   {"circuit_hash", hex64(circuit_hash)},
                   {"config", nlohmann::json::parse(config.to_json())},
                   {"seed", config.seed}};
  return j.dump(1) + "\n";
}

ModelFile ModelFile::from_json(std::string_view text) {
  const auto j = nlohmann::json::parse(text);
  ModelFile m;
  m.kind = j.value("kind", std::string("smoothed"));
  m.qcnn.n_qubits = j.at("qcnn").at("n_qubits").get<int>();
  m.qcnn.conv_reps = j.at("qcnn").at("conv_reps").get<int>();
  m.model.theta = j.at("theta").get<std::vector<double>>();
  m.model.sigma = j.at("sigma").get<std::vector<double>>();
  m.circuit_hash = std::stoull(j.at("circuit_hash").get<std::string>(), nullptr, 16);
  m.config = SnesConfig::from_json(j.at("config").dump());
  m.model.validate();
  return m;
}

void ModelFile::save(const std::string& path) const { write_text_file(path, to_json()); }

ModelFile ModelFile::load(const std::string& path) { return from_json(read_text_file(path)); }

Qcnn ModelFile::rebuild() const {
  Qcnn q = build_qcnn(qcnn);
  if (certiq::circuit_hash(q.circuit) != circuit_hash)
    throw std::invalid_argument("model circuit hash does not match the rebuilt QCNN");
  if (q.circuit.param_count() != model.dim())
    throw std::invalid_argument("model parameter count does not match the QCNN");
  return q;
}

}  // namespace certiq
