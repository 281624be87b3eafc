#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "certiq/dataset.hpp"
#include "certiq/experiments.hpp"
#include "certiq/hamiltonian.hpp"
#include "certiq/phase_diagram.hpp"
#include "certiq/qcnn.hpp"
#include "certiq/smoothing.hpp"
#include "certiq/snes.hpp"
#include "certiq/stats.hpp"

namespace py = pybind11;
using namespace certiq;

namespace {

using ComplexArray = py::array_t<Complex, py::array::c_style | py::array::forcecast>;

Statevector state_from(const ComplexArray& amps) {
  const auto n = static_cast<std::size_t>(amps.size());
  int q = 0;
  while ((std::size_t{1} << q) < n) ++q;
  if ((std::size_t{1} << q) != n) throw std::invalid_argument("amplitude count must be a power of two");
  return Statevector(q, std::vector<Complex>(amps.data(), amps.data() + n));
}

ComplexArray to_array(const Statevector& s) {
  ComplexArray out(static_cast<py::ssize_t>(s.dim()));
  std::copy(s.amplitudes().begin(), s.amplitudes().end(), out.mutable_data());
  return out;
}

py::list samples_to_list(const Dataset& d) {
  py::list out;
  for (const auto& s : d.samples) {
    py::dict row;
    row["j1"] = s.params.j1;
    row["j2"] = s.params.j2;
    row["label"] = s.label;
    row["energy"] = s.energy;
    row["state"] = to_array(s.state);
    out.append(row);
  }
  return out;
}

std::vector<Sample> samples_from(const py::list& rows, int n_qubits) {
  std::vector<Sample> out;
  for (const auto& item : rows) {
    const auto row = item.cast<py::dict>();
    Sample s;
    s.params = {n_qubits, row["j1"].cast<double>(), row["j2"].cast<double>()};
    s.label = row["label"].cast<int>();
    s.state = state_from(row["state"].cast<ComplexArray>());
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "certiq native core";

  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_ArithmeticError);

  py::class_<Qcnn>(m, "Qcnn")
      .def_property_readonly("n_qubits", [](const Qcnn& q) { return q.circuit.n_qubits(); })
      .def_property_readonly("param_count", [](const Qcnn& q) { return q.circuit.param_count(); })
      .def_property_readonly("readout_qubits", [](const Qcnn& q) { return q.readout.qubits(); })
      .def_property_readonly("class_count", [](const Qcnn& q) { return q.readout.class_count(); });

  m.def("build_qcnn", [](int n_qubits, int conv_reps) { return build_qcnn({n_qubits, conv_reps}); },
        py::arg("n_qubits"), py::arg("conv_reps") = 1);

  m.def("classifier_eval",
        [](const Qcnn& q, const ComplexArray& state, const std::vector<double>& theta) {
          return classifier_eval(q.circuit, q.readout, state_from(state), theta);
        },
        py::arg("qcnn"), py::arg("state"), py::arg("theta"));

  m.def("ground_state",
        [](int n_qubits, double j1, double j2) {
          const auto g = ground_state(build_hamiltonian({n_qubits, j1, j2}));
          return py::make_tuple(g.energy, to_array(g.state), g.residual);
        },
        py::arg("n_qubits"), py::arg("j1"), py::arg("j2"));

  m.def("phase_label", [](double j1, double j2) { return phase_label(j1, j2, default_phase_spec()); },
        py::arg("j1"), py::arg("j2"));

  m.def("gen_split",
        [](int n_qubits, std::uint64_t seed, std::size_t n_train, std::size_t n_test) {
          const auto s = gen_split(n_qubits, seed, default_phase_spec(), n_train, n_test);
          return py::make_tuple(samples_to_list(s.train), samples_to_list(s.test));
        },
        py::arg("n_qubits"), py::arg("seed"), py::arg("n_train") = 50, py::arg("n_test") = 50);

  m.def("train",
        [](const Qcnn& q, const py::list& data, std::uint64_t seed, std::size_t iterations,
           bool plain) {
          SnesConfig c;
          c.seed = seed;
          c.iterations = iterations;
          if (plain) c = plain_baseline_config(c);
          const auto samples = samples_from(data, q.circuit.n_qubits());
          TrainResult r;
          {
            py::gil_scoped_release release;
            r = train(q.circuit, q.readout, samples, c);
          }
          return py::make_tuple(r.model.theta, r.model.sigma);
        },
        py::arg("qcnn"), py::arg("data"), py::arg("seed") = 0, py::arg("iterations") = 1500,
        py::arg("plain") = false);

  py::class_<CertificationResult>(m, "CertifyResult")
      .def_readonly("predicted_class", &CertificationResult::predicted_class)
      .def_readonly("pA_lower", &CertificationResult::pA_lower)
      .def_readonly("pB_upper", &CertificationResult::pB_upper)
      .def_readonly("s_e", &CertificationResult::s_e)
      .def_readonly("semi_axes", &CertificationResult::semi_axes)
      .def_property_readonly("abstained", &CertificationResult::abstained);

  m.def("certify",
        [](const Qcnn& q, const std::vector<double>& theta, const std::vector<double>& sigma,
           const ComplexArray& state, std::uint64_t seed, std::uint64_t n0, std::uint64_t n,
           double alpha) {
          SmoothedModel model{theta, sigma};
          CertifyOptions o;
          o.n0 = n0;
          o.n = n;
          o.alpha = alpha;
          return certify(model, state_from(state), q.circuit, q.readout, o, RngStream(seed));
        },
        py::arg("qcnn"), py::arg("theta"), py::arg("sigma"), py::arg("state"),
        py::arg("seed") = 0, py::arg("n0") = 100, py::arg("n") = 1000, py::arg("alpha") = 0.01);

  m.def("certified_radius", &certified_radius, py::arg("pA_lower"), py::arg("pB_upper"));
  m.def("certified_volume",
        [](const std::vector<double>& sigma, double s_e) { return certified_volume(sigma, s_e); },
        py::arg("sigma"), py::arg("s_e"));
  m.def("clopper_pearson_lower", &clopper_pearson_lower, py::arg("k"), py::arg("n"), py::arg("alpha"));
  m.def("clopper_pearson_upper", &clopper_pearson_upper, py::arg("k"), py::arg("n"), py::arg("alpha"));
  m.def("rank_utilities", &rank_utilities, py::arg("lam"));
}
