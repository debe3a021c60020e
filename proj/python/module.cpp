#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "domino/equilibria.hpp"
#include "domino/error.hpp"
#include "domino/kramers.hpp"
#include "domino/model.hpp"
#include "domino/sde.hpp"
#include "domino/stats.hpp"

namespace py = pybind11;
using namespace domino;

namespace {

// Strong reference held for the life of the interpreter.
PyObject* error_type = nullptr;

Eigen::MatrixXd tau_matrix(const Ensemble& ens) {
  const auto rows = static_cast<Eigen::Index>(ens.samples.size());
  const auto cols = ens.samples.empty() ? 0 : static_cast<Eigen::Index>(ens.samples.front().record.n_nodes());
  Eigen::MatrixXd out(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& tau = ens.samples[static_cast<std::size_t>(r)].record.tau_node;
    for (Eigen::Index c = 0; c < cols; ++c) out(r, c) = tau[static_cast<std::size_t>(c)];
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_domino, m) {
  m.doc() = "Escape sequences of coupled bistable nodes";

  error_type = py::exception<Error>(m, "DominoError", PyExc_RuntimeError).release().ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object inst = py::handle(error_type)(e.what());
      inst.attr("kind") = to_string(e.kind());
      PyErr_SetObject(error_type, inst.ptr());
    }
  });

  py::class_<NodeParams>(m, "NodeParams")
      .def(py::init<double>(), py::arg("nu"))
      .def_property_readonly("nu", &NodeParams::nu)
      .def_property_readonly("x_quiescent", &NodeParams::x_quiescent)
      .def_property_readonly("x_saddle", &NodeParams::x_saddle)
      .def_property_readonly("x_active", &NodeParams::x_active);

  py::class_<Network>(m, "Network")
      .def(py::init<std::vector<std::vector<int>>, double, double>(), py::arg("in_neighbours"),
           py::arg("beta"), py::arg("alpha"))
      .def_static("pair", &Network::pair, py::arg("beta"), py::arg("alpha"))
      .def_static("chain", &Network::chain, py::arg("n_nodes"), py::arg("beta"), py::arg("alpha"))
      .def_property_readonly("n_nodes", &Network::n_nodes)
      .def_property_readonly("in_neighbours", &Network::in_neighbours)
      .def_property_readonly("beta", &Network::beta)
      .def_property_readonly("alpha", &Network::alpha)
      .def_property_readonly("symmetric", &Network::symmetric)
      .def("with_beta", &Network::with_beta)
      .def("with_alpha", &Network::with_alpha);

  m.def("drift", &drift, py::arg("x"), py::arg("params"), py::arg("net"));
  m.def("drift_jacobian", &drift_jacobian, py::arg("x"), py::arg("params"), py::arg("net"));
  m.def("coupled_potential", &coupled_potential, py::arg("x"), py::arg("params"), py::arg("net"));
  m.def("gradient", &gradient, py::arg("x"), py::arg("params"), py::arg("net"));
  m.def("hessian", &hessian, py::arg("x"), py::arg("params"), py::arg("net"));

  py::class_<SimulationConfig>(m, "SimulationConfig")
      .def(py::init<>())
      .def_readwrite("dt", &SimulationConfig::dt)
      .def_readwrite("t_max", &SimulationConfig::t_max)
      .def_readwrite("xi", &SimulationConfig::xi)
      .def_readwrite("master_seed", &SimulationConfig::master_seed)
      .def_readwrite("n_samples", &SimulationConfig::n_samples)
      .def_readwrite("noise_substeps", &SimulationConfig::noise_substeps)
      .def("validate", &SimulationConfig::validate);

  py::class_<EscapeRecord>(m, "EscapeRecord")
      .def_readonly("tau_node", &EscapeRecord::tau_node)
      .def_readonly("escaped", &EscapeRecord::escaped)
      .def_readonly("sequence", &EscapeRecord::sequence)
      .def_readonly("tau_ordered", &EscapeRecord::tau_ordered)
      .def_readonly("gaps", &EscapeRecord::gaps)
      .def_property_readonly("censored", &EscapeRecord::censored)
      .def("__eq__", [](const EscapeRecord& a, const EscapeRecord& b) { return a == b; });

  py::class_<Ensemble>(m, "Ensemble")
      .def_property_readonly("records", [](const Ensemble& e) { return records(e); })
      .def_property_readonly("tau", &tau_matrix)
      .def_readonly("n_censored", &Ensemble::n_censored)
      .def_readonly("n_faulted", &Ensemble::n_faulted)
      .def("__len__", [](const Ensemble& e) { return e.samples.size(); });

  m.def(
      "monte_carlo",
      [](const NodeParams& p, const Network& net, const SimulationConfig& cfg, unsigned threads) {
        py::gil_scoped_release release;
        return monte_carlo(p, net, cfg, threads);
      },
      py::arg("params"), py::arg("net"), py::arg("config"), py::arg("threads") = 0);

  py::class_<Moments>(m, "Moments")
      .def_readonly("n", &Moments::n)
      .def_readonly("mean", &Moments::mean)
      .def_readonly("stddev", &Moments::stddev)
      .def_readonly("cv", &Moments::cv);

  py::class_<SequenceRow>(m, "SequenceRow")
      .def_readonly("sequence", &SequenceRow::sequence)
      .def_readonly("count", &SequenceRow::count)
      .def_readonly("probability", &SequenceRow::probability)
      .def_readonly("gaps", &SequenceRow::gaps);

  py::class_<SequenceStats>(m, "SequenceStats")
      .def_readonly("n_samples", &SequenceStats::n_samples)
      .def_readonly("n_censored", &SequenceStats::n_censored)
      .def_readonly("censored_fraction", &SequenceStats::censored_fraction)
      .def_readonly("rows", &SequenceStats::rows)
      .def("row", [](const SequenceStats& s, const std::vector<int>& seq) { return s.row(seq); });

  m.def("sequence_table", [](const std::vector<EscapeRecord>& recs) { return sequence_table(recs); },
        py::arg("records"));
  m.def("format_sequence", [](const std::vector<int>& seq) { return format_sequence(seq); });

  py::class_<Equilibrium>(m, "Equilibrium")
      .def_readonly("x", &Equilibrium::x)
      .def_readonly("eigenvalues", &Equilibrium::eigenvalues)
      .def_property_readonly("kind", [](const Equilibrium& e) { return to_string(e.kind); })
      .def_readonly("unstable_dimension", &Equilibrium::unstable_dimension)
      .def_readonly("near_degenerate", &Equilibrium::near_degenerate);

  py::class_<Census>(m, "Census")
      .def_readonly("total", &Census::total)
      .def_readonly("split", &Census::split)
      .def_readonly("split_sinks", &Census::split_sinks);

  py::class_<RegimeBoundaries>(m, "RegimeBoundaries")
      .def_readonly("beta1", &RegimeBoundaries::beta1)
      .def_readonly("beta2", &RegimeBoundaries::beta2)
      .def_readonly("beta3", &RegimeBoundaries::beta3);

  m.def("equilibria_at", [](const NodeParams& p, const Network& net, double beta) {
    return equilibria_at(p, net, beta);
  }, py::arg("params"), py::arg("net"), py::arg("beta"));
  m.def("census", [](const std::vector<Equilibrium>& eqs) { return census(eqs); });
  m.def(
      "detect_boundaries",
      [](const NodeParams& p, const Network& net, double beta_min, double beta_max, std::size_t points) {
        return detect_boundaries(p, net, {beta_min, beta_max, points});
      },
      py::arg("params"), py::arg("net"), py::arg("beta_min") = 0.0, py::arg("beta_max") = 0.5,
      py::arg("points") = 501);
  m.def("saddle_node_root", &saddle_node_root, py::arg("params"), py::arg("corrected") = true);
  m.def("beta2_pitchfork", &beta2_pitchfork, py::arg("params"));

  py::class_<KramersEstimate>(m, "KramersEstimate")
      .def_readonly("well_label", &KramersEstimate::well_label)
      .def_readonly("gate_label", &KramersEstimate::gate_label)
      .def_readonly("barrier", &KramersEstimate::barrier)
      .def_readonly("prefactor", &KramersEstimate::prefactor)
      .def_readonly("T", &KramersEstimate::T)
      .def_readonly("gate_count", &KramersEstimate::gate_count)
      .def_property_readonly("T_adjusted", &KramersEstimate::adjusted);

  py::class_<RegimeEstimate>(m, "RegimeEstimate")
      .def_property_readonly("regime", [](const RegimeEstimate& r) { return to_string(r.regime); })
      .def_readonly("beta", &RegimeEstimate::beta)
      .def_readonly("alpha", &RegimeEstimate::alpha)
      .def_readonly("T20", &RegimeEstimate::T20)
      .def_readonly("legs", &RegimeEstimate::legs)
      .def_readonly("validity", &RegimeEstimate::validity);

  m.def("kramers_1d", &kramers_1d, py::arg("params"), py::arg("alpha"));
  m.def(
      "regime_T20",
      [](const std::string& regime, const NodeParams& p, double beta, double alpha) {
        return regime_T20(parse_regime(regime), p, beta, alpha);
      },
      py::arg("regime"), py::arg("params"), py::arg("beta"), py::arg("alpha"));
}
