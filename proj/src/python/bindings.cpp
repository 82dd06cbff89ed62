#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tsvflab/bell.hpp"
#include "tsvflab/cli.hpp"
#include "tsvflab/errors.hpp"
#include "tsvflab/experiments.hpp"
#include "tsvflab/hilbert.hpp"
#include "tsvflab/montecarlo.hpp"
#include "tsvflab/operators.hpp"
#include "tsvflab/state.hpp"
#include "tsvflab/two_state.hpp"

namespace py = pybind11;

namespace tsvf {
namespace {

void bind_errors(py::module_& m) {
  const auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<SpecError>(m, "SpecError", base.ptr());
  py::register_exception<EmptyEnsembleError>(m, "EmptyEnsembleError",
                                             base.ptr());
}

void bind_states(py::module_& m) {
  py::class_<StateVector>(m, "StateVector")
      .def(py::init<Eigen::VectorXcd, std::vector<std::string>>(),
           py::arg("amplitudes"),
           py::arg("labels") = std::vector<std::string>{})
      .def_static("basis", &StateVector::basis, py::arg("dim"),
                  py::arg("index"),
                  py::arg("labels") = std::vector<std::string>{})
      .def_property_readonly("amplitudes",
                             [](const StateVector& s) { return s.amplitudes(); })
      .def_property_readonly("labels", &StateVector::labels)
      .def_property_readonly("dim", &StateVector::dim)
      .def("label", &StateVector::label, py::arg("i"))
      .def("norm", &StateVector::norm)
      .def("normalized", &StateVector::normalized);

  py::class_<Operator>(m, "Operator")
      .def(py::init([](Eigen::MatrixXcd entries, std::string name) {
             return Operator(std::move(entries), {}, std::move(name));
           }),
           py::arg("entries"), py::arg("name") = "")
      .def_static("hermitian", &Operator::hermitian, py::arg("entries"),
                  py::arg("name") = "")
      .def_static("identity", &Operator::identity, py::arg("dim"))
      .def_static("zero", &Operator::zero, py::arg("dim"))
      .def_property_readonly("entries",
                             [](const Operator& a) { return a.entries(); })
      .def_property_readonly("name", &Operator::name)
      .def_property_readonly("dim", &Operator::dim)
      .def("is_hermitian", &Operator::is_hermitian, py::arg("tol"))
      .def("is_unitary", &Operator::is_unitary, py::arg("tol"))
      .def("is_projector", &Operator::is_projector, py::arg("tol"))
      .def("adjoint", &Operator::adjoint)
      .def("with_name", &Operator::with_name, py::arg("name"));

  m.def("inner_product", &inner_product, py::arg("a"), py::arg("b"));
  m.def("tensor",
        py::overload_cast<const StateVector&, const StateVector&>(&tensor),
        py::arg("a"), py::arg("b"));
  m.def("tensor", py::overload_cast<const Operator&, const Operator&>(&tensor),
        py::arg("a"), py::arg("b"));
  m.def("basis_projector", &basis_projector, py::arg("dim"),
        py::arg("indices"), py::arg("name") = "");
  m.def("evolve", &evolve, py::arg("hamiltonian"), py::arg("duration"),
        py::arg("v"));
  m.def("apply", &apply, py::arg("a"), py::arg("v"));
  m.def("exchange_operator", &exchange_operator, py::arg("dim"), py::arg("i"),
        py::arg("j"));
}

void bind_two_state(py::module_& m) {
  py::class_<TwoStateVector>(m, "TwoStateVector")
      .def(py::init<StateVector, StateVector, Operator, double, double>(),
           py::arg("pre"), py::arg("post"), py::arg("hamiltonian"),
           py::arg("t0"), py::arg("t_f"))
      .def_property_readonly("pre", &TwoStateVector::pre)
      .def_property_readonly("post", &TwoStateVector::post)
      .def_property_readonly("t0", &TwoStateVector::t0)
      .def_property_readonly("t_f", &TwoStateVector::t_f)
      .def("forward_state", &TwoStateVector::forward_state, py::arg("t"))
      .def("backward_state", &TwoStateVector::backward_state, py::arg("t"))
      .def("boundary_overlap", &TwoStateVector::boundary_overlap)
      .def("near_orthogonal", &TwoStateVector::near_orthogonal);

  py::class_<AblDistribution>(m, "AblDistribution")
      .def_readonly("outcome_labels", &AblDistribution::outcome_labels)
      .def_readonly("probabilities", &AblDistribution::probabilities);

  py::class_<IntermediateMeasurement>(m, "IntermediateMeasurement")
      .def(py::init([](std::vector<Operator> partition, std::size_t outcome,
                       double t) {
             return IntermediateMeasurement{std::move(partition), outcome, t};
           }),
           py::arg("partition"), py::arg("outcome"), py::arg("t"))
      .def_readonly("partition", &IntermediateMeasurement::partition)
      .def_readonly("outcome", &IntermediateMeasurement::outcome)
      .def_readonly("t", &IntermediateMeasurement::t);

  py::class_<PointerShift>(m, "PointerShift")
      .def_readonly("position_shift", &PointerShift::position_shift)
      .def_readonly("momentum_shift", &PointerShift::momentum_shift);

  m.def(
      "weak_value",
      [](const TwoStateVector& tsv, const Operator& a, double t) {
        return weak_value(tsv, a, t).value;
      },
      py::arg("tsv"), py::arg("a"), py::arg("t"),
      "Weak value of `a` at time t: <phi(t)|a|psi(t)> / <phi(t)|psi(t)>.");
  m.def(
      "abl_probabilities",
      [](const TwoStateVector& tsv, const std::vector<Operator>& partition,
         double t) { return abl_probabilities(tsv, partition, t); },
      py::arg("tsv"), py::arg("partition"), py::arg("t"),
      "Outcome distribution of a projective measurement between the "
      "selections.");
  m.def("postselection_probability", &postselection_probability,
        py::arg("tsv"),
        py::arg("intermediate") = std::optional<IntermediateMeasurement>{});
  m.def("strong_weak_correspondence", &strong_weak_correspondence,
        py::arg("tsv"), py::arg("p"), py::arg("t"));
  m.def("pointer_shift", &pointer_shift, py::arg("tsv"), py::arg("a"),
        py::arg("t"), py::arg("coupling"), py::arg("pointer_width"),
        py::arg("grid"),
        "Exact conditional Gaussian-pointer readings for a von Neumann "
        "coupling to `a` at time t.");
}

void bind_bell(py::module_& m) {
  py::class_<MeasurementSetting>(m, "MeasurementSetting")
      .def(py::init([](double theta, double phi) {
             return MeasurementSetting{theta, phi};
           }),
           py::arg("theta"), py::arg("phi"))
      .def_readonly("theta", &MeasurementSetting::theta)
      .def_readonly("phi", &MeasurementSetting::phi)
      .def("direction", &MeasurementSetting::direction);

  py::class_<ChshResult>(m, "ChshResult")
      .def_readonly("s", &ChshResult::s)
      .def_readonly("correlators", &ChshResult::correlators)
      .def_readonly("a", &ChshResult::a)
      .def_readonly("a_prime", &ChshResult::a_prime)
      .def_readonly("b", &ChshResult::b)
      .def_readonly("b_prime", &ChshResult::b_prime);

  m.def("phi_plus", &phi_plus);
  m.def("psi_plus", &psi_plus);
  m.def("excited_ground_superposition", &excited_ground_superposition,
        py::arg("beta"));
  m.def("observable", &observable, py::arg("setting"));
  m.def("correlator", &correlator, py::arg("state"), py::arg("a"),
        py::arg("b"));
  m.def("chsh", &chsh, py::arg("state"), py::arg("a"), py::arg("a_prime"),
        py::arg("b"), py::arg("b_prime"));
  m.def("optimize_chsh", &optimize_chsh, py::arg("state"),
        "Settings maximizing |S| for a two-qubit state, found by a grid "
        "scan refined with coordinate ascent.");
}

void bind_montecarlo(py::module_& m) {
  py::class_<EnsembleStats>(m, "EnsembleStats")
      .def_readonly("trials", &EnsembleStats::trials)
      .def_readonly("postselected_count", &EnsembleStats::postselected_count)
      .def_readonly("conditioning_count", &EnsembleStats::conditioning_count)
      .def_readonly("conditional_frequencies",
                    &EnsembleStats::conditional_frequencies)
      .def_readonly("standard_errors", &EnsembleStats::standard_errors)
      .def_readonly("seed", &EnsembleStats::seed);

  py::class_<SampledChsh>(m, "SampledChsh")
      .def_readonly("s", &SampledChsh::s)
      .def_readonly("std_error", &SampledChsh::std_error)
      .def_readonly("correlators", &SampledChsh::correlators)
      .def_readonly("correlator_errors", &SampledChsh::correlator_errors)
      .def_readonly("trials", &SampledChsh::trials)
      .def_readonly("seed", &SampledChsh::seed);

  m.def(
      "estimate_conditional",
      [](const TwoStateVector& tsv, const std::vector<Operator>& partition,
         double t, std::uint64_t trials, std::uint64_t seed,
         std::uint64_t stream) {
        return estimate_conditional(tsv, partition, t, trials, seed, stream);
      },
      py::arg("tsv"), py::arg("partition"), py::arg("t"), py::arg("trials"),
      py::arg("seed"), py::arg("stream") = 0,
      "Sampled counterpart of abl_probabilities.");
  m.def(
      "estimate_postselection_rate",
      [](const TwoStateVector& tsv, std::uint64_t trials, std::uint64_t seed,
         const std::optional<IntermediateMeasurement>& protocol,
         std::optional<std::size_t> conditioned_outcome,
         std::uint64_t stream) {
        std::optional<ConditionedOn> conditioned;
        if (conditioned_outcome.has_value()) {
          conditioned = ConditionedOn{*conditioned_outcome};
        }
        return estimate_postselection_rate(tsv, trials, seed, protocol,
                                           conditioned, stream);
      },
      py::arg("tsv"), py::arg("trials"), py::arg("seed"),
      py::arg("protocol") = std::optional<IntermediateMeasurement>{},
      py::arg("conditioned_outcome") = std::optional<std::size_t>{},
      py::arg("stream") = 0,
      "Sampled selection rate, optionally conditioned on one intermediate "
      "outcome.");
  m.def("sample_chsh", &sample_chsh, py::arg("state"), py::arg("a"),
        py::arg("a_prime"), py::arg("b"), py::arg("b_prime"),
        py::arg("trials"), py::arg("seed"), py::arg("stream_base") = 0);
  m.attr("GENERATOR_NAME") = kGeneratorName;
  m.attr("MIN_TRIALS") = kMinTrials;
}

void bind_cli(py::module_& m) {
  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out;
        std::ostringstream err;
        const int code = run_command(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"),
      "Run one command-line invocation (args exclude the program name); "
      "returns (exit_code, stdout, stderr).");
}

}  // namespace
}  // namespace tsvf

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Pre/post-selected quantum system calculator: two-state analyses, "
      "weak values, conditional probabilities, probe simulations, Bell "
      "tests, and seeded Monte Carlo estimators.";
  tsvf::bind_errors(m);
  tsvf::bind_states(m);
  tsvf::bind_two_state(m);
  tsvf::bind_bell(m);
  tsvf::bind_montecarlo(m);
  tsvf::bind_cli(m);
}
