// Python bindings for the main operations: state preparation, Pauli algebra,
// the detection protocols, noise sweeps and the Hubbard gate extraction.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "entlat/cli_commands.hpp"
#include "entlat/detect.hpp"
#include "entlat/estimator.hpp"
#include "entlat/hubbard.hpp"
#include "entlat/noise.hpp"
#include "entlat/pauli.hpp"
#include "entlat/protocol.hpp"
#include "entlat/qstate.hpp"

namespace py = pybind11;
using namespace entlat;

namespace {

PureState make_pure(const Vector& amplitudes) {
  const auto dim = amplitudes.size();
  int n = 0;
  while ((std::int64_t{1} << n) < dim) ++n;
  return PureState(n, amplitudes);
}

MixedState make_mixed(const Matrix& rho) {
  const auto dim = rho.rows();
  int n = 0;
  while ((std::int64_t{1} << n) < dim) ++n;
  return MixedState(n, rho);
}

}  // namespace

PYBIND11_MODULE(pyentlat, m) {
  m.doc() = "sqrt(SWAP)^dag chain entanglement generation and verification";
  m.attr("__version__") = kVersion;
  m.attr("GME_FIDELITY_BOUND") = kGmeFidelityBound;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<InvariantError>(m, "InvariantError", PyExc_RuntimeError);

  // states and protocol
  m.def("neel_state", [](int n) { return neel_state(n).amplitudes(); }, py::arg("n"));
  m.def("target_state", [](int n) { return target_state(n).amplitudes(); }, py::arg("n"));
  m.def(
      "prepare_target",
      [](int n) {
        const ProtocolStates st = prepare_target(n);
        return py::make_tuple(st.phi1.amplitudes(), st.phi2_prime.amplitudes(),
                              st.phi2.amplitudes(), st.psi.amplitudes());
      },
      py::arg("n"), "Returns (phi1, phi2_prime, phi2, psi) amplitude vectors.");
  m.def(
      "reverse_sequence",
      [](const Vector& psi, int n) {
        const auto rev = reverse_sequence(make_pure(psi), n);
        return py::make_tuple(rev.phi4.amplitudes(), rev.phi4_prime.amplitudes(),
                              rev.phi5.amplitudes());
      },
      py::arg("state"), py::arg("n"));
  m.def("support_check", [](const Vector& v) { return support_check(make_pure(v)); });

  // qstate operations
  m.def(
      "schmidt_spectrum",
      [](const Vector& v, const std::vector<int>& part_a) {
        const PureState s = make_pure(v);
        return schmidt_spectrum(s, Bipartition(part_a, s.n_qubits()));
      },
      py::arg("state"), py::arg("part_a"));
  m.def("reduced_density_matrix", [](const Vector& v, const std::vector<int>& subset) {
    return reduced_density_matrix(make_pure(v), subset).matrix();
  });
  m.def("purity", [](const Matrix& rho) { return purity(make_mixed(rho)); });
  m.def("fidelity", [](const Matrix& rho, const Vector& psi) {
    return fidelity(make_mixed(rho), make_pure(psi));
  });
  m.def(
      "expectation",
      [](const Vector& v, const std::string& letters, double weight) {
        const PureState s = make_pure(v);
        return expectation(s, PauliString(s.n_qubits(), letters, weight));
      },
      py::arg("state"), py::arg("letters"), py::arg("weight") = 1.0);

  // pauli algebra
  m.def("conjugated_stabilizers_text", [](int n) {
    std::vector<std::string> out;
    for (const auto& s : conjugated_stabilizers(n)) out.push_back(s.to_text());
    return out;
  });
  m.def("lms_settings", [](int n) {
    std::vector<std::string> out;
    for (const auto& s : group_into_lms(conjugated_stabilizers(n), n)) out.push_back(s.str());
    return out;
  });

  // detection
  m.def("gme_witness", [](const Matrix& rho) { return gme_witness(make_mixed(rho)); });
  m.def("fidelity_lower_bound", &fidelity_lower_bound, py::arg("expectations"), py::arg("n"));
  m.def("homogeneous_value", [](const Vector& v, const std::vector<int>& subset) {
    return homogeneous_value(make_pure(v), subset).value;
  });
  m.def(
      "certify_full_entanglement",
      [](const Vector& v, int n) { return certify_full_entanglement(make_pure(v), n).to_json().dump(); },
      "Returns the witness report as a JSON string.");
  m.def(
      "fidelity_witness_report",
      [](const Vector& v, long shots, std::uint64_t seed) {
        return fidelity_witness(make_pure(v), shots, seed).to_json().dump();
      },
      py::arg("state"), py::arg("shots") = 0, py::arg("seed") = 0);
  m.def("rotated_expectation",
        [](const Vector& v, double theta) { return rotated_expectation(make_pure(v), theta); });

  // noise
  m.def("white_noise",
        [](const Vector& psi, double p) { return white_noise(make_pure(psi), p).matrix(); });
  m.def(
      "noisy_prepared_state",
      [](int n, double p_sf, double p_es, bool skip_mode) {
        NoiseParams params;
        params.p_sf = p_sf;
        params.p_es = p_es;
        return noisy_prepared_state(
                   n, params, skip_mode ? EsFailure::kSkipEntangling : EsFailure::kMaximallyMixed)
            .matrix();
      },
      py::arg("n"), py::arg("p_sf") = 1.0, py::arg("p_es") = 1.0, py::arg("skip_mode") = false);
  m.def("measurement_flip_scale", &measurement_flip_scale);

  // sampling
  m.def(
      "sample_counts",
      [](const Vector& v, const std::string& setting, int shots, std::uint64_t seed) {
        const PureState s = make_pure(v);
        const ShotRecord rec = sample(s, MeasurementSetting(s.n_qubits(), setting), shots, seed);
        std::map<std::uint64_t, long> counts;
        for (std::uint64_t o : rec.outcomes) ++counts[o];
        return counts;
      },
      py::arg("state"), py::arg("setting"), py::arg("shots"), py::arg("seed"));

  // hubbard
  m.def(
      "hubbard_gate_fidelity",
      [](double v_over_j, double t, const std::string& ideal) {
        const HubbardParams p{1.0, 0.0, v_over_j, 0.0};
        const EffectiveGate g = extract_gate(p, t);
        const Matrix target =
            ideal == "sqrt_swap" ? gates::sqrt_swap().matrix : gates::sqrt_swap_dag().matrix;
        return py::make_tuple(gate_fidelity(g, target), g.leakage);
      },
      py::arg("v_over_j"), py::arg("t"), py::arg("ideal") = "sqrt_swap_dag");
  m.def("superexchange_period", [](double v_over_j) {
    return superexchange_period(HubbardParams{1.0, 0.0, v_over_j, 0.0});
  });

  // figure sweeps
  m.def(
      "sweep_csv",
      [](const std::string& figure, int n) {
        RunConfig config;
        config.n = n;
        config.figure = figure;
        const SweepOutput out = cmd_sweep(config);
        return py::make_tuple(out.csv, out.sidecar.dump());
      },
      py::arg("figure"), py::arg("n") = 10);
}
