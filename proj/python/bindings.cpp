// Copyright 2026 The blindiqp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "blindiqp/hypothesis.hpp"
#include "blindiqp/protocol.hpp"
#include "blindiqp/security.hpp"
#include "blindiqp/xprog.hpp"

namespace py = pybind11;
using namespace blindiqp;

namespace {

XProgram program(const std::vector<std::vector<int>>& q, double theta) {
  return XProgram(BinMatrix::from_rows(q), theta);
}

std::string view_json(const ViewDistance& d) { return to_json(d).dump(); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Blind delegated IQP workbench";

  py::register_exception<std::runtime_error>(m, "BlindIqpError");

  m.def(
      "exact_distribution",
      [](const std::vector<std::vector<int>>& q, double theta) {
        return exact_distribution(program(q, theta)).probs;
      },
      py::arg("q"), py::arg("theta"));

  m.def(
      "bias",
      [](const std::vector<std::vector<int>>& q, double theta, const std::vector<int>& s) {
        return bias_codeword_formula(program(q, theta), BinVector::from_bits(s)).value;
      },
      py::arg("q"), py::arg("theta"), py::arg("s"));

  m.def(
      "protocol_distribution",
      [](const std::vector<std::vector<int>>& q, double theta,
         const std::vector<std::vector<int>>& qt, const std::string& runner,
         const std::string& adversary) {
        return exact_output_distribution(runner_from_name(runner), program(q, theta),
                                         ExtendedIqpGraph(qt), *make_server(adversary))
            .probs;
      },
      py::arg("q"), py::arg("theta"), py::arg("qt"), py::arg("runner") = "blind",
      py::arg("adversary") = "honest");

  m.def(
      "run_blind",
      [](const std::vector<std::vector<int>>& q, double theta,
         const std::vector<std::vector<int>>& qt, std::uint64_t seed,
         const std::string& adversary) {
        const RunResult r =
            run_blind(program(q, theta), ExtendedIqpGraph(qt), seed, *make_server(adversary));
        return py::make_tuple(r.x.to_bits(), r.transcript.to_json().dump());
      },
      py::arg("q"), py::arg("theta"), py::arg("qt"), py::arg("seed"),
      py::arg("adversary") = "honest");

  m.def(
      "blindness_distance",
      [](const std::vector<std::vector<int>>& q1, const std::vector<std::vector<int>>& q2,
         double theta, const std::vector<std::vector<int>>& qt, const std::string& phase,
         const std::string& adversary) {
        return view_json(blindness_distance(program(q1, theta), program(q2, theta),
                                            ExtendedIqpGraph(qt), *make_server(adversary),
                                            phase_from_name(phase)));
      },
      py::arg("q1"), py::arg("q2"), py::arg("theta"), py::arg("qt"),
      py::arg("phase") = "after_state", py::arg("adversary") = "honest");

  m.def(
      "simulator_equivalence",
      [](const std::vector<std::vector<int>>& q, double theta,
         const std::vector<std::vector<int>>& qt, const std::string& adversary) {
        return view_json(
            simulator_equivalence(program(q, theta), ExtendedIqpGraph(qt), *make_server(adversary)));
      },
      py::arg("q"), py::arg("theta"), py::arg("qt"), py::arg("adversary") = "honest");

  m.def("quadratic_residues", &quadratic_residues, py::arg("p"));
  m.def(
      "qr_generator_matrix", [](int n_a) { return qr_generator_matrix(n_a).to_rows(); },
      py::arg("n_a"));
  m.def(
      "expected_bias",
      [](int n_a, const std::vector<int>& s_hat) {
        return expected_bias(build_test_instance(n_a, BinVector::from_bits(s_hat)));
      },
      py::arg("n_a"), py::arg("s_hat"));
  m.def(
      "hypothesis_test",
      [](int n_a, std::size_t samples, double threshold, std::uint64_t seed,
         const std::string& adversary, bool reveal) {
        py::gil_scoped_release release;
        return to_json(run_hypothesis_test(n_a, samples, threshold, seed, *make_server(adversary)),
                       reveal)
            .dump();
      },
      py::arg("n_a"), py::arg("samples"), py::arg("threshold") = 0.80, py::arg("seed") = 0,
      py::arg("adversary") = "honest", py::arg("reveal") = false);
}
