#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "blocksketch/analytics.h"
#include "blocksketch/error.h"
#include "blocksketch/graph.h"
#include "blocksketch/graph_io.h"
#include "blocksketch/pipeline.h"
#include "blocksketch/sbm.h"
#include "blocksketch/sdp.h"
#include "blocksketch/vote.h"

namespace py = pybind11;

namespace blocksketch {
namespace {

// Labels cross the boundary as lists of +1, -1 and 0 (unassigned).
std::vector<int> ToInts(const LabelVector& labels) {
  std::vector<int> out;
  out.reserve(labels.size());
  for (Label l : labels) out.push_back(LabelSign(l));
  return out;
}

LabelVector ToLabels(const std::vector<int>& values) {
  LabelVector out;
  out.reserve(values.size());
  for (int v : values) {
    if (v != -1 && v != 0 && v != 1) {
      throw ParameterError("labels must be +1, -1 or 0");
    }
    out.push_back(static_cast<Label>(v));
  }
  return out;
}

std::optional<std::vector<int>> TruthInts(const Graph& g) {
  if (!g.truth()) return std::nullopt;
  return ToInts(*g.truth());
}

SampleMask MaskFor(const Graph& g, std::vector<NodeId> kept) {
  std::sort(kept.begin(), kept.end());
  SampleMask mask;
  mask.num_nodes = g.num_nodes();
  mask.kept = std::move(kept);
  return mask;
}

TieBreak ParseTieMode(const std::string& mode, RngSeed seed) {
  if (mode == "strict") return {TieMode::kStrict, seed};
  if (mode == "coin") return {TieMode::kCoin, seed};
  throw ParameterError("tie_mode must be 'strict' or 'coin'");
}

MleConstraint ParseConstraint(const std::string& mode, std::int64_t size,
                              double lambda) {
  if (mode == "balanced") return MleConstraint::Balanced();
  if (mode == "exact") return MleConstraint::ExactSize(size);
  if (mode == "lagrangian") return MleConstraint::Lagrangian(lambda);
  throw ParameterError("mode must be 'balanced', 'exact' or 'lagrangian'");
}

SdpConfig MakeSdpConfig(double lambda, bool balanced, RngSeed seed, int rank,
                        int max_iters, int restarts, double step_tol,
                        double grad_tol) {
  SdpConfig cfg;
  cfg.lambda = lambda;
  cfg.balanced_mode = balanced;
  cfg.seed = seed;
  cfg.rank = rank;
  cfg.max_iters = max_iters;
  cfg.restarts = restarts;
  cfg.step_tol = step_tol;
  cfg.grad_tol = grad_tol;
  return cfg;
}

SketchConfig MakeSketchConfig(double gamma, std::optional<double> lambda,
                              const std::string& tie_mode) {
  SketchConfig cfg;
  cfg.gamma = gamma;
  cfg.fixed_lambda = lambda;
  cfg.tie_break = ParseTieMode(tie_mode, 0);
  return cfg;
}

py::dict TrialDict(const TrialRecord& r) {
  py::dict d;
  d["n"] = r.params.n;
  d["alpha"] = r.params.alpha;
  d["beta"] = r.params.beta;
  d["gamma"] = r.gamma;
  d["seed"] = r.seed;
  d["sample_size"] = r.sample_size;
  d["tight"] = r.sdp_certificate.tight;
  d["gap"] = r.sdp_certificate.gap;
  d["subgraph_success"] = r.subgraph_success;
  d["vote_ties"] = r.vote_ties;
  d["overall_success"] = r.overall_success;
  d["degenerate_sample"] = r.degenerate_sample;
  d["lambda_used"] = r.lambda_used;
  d["error"] = r.error;
  return d;
}

}  // namespace
}  // namespace blocksketch

PYBIND11_MODULE(_core, m) {
  using namespace blocksketch;
  m.doc() = "Sketched SDP community detection for the two-community SBM.";

  static py::exception<Error> base(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParameterError>(m, "ParameterError", base.ptr());
  py::register_exception<CapacityError>(m, "CapacityError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<EmptyGraphError>(m, "EmptyGraphError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());

  py::class_<Graph>(m, "Graph")
      .def(py::init([](std::int64_t n, std::vector<Edge> edges,
                       std::optional<std::vector<int>> truth) {
             std::optional<LabelVector> t;
             if (truth) t = ToLabels(*truth);
             return Graph(n, std::move(edges), std::move(t));
           }),
           py::arg("n"), py::arg("edges"), py::arg("truth") = py::none())
      .def_property_readonly("num_nodes", &Graph::num_nodes)
      .def_property_readonly("num_edges", &Graph::num_edges)
      .def_property_readonly("edges", &Graph::edges)
      .def_property_readonly("truth", &TruthInts)
      .def("neighbors",
           [](const Graph& g, NodeId v) {
             if (v < 0 || v >= g.num_nodes()) throw ParameterError("node out of range");
             const auto nb = g.Neighbors(v);
             return std::vector<NodeId>(nb.begin(), nb.end());
           })
      .def("has_edge", &Graph::HasEdge)
      .def("__eq__", [](const Graph& a, const Graph& b) { return a == b; })
      .def("__repr__", [](const Graph& g) {
        return "Graph(n=" + std::to_string(g.num_nodes()) +
               ", m=" + std::to_string(g.num_edges()) + ")";
      });

  py::class_<SbmParams>(m, "SbmParams")
      .def_static("balanced", &SbmParams::Balanced, py::arg("n"), py::arg("alpha"),
                  py::arg("beta"))
      .def_static("explicit", &SbmParams::Explicit, py::arg("n1"), py::arg("n2"),
                  py::arg("p"), py::arg("q"))
      .def_readonly("n", &SbmParams::n)
      .def_readonly("n1", &SbmParams::n1)
      .def_readonly("n2", &SbmParams::n2)
      .def_readonly("alpha", &SbmParams::alpha)
      .def_readonly("beta", &SbmParams::beta)
      .def_readonly("p", &SbmParams::p)
      .def_readonly("q", &SbmParams::q);

  m.def("sample_sbm", &SampleSbm, py::arg("params"), py::arg("seed"));
  m.def("subsample_nodes",
        [](std::int64_t n, double gamma, RngSeed seed) {
          return SubsampleNodes(n, gamma, seed).kept;
        },
        py::arg("n"), py::arg("gamma"), py::arg("seed"));
  m.def("induced_subgraph",
        [](const Graph& g, std::vector<NodeId> kept) {
          Subgraph sub = InducedSubgraph(g, MaskFor(g, std::move(kept)));
          return py::make_tuple(sub.graph, sub.to_original);
        },
        py::arg("graph"), py::arg("kept"));
  m.def("partitions_equal",
        [](const std::vector<int>& a, const std::vector<int>& b) {
          return PartitionsEqual(ToLabels(a), ToLabels(b));
        });
  m.def("edge_count_between",
        [](const Graph& g, NodeId v, const std::vector<NodeId>& s) {
          return EdgeCountBetween(g, v, s);
        },
        py::arg("graph"), py::arg("v"), py::arg("s"));
  m.def("read_graph", &ReadGraphFile, py::arg("path"));
  m.def("write_graph", &WriteGraphFile, py::arg("path"), py::arg("graph"));

  py::class_<SdpSolution>(m, "SdpSolution")
      .def_readonly("factor", &SdpSolution::factor)
      .def_readonly("objective", &SdpSolution::objective)
      .def_property_readonly("rounded",
                             [](const SdpSolution& s) { return ToInts(s.rounded); })
      .def_readonly("rounded_objective", &SdpSolution::rounded_objective)
      .def_property_readonly("tight",
                             [](const SdpSolution& s) { return s.certificate.tight; })
      .def_property_readonly("gap", [](const SdpSolution& s) { return s.certificate.gap; })
      .def_readonly("iters", &SdpSolution::iters)
      .def_readonly("balance_residual", &SdpSolution::balance_residual)
      .def_readonly("lambda_", &SdpSolution::lambda)
      .def_property_readonly("converged",
                             [](const SdpSolution& s) { return s.diagnostics.converged; });

  m.def("solve_sdp",
        [](const Graph& g, double lambda, bool balanced, RngSeed seed, int rank,
           int max_iters, int restarts, double step_tol, double grad_tol) {
          return SolveSdp(g, MakeSdpConfig(lambda, balanced, seed, rank, max_iters,
                                           restarts, step_tol, grad_tol));
        },
        py::arg("graph"), py::arg("lambda_") = 0.0, py::arg("balanced") = false,
        py::arg("seed") = 0, py::arg("rank") = 0, py::arg("max_iters") = 3000,
        py::arg("restarts") = 5, py::arg("step_tol") = 1e-12,
        py::arg("grad_tol") = 1e-9, py::call_guard<py::gil_scoped_release>());
  m.def("round_solution",
        [](const FactorMatrix& factor) { return ToInts(RoundSolution(factor).labels); },
        py::arg("factor"));
  m.def("brute_force_mle",
        [](const Graph& g, const std::string& mode, std::int64_t size, double lambda) {
          const MleResult r = BruteForceMle(g, ParseConstraint(mode, size, lambda));
          return py::make_tuple(ToInts(r.labels), r.objective, r.num_optimal);
        },
        py::arg("graph"), py::arg("mode") = "balanced", py::arg("size") = 0,
        py::arg("lambda_") = 0.0);

  m.def("majority_vote",
        [](const Graph& g, const std::vector<NodeId>& kept,
           const std::vector<int>& sample_labels) {
          SampleMask mask;
          mask.num_nodes = g.num_nodes();
          mask.kept = kept;
          const VoteOutcome out = MajorityVote(g, mask, ToLabels(sample_labels));
          return py::make_tuple(ToInts(out.labels), out.tie_count, out.margin);
        },
        py::arg("graph"), py::arg("kept"), py::arg("sample_labels"));
  m.def("oracle_vote_trial", &OracleVoteTrial, py::arg("graph"), py::arg("gamma"),
        py::arg("seed"));

  m.def("gamma_star", &GammaStar, py::arg("alpha"), py::arg("beta"));
  m.def("exact_recovery_possible",
        [](double alpha, double beta) {
          return std::string(RegimeName(ExactRecoveryPossible(alpha, beta)));
        },
        py::arg("alpha"), py::arg("beta"));
  m.def("lambda_star", &LambdaStar, py::arg("p"), py::arg("q"));
  m.def("lambda_star_from_rates", &LambdaStarFromRates, py::arg("alpha"),
        py::arg("beta"), py::arg("n"));
  m.def("lemma2_exponent", &Lemma2Exponent, py::arg("alpha"), py::arg("beta"),
        py::arg("gamma"));
  m.def("lemma2_bound",
        [](std::int64_t k1, std::int64_t k2, double p, double q) {
          return Lemma2Bound({k1, k2, p, q});
        },
        py::arg("k1"), py::arg("k2"), py::arg("p"), py::arg("q"));
  m.def("binom_diff_tail_exact",
        [](std::int64_t k1, std::int64_t k2, double p, double q) {
          return BinomDiffTailExact({k1, k2, p, q});
        },
        py::arg("k1"), py::arg("k2"), py::arg("p"), py::arg("q"));
  m.def("chernoff_grid_min",
        [](std::int64_t k1, std::int64_t k2, double p, double q,
           const std::vector<double>& grid) {
          return ChernoffGridMin({k1, k2, p, q}, grid);
        },
        py::arg("k1"), py::arg("k2"), py::arg("p"), py::arg("q"), py::arg("grid"));

  m.def("sketch_and_recover",
        [](const Graph& g, double p, double q, double gamma, RngSeed seed,
           std::optional<double> lambda, const std::string& tie_mode) {
          const SketchResult r =
              SketchAndRecover(g, p, q, MakeSketchConfig(gamma, lambda, tie_mode), seed);
          py::dict d;
          d["labels"] = ToInts(r.labels);
          if (g.truth().has_value()) {
            d["success"] = PartitionsEqual(r.labels, *g.truth());
          } else {
            d["success"] = py::none();
          }
          d["sample_size"] = r.diagnostics.sample_size;
          d["degenerate_sample"] = r.diagnostics.degenerate_sample;
          d["lambda_used"] = r.diagnostics.lambda_used;
          d["tight"] = r.diagnostics.certificate.tight;
          d["vote_ties"] = r.diagnostics.vote_ties;
          return d;
        },
        py::arg("graph"), py::arg("p"), py::arg("q"), py::arg("gamma"),
        py::arg("seed"), py::arg("lambda_") = py::none(),
        py::arg("tie_mode") = "strict");
  m.def("run_trial",
        [](const SbmParams& params, double gamma, RngSeed seed) {
          return TrialDict(RunTrial(params, MakeSketchConfig(gamma, std::nullopt, "strict"),
                                    seed));
        },
        py::arg("params"), py::arg("gamma"), py::arg("seed"));
  m.def("run_sweep",
        [](std::vector<std::int64_t> n, std::vector<double> alpha,
           std::vector<double> beta, std::vector<double> gamma, std::int64_t trials,
           RngSeed master_seed, int jobs) {
          SweepAxes axes{std::move(n), std::move(alpha), std::move(beta),
                         std::move(gamma)};
          SweepTable table;
          {
            py::gil_scoped_release release;
            table = RunSweep(axes, trials, SketchConfig{}, master_seed, jobs);
          }
          return SweepCsv(table);
        },
        py::arg("n"), py::arg("alpha"), py::arg("beta"), py::arg("gamma"),
        py::arg("trials") = 10, py::arg("master_seed") = 0, py::arg("jobs") = 1);
}
