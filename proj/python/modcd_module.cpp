#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/iostream.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <iostream>
#include <sstream>

#include "modcd/cli.hpp"
#include "modcd/data_io.hpp"
#include "modcd/encoder.hpp"
#include "modcd/error.hpp"
#include "modcd/graph.hpp"
#include "modcd/louvain.hpp"
#include "modcd/membership.hpp"
#include "modcd/metrics.hpp"
#include "modcd/training.hpp"

namespace py = pybind11;
using namespace modcd;

namespace {

py::dict record_dict(const EvalRecord& r) {
  py::dict d;
  d["iteration"] = r.iteration;
  d["loss"] = r.loss;
  d["q_prime"] = r.q_prime;
  d["q"] = r.q;
  d["num_communities"] = r.num_communities;
  d["dbi"] = r.dbi;
  d["nmi"] = r.nmi;
  d["acc"] = r.acc;
  d["f1"] = r.f1;
  d["ari"] = r.ari;
  d["wall_ms"] = r.wall_ms;
  return d;
}

Partition as_partition(const std::vector<int>& assign) { return Partition::compact(assign); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Attributed-graph community detection by differentiable soft modularity";

  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<AttributedGraph>(m, "AttributedGraph")
      .def_property_readonly("num_nodes", &AttributedGraph::num_nodes)
      .def_property_readonly("num_edges", &AttributedGraph::num_edges)
      .def_property_readonly("two_m", &AttributedGraph::two_m)
      .def_property_readonly("feature_dim", &AttributedGraph::feature_dim)
      .def_property_readonly("degrees", &AttributedGraph::degrees)
      .def_property_readonly("labels", [](const AttributedGraph& g) { return g.labels(); })
      .def_property_readonly("self_loops_dropped", &AttributedGraph::self_loops_dropped)
      .def("edge_list", &AttributedGraph::edge_list)
      .def("features", [](const AttributedGraph& g) { return Matrix<double>(g.features()); })
      .def("__repr__", [](const AttributedGraph& g) {
        std::ostringstream s;
        s << "<AttributedGraph n=" << g.num_nodes() << " edges=" << g.num_edges() << " m=" << g.feature_dim() << ">";
        return s.str();
      });

  m.def(
      "build_graph",
      [](const std::vector<Edge>& edges, const Matrix<double>& features, std::optional<std::vector<int>> labels) {
        return build_graph(edges, features, std::move(labels));
      },
      py::arg("edges"), py::arg("features"), py::arg("labels") = py::none());
  m.def(
      "load_dataset",
      [](const std::string& edges, const std::string& features, std::optional<std::string> labels,
         const std::string& name) {
        DatasetBundle b{edges, features, std::nullopt, name};
        if (labels) b.labels = *labels;
        return load_dataset(b);
      },
      py::arg("edges"), py::arg("features"), py::arg("labels") = py::none(), py::arg("name") = "");
  m.def(
      "generate_sbm",
      [](std::vector<int> blocks, double p_in, double p_out, int feature_dim, double separation, double sigma,
         std::uint64_t seed) {
        return generate_sbm(SbmSpec{std::move(blocks), p_in, p_out, feature_dim, separation, sigma, seed});
      },
      py::arg("blocks"), py::arg("p_in") = 0.5, py::arg("p_out") = 0.01, py::arg("feature_dim") = 16,
      py::arg("separation") = 4.0, py::arg("sigma") = 0.5, py::arg("seed") = 0);

  m.def(
      "modularity_hard",
      [](const AttributedGraph& g, const std::vector<int>& assign) { return modularity_hard(g, as_partition(assign)); },
      py::arg("graph"), py::arg("assignment"));
  m.def(
      "louvain",
      [](const AttributedGraph& g, std::uint64_t seed) {
        const LouvainResult r = louvain_run(g, seed);
        return py::make_tuple(r.partition.assignment(), r.level_modularity);
      },
      py::arg("graph"), py::arg("seed") = 0, "Returns (assignment, per-level modularity).");
  m.def(
      "filter_communities",
      [](const std::vector<int>& assign, double coef) {
        const FilterResult fr = filter_communities(as_partition(assign), assign.size(), coef);
        py::dict d;
        d["kept_ids"] = fr.kept_ids;
        d["k"] = fr.k;
        d["threshold"] = fr.threshold;
        d["mean"] = fr.mean;
        d["stddev"] = fr.stddev;
        d["member_lists"] = fr.member_lists;
        return d;
      },
      py::arg("assignment"), py::arg("coef") = 0.5);

  m.def(
      "propagation_matrix", [](const AttributedGraph& g) { return Matrix<double>(build_propagation(g)); },
      py::arg("graph"), "Dense D^-1/2 (A + I) D^-1/2.");
  m.def(
      "l2_normalize", [](const Matrix<double>& z) { return l2_normalize(z); }, py::arg("z"));
  m.def(
      "similarity",
      [](const Matrix<double>& h, const Matrix<double>& centers, const std::string& mode) {
        return similarity(h, centers, parse_similarity_mode(mode));
      },
      py::arg("h"), py::arg("centers"), py::arg("mode") = "cosine");
  m.def(
      "soft_assign",
      [](const Matrix<double>& sim, double delta, const std::string& sign) {
        return soft_assign(sim, delta, parse_softmax_sign(sign));
      },
      py::arg("sim"), py::arg("delta") = 30.0, py::arg("sign") = "plus");
  m.def(
      "hard_assign", [](const Matrix<double>& p) { return hard_assign(p).column; }, py::arg("membership"));
  m.def(
      "soft_modularity",
      [](const AttributedGraph& g, const Matrix<double>& p, double alpha) {
        const SoftModularityValue v = soft_modularity(g, p, alpha);
        return py::make_tuple(v.q_prime, v.loss);
      },
      py::arg("graph"), py::arg("membership"), py::arg("alpha") = 1.0, "Returns (Q', loss).");

  m.def(
      "nmi", [](const std::vector<int>& a, const std::vector<int>& b) { return nmi(as_partition(a), as_partition(b)); },
      py::arg("pred"), py::arg("truth"));
  m.def(
      "acc", [](const std::vector<int>& a, const std::vector<int>& b) { return acc(as_partition(a), as_partition(b)); },
      py::arg("pred"), py::arg("truth"));
  m.def(
      "f1", [](const std::vector<int>& a, const std::vector<int>& b) { return f1(as_partition(a), as_partition(b)); },
      py::arg("pred"), py::arg("truth"));
  m.def(
      "ari", [](const std::vector<int>& a, const std::vector<int>& b) { return ari(as_partition(a), as_partition(b)); },
      py::arg("pred"), py::arg("truth"));
  m.def(
      "dbi", [](const Matrix<double>& h, const std::vector<int>& a) { return dbi(h, as_partition(a)); },
      py::arg("embedding"), py::arg("pred"));

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("delta", &TrainConfig::delta)
      .def_readwrite("alpha", &TrainConfig::alpha)
      .def_readwrite("lr", &TrainConfig::lr)
      .def_readwrite("weight_decay", &TrainConfig::weight_decay)
      .def_readwrite("iters", &TrainConfig::iters)
      .def_readwrite("eval_interval", &TrainConfig::eval_interval)
      .def_readwrite("dim", &TrainConfig::dim)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("threshold_coef", &TrainConfig::threshold_coef)
      .def_property(
          "activation", [](const TrainConfig& c) { return std::string(to_string(c.activation)); },
          [](TrainConfig& c, const std::string& v) { c.activation = parse_activation(v); })
      .def_property(
          "sim", [](const TrainConfig& c) { return std::string(to_string(c.sim_mode)); },
          [](TrainConfig& c, const std::string& v) { c.sim_mode = parse_similarity_mode(v); })
      .def_property(
          "sign", [](const TrainConfig& c) { return std::string(to_string(c.sign)); },
          [](TrainConfig& c, const std::string& v) { c.sign = parse_softmax_sign(v); })
      .def_property(
          "precision", [](const TrainConfig& c) { return std::string(to_string(c.precision)); },
          [](TrainConfig& c, const std::string& v) { c.precision = parse_precision(v); });

  m.def(
      "train",
      [](const AttributedGraph& g, const TrainConfig& cfg) {
        TrainResult r;
        {
          py::gil_scoped_release release;
          r = train(g, cfg);
        }
        py::list history;
        for (const auto& rec : r.history.records) history.append(record_dict(rec));
        py::dict out;
        out["history"] = history;
        out["final"] = record_dict(r.final_metrics);
        out["partition"] = r.assignment.partition.assignment();
        out["louvain"] = r.louvain.assignment();
        out["louvain_q"] = r.louvain_q;
        out["k"] = r.filter.k;
        out["initial_q_prime"] = r.initial_q_prime;
        out["embedding"] = r.embedding;
        out["membership"] = r.membership;
        return out;
      },
      py::arg("graph"), py::arg("config") = TrainConfig{});

  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "modcd");
        std::ostringstream out, err;
        const int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs a CLI invocation; returns (exit_code, stdout, stderr).");
}
