#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <sstream>

#include "graphtrans/error.hpp"
#include "graphtrans/eval.hpp"
#include "graphtrans/graph.hpp"
#include "graphtrans/nn.hpp"
#include "graphtrans/pipeline.hpp"
#include "graphtrans/transform.hpp"

namespace py = pybind11;
using namespace graphtrans;

namespace {

std::vector<std::vector<Vertex>> neighbor_lists(const Graph& g) {
  std::vector<std::vector<Vertex>> out(g.size());
  for (Vertex i = 0; i < g.size(); ++i) {
    auto row = g.neighbors(i);
    out[i].assign(row.begin(), row.end());
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_graphtrans, m) {
  m.doc() = "Edge-constrained graph signal translations learned from classification tasks";
  m.attr("__version__") = "0.1.0";

  // Translators run newest first, so the base class goes first.
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

  py::class_<Graph, std::shared_ptr<Graph>>(m, "Graph")
      .def(py::init([](std::size_t n, std::vector<std::vector<Vertex>> lists, bool self_loops) {
             return std::make_shared<Graph>(n, std::move(lists), self_loops);
           }),
           py::arg("n"), py::arg("neighbors"), py::arg("self_loops"))
      .def_property_readonly("n", &Graph::size)
      .def_property_readonly("self_loops", &Graph::has_self_loops)
      .def_property_readonly("num_edges", &Graph::num_edges)
      .def("neighbors",
           [](const Graph& g, Vertex i) {
             if (i >= g.size()) throw py::index_error("vertex out of range");
             auto row = g.neighbors(i);
             return std::vector<Vertex>(row.begin(), row.end());
           })
      .def("neighbor_lists", &neighbor_lists)
      .def("degree", &Graph::degree)
      .def("to_edge_list", [](const Graph& g) {
        std::ostringstream out;
        write_edge_list(out, g);
        return out.str();
      });

  m.def("build_ring_graph", [](std::size_t n, bool loops) { return std::make_shared<Graph>(build_ring_graph(n, loops)); },
        py::arg("n"), py::arg("with_self_loops") = true);
  m.def("build_grid_graph",
        [](std::size_t h, std::size_t w, bool loops) { return std::make_shared<Graph>(build_grid_graph(h, w, loops)); },
        py::arg("height"), py::arg("width"), py::arg("with_self_loops") = true);
  m.def("build_knn_covariance_graph",
        [](const Matrix& samples, std::size_t k) {
          return std::make_shared<Graph>(build_knn_covariance_graph(samples, k));
        },
        py::arg("samples"), py::arg("k"));
  m.def("laplacian", &laplacian, py::arg("graph"));

  m.def("temperature_at",
        [](std::size_t step, double t_init, double t_final, std::size_t total) {
          return temperature_at(step, Schedule{t_init, t_final, total});
        },
        py::arg("step"), py::arg("t_init"), py::arg("t_final"), py::arg("total_steps"));

  m.def("soften",
        [](std::shared_ptr<Graph> g, std::size_t k, std::vector<double> logits, double t) {
          EdgeLogits params(g, k);
          if (logits.size() != params.values().size()) throw InvalidArgument("wrong number of logits");
          params.values() = std::move(logits);
          return soften(params, t).values();
        },
        py::arg("graph"), py::arg("k"), py::arg("logits"), py::arg("t"),
        "Row-wise masked softmax of flat edge logits; returns flat probabilities.");
  m.def("harden",
        [](std::shared_ptr<Graph> g, std::size_t k, std::vector<double> logits) {
          EdgeLogits params(g, k);
          if (logits.size() != params.values().size()) throw InvalidArgument("wrong number of logits");
          params.values() = std::move(logits);
          return harden(params).targets;
        },
        py::arg("graph"), py::arg("k"), py::arg("logits"));
  m.def("mode3_product",
        [](std::shared_ptr<Graph> g, std::vector<std::vector<Vertex>> targets, std::vector<double> w) {
          HardTransforms hard{g->size(), std::move(targets)};
          return mode3_product(one_hot(g, hard), w);
        },
        py::arg("graph"), py::arg("targets"), py::arg("w"),
        "Sum of w[k] times the one-hot matrix of targets[k].");
  m.def("apply_hard",
        [](std::vector<std::vector<Vertex>> targets, std::size_t k, const Matrix& signal) {
          const std::size_t n = targets.empty() ? 0 : targets.front().size();
          return apply_hard(HardTransforms{n, std::move(targets)}, k, signal);
        },
        py::arg("targets"), py::arg("k"), py::arg("signal"));

  m.def("transform_distance",
        [](const std::vector<Vertex>& a, const std::vector<Vertex>& b) { return transform_distance(a, b); });
  m.def("canonical_transforms", [](std::size_t h, std::size_t w) {
    std::vector<std::pair<std::string, std::vector<Vertex>>> out;
    for (auto& c : canonical_transforms(h, w)) out.emplace_back(c.name, c.target);
    return out;
  });
  m.def("nearest_canonical", [](const std::vector<Vertex>& t, std::size_t h, std::size_t w) {
    const auto best = nearest_canonical(t, h, w);
    return std::make_pair(best.name, best.distance);
  });

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_readwrite("dataset", &RunConfig::dataset)
      .def_readwrite("graph", &RunConfig::graph)
      .def_readwrite("data_dir", &RunConfig::data_dir)
      .def_readwrite("webkb_content", &RunConfig::webkb_content)
      .def_readwrite("webkb_cites", &RunConfig::webkb_cites)
      .def_readwrite("out_dir", &RunConfig::out_dir)
      .def_readwrite("ring_n", &RunConfig::ring_n)
      .def_readwrite("ring_classes", &RunConfig::ring_classes)
      .def_readwrite("ring_samples", &RunConfig::ring_samples)
      .def_readwrite("ring_noise", &RunConfig::ring_noise)
      .def_readwrite("seed", &RunConfig::seed)
      .def_readwrite("k", &RunConfig::k)
      .def_readwrite("t_init", &RunConfig::t_init)
      .def_readwrite("t_final", &RunConfig::t_final)
      .def_readwrite("steps", &RunConfig::steps)
      .def_readwrite("epochs", &RunConfig::epochs)
      .def_readwrite("batch_size", &RunConfig::batch_size)
      .def_readwrite("learning_rate", &RunConfig::learning_rate)
      .def_readwrite("optimizer", &RunConfig::optimizer)
      .def_readwrite("layers", &RunConfig::layers);

  m.def("train",
        [](const RunConfig& config) {
          std::ostringstream log;
          std::optional<TrainSummary> result;
          {
            py::gil_scoped_release release;
            result.emplace(run_train(config, log));
          }
          const TrainSummary& summary = *result;
          py::dict out;
          out["validation_accuracy"] = summary.validation_accuracy;
          out["test_accuracy"] = summary.test_accuracy;
          out["targets"] = summary.result.hard.targets;
          py::list history;
          for (const auto& r : summary.result.history) {
            history.append(py::make_tuple(r.step, r.temperature, r.train_loss, r.train_accuracy,
                                          r.validation_accuracy));
          }
          out["history"] = history;
          out["log"] = log.str();
          if (summary.mean_distance) out["mean_distance"] = *summary.mean_distance;
          return out;
        },
        py::arg("config"),
        "Train with a RunConfig, write artifacts to config.out_dir and return a summary dict.");
}
