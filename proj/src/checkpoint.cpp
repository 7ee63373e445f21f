#include "graphtrans/checkpoint.hpp"

#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <sstream>

#include "graphtrans/error.hpp"

namespace graphtrans {

namespace {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  return {{"rows", m.rows()},
          {"cols", m.cols()},
          {"data", std::vector<double>(m.data(), m.data() + m.size())}};
}

Matrix matrix_from_json(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (static_cast<std::size_t>(rows * cols) != data.size()) {
    throw ParseError("checkpoint: matrix data length does not match its shape");
  }
  Matrix m(rows, cols);
  std::copy(data.begin(), data.end(), m.data());
  return m;
}

std::string hex(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << v;
  return s.str();
}

}  // namespace

std::string checkpoint_to_json(const Model& model, const EdgeLogits& logits,
                               const Schedule& schedule, std::size_t step,
                               const Optimizer& optimizer) {
  json doc;
  doc["format"] = "graphtrans-checkpoint";
  doc["version"] = kCheckpointVersion;
  doc["graph_hash"] = hex(logits.graph().hash());
  doc["num_vertices"] = logits.graph().size();
  doc["mode"] = model.mode == TaskMode::Signal ? "signal" : "vertex";
  json layers = json::array();
  for (const auto& layer : model.layers) {
    json weights = json::array();
    for (const auto& w : layer.weights) weights.push_back(matrix_to_json(w));
    layers.push_back({{"weights", weights},
                      {"bias", std::vector<double>(layer.bias.data(),
                                                   layer.bias.data() + layer.bias.size())}});
  }
  doc["layers"] = layers;
  doc["fc_weight"] = matrix_to_json(model.fc_weight);
  doc["fc_bias"] = std::vector<double>(model.fc_bias.data(), model.fc_bias.data() + model.fc_bias.size());
  doc["num_slices"] = logits.num_slices();
  doc["logits"] = logits.values();
  doc["schedule"] = {{"t_init", schedule.t_init},
                     {"t_final", schedule.t_final},
                     {"total_steps", schedule.total_steps}};
  doc["step"] = step;
  const auto& oc = optimizer.config();
  doc["optimizer"] = {{"kind", to_string(oc.kind)},
                      {"learning_rate", oc.learning_rate},
                      {"beta1", oc.beta1},
                      {"beta2", oc.beta2},
                      {"epsilon", oc.epsilon},
                      {"steps", optimizer.steps_taken()},
                      {"m", optimizer.first_moments()},
                      {"v", optimizer.second_moments()}};
  return doc.dump() + "\n";
}

Checkpoint checkpoint_from_json(const std::string& text, std::shared_ptr<const Graph> graph) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("checkpoint: ") + e.what());
  }
  try {
    if (doc.at("format") != "graphtrans-checkpoint") throw ParseError("checkpoint: unknown format");
    if (doc.at("version").get<int>() != kCheckpointVersion) {
      throw ParseError("checkpoint: unsupported version " + doc.at("version").dump());
    }
    if (doc.at("graph_hash").get<std::string>() != hex(graph->hash())) {
      throw ParseError("checkpoint: graph hash does not match the supplied graph");
    }
    Model model;
    model.mode = doc.at("mode") == "vertex" ? TaskMode::Vertex : TaskMode::Signal;
    for (const auto& jl : doc.at("layers")) {
      GslLayer layer;
      for (const auto& jw : jl.at("weights")) layer.weights.push_back(matrix_from_json(jw));
      const auto bias = jl.at("bias").get<std::vector<double>>();
      layer.bias = Eigen::Map<const Vector>(bias.data(), static_cast<Eigen::Index>(bias.size()));
      model.layers.push_back(std::move(layer));
    }
    model.fc_weight = matrix_from_json(doc.at("fc_weight"));
    const auto fc_bias = doc.at("fc_bias").get<std::vector<double>>();
    model.fc_bias = Eigen::Map<const Vector>(fc_bias.data(), static_cast<Eigen::Index>(fc_bias.size()));
    model.validate();

    EdgeLogits logits(graph, doc.at("num_slices").get<std::size_t>());
    auto values = doc.at("logits").get<std::vector<double>>();
    if (values.size() != logits.values().size()) {
      throw ParseError("checkpoint: logit count does not match the graph");
    }
    logits.values() = std::move(values);

    const auto& js = doc.at("schedule");
    Schedule schedule{js.at("t_init").get<double>(), js.at("t_final").get<double>(),
                      js.at("total_steps").get<std::size_t>()};
    const auto& jo = doc.at("optimizer");
    OptimizerConfig oc;
    oc.kind = parse_optimizer_kind(jo.at("kind").get<std::string>());
    oc.learning_rate = jo.at("learning_rate").get<double>();
    oc.beta1 = jo.at("beta1").get<double>();
    oc.beta2 = jo.at("beta2").get<double>();
    oc.epsilon = jo.at("epsilon").get<double>();
    return Checkpoint{std::move(model),
                      std::move(logits),
                      schedule,
                      doc.at("step").get<std::size_t>(),
                      oc,
                      jo.at("steps").get<std::size_t>(),
                      jo.at("m").get<std::vector<std::vector<double>>>(),
                      jo.at("v").get<std::vector<std::vector<double>>>()};
  } catch (const json::exception& e) {
    throw ParseError(std::string("checkpoint: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("checkpoint: ") + e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestionError("cannot open " + path.string(), 0);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace graphtrans
