#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "graphtrans/data.hpp"
#include "graphtrans/graph.hpp"
#include "graphtrans/train.hpp"

namespace graphtrans {

/// Everything a train / sweep / eval / export-graph run needs. Zero-valued
/// sizes mean "use the dataset's default" (see resolve_defaults).
struct RunConfig {
  std::string dataset = "ring";  // ring | cifar10 | webkb
  std::string graph = "auto";    // auto | grid | knn-covariance | ring | edge-list
  std::filesystem::path data_dir;
  std::filesystem::path webkb_content;
  std::filesystem::path webkb_cites;
  std::filesystem::path edge_list;
  std::filesystem::path out_dir = "out";

  std::size_t ring_n = 16;
  std::size_t ring_classes = 4;
  std::size_t ring_samples = 200;
  double ring_noise = 0.05;

  std::size_t cifar_train = 5000;
  std::size_t cifar_validation = 1000;
  std::size_t knn = 5;

  std::size_t num_splits = 10;
  std::size_t split_index = 0;

  std::uint64_t seed = 0;
  std::size_t k = 5;
  double t_init = 10.0;
  double t_final = 0.01;
  std::size_t steps = 0;
  std::size_t epochs = 0;
  std::optional<std::size_t> batch_size;  // unset: dataset default
  std::optional<double> learning_rate;    // unset: dataset default
  std::string optimizer = "adam";
  std::vector<std::size_t> layers;

  std::vector<double> t_init_grid;
  std::vector<double> t_final_grid;
  std::size_t repeats = 1;
};

/// Per-dataset defaults for unset fields: ring uses 2 x 16 channels, 2000
/// steps, batch 64 and learning rate 1e-2; cifar10 uses 32 -> 64 channels
/// and 10 epochs; webkb uses 64 -> 64 channels and 200 full-batch steps.
/// Otherwise batch size is 32 and learning rate 1e-3.
RunConfig resolve_defaults(RunConfig config);

struct PreparedData {
  Dataset dataset;
  std::shared_ptr<const Graph> graph;
  /// Set when the graph is a grid, enabling canonical-transform distances.
  std::optional<std::pair<std::size_t, std::size_t>> grid;
};

/// Loads or generates the dataset and builds the requested graph.
PreparedData prepare_data(const RunConfig& config);
std::shared_ptr<const Graph> build_graph(const RunConfig& config, const Dataset& dataset);

TrainConfig make_train_config(const RunConfig& config, const Dataset& dataset);

struct TrainSummary {
  TrainResult result;
  double validation_accuracy = 0.0;  // NaN without a validation split
  double test_accuracy = 0.0;        // NaN without a test split
  std::optional<double> mean_distance;
};

/// Trains and writes checkpoint.json, metrics.csv, transforms.json and (on
/// grid graphs) eval_report.csv into config.out_dir.
TrainSummary run_train(const RunConfig& config, const PreparedData& data, std::ostream& log);
TrainSummary run_train(const RunConfig& config, std::ostream& log);

/// One independent training per grid value; writes sweep.csv in grid order.
void run_sweep(const RunConfig& config, std::ostream& log);

/// T<k>.svg per slice, plus T<k>.ppm when an image is given.
void run_viz(const std::filesystem::path& transforms_path,
             const std::optional<std::filesystem::path>& image_path, std::size_t height,
             std::size_t width, const std::filesystem::path& out_dir);

void write_metrics_csv(std::ostream& out, const std::vector<EpochRecord>& history);

}  // namespace graphtrans
