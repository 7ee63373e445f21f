#include "graphtrans/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "graphtrans/checkpoint.hpp"
#include "graphtrans/error.hpp"
#include "graphtrans/eval.hpp"
#include "graphtrans/viz.hpp"

namespace graphtrans {

namespace {

constexpr std::uint64_t kSplitSeedSalt = 0x5eed5eedULL;

std::string format_number(double v) {
  if (std::isnan(v)) return "";
  std::ostringstream s;
  s << std::setprecision(10) << v;
  return s.str();
}

void require_exists(const std::filesystem::path& path, const std::string& what) {
  if (path.empty()) throw InvalidArgument(what + " path is required");
  if (!std::filesystem::exists(path)) {
    throw IngestionError(what + " not found: " + path.string(), 0);
  }
}

}  // namespace

RunConfig resolve_defaults(RunConfig config) {
  if (config.dataset == "ring") {
    if (config.layers.empty()) config.layers = {16, 16};
    if (config.steps == 0 && config.epochs == 0) config.steps = 2000;
    if (!config.batch_size) config.batch_size = 64;
    if (!config.learning_rate) config.learning_rate = 1e-2;
  } else if (config.dataset == "cifar10") {
    if (config.layers.empty()) config.layers = {32, 64};
    if (config.steps == 0 && config.epochs == 0) config.epochs = 10;
  } else if (config.dataset == "webkb") {
    if (config.layers.empty()) config.layers = {64, 64};
    if (config.steps == 0 && config.epochs == 0) config.steps = 200;
  } else {
    throw InvalidArgument("unknown dataset '" + config.dataset +
                          "' (expected ring, cifar10 or webkb)");
  }
  if (!config.batch_size) config.batch_size = 32;
  if (!config.learning_rate) config.learning_rate = 1e-3;
  return config;
}

std::shared_ptr<const Graph> build_graph(const RunConfig& config, const Dataset& dataset) {
  const std::string& kind = config.graph;
  const std::size_t n = dataset.num_vertices();
  if (kind == "ring") return std::make_shared<const Graph>(build_ring_graph(n, true));
  if (kind == "grid") {
    const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
    if (side * side != n) {
      throw InvalidArgument("grid graph needs a square signal, got " + std::to_string(n) +
                            " vertices");
    }
    return std::make_shared<const Graph>(build_grid_graph(side, side, true));
  }
  if (kind == "knn-covariance") {
    if (dataset.mode != TaskMode::Signal) {
      throw InvalidArgument("knn-covariance graphs need a signal-mode dataset");
    }
    const Matrix samples = channel_mean_samples(dataset, dataset.split.train);
    return std::make_shared<const Graph>(build_knn_covariance_graph(samples, config.knn));
  }
  if (kind == "edge-list") {
    require_exists(config.edge_list, "edge list");
    std::ifstream in(config.edge_list);
    auto g = std::make_shared<const Graph>(read_edge_list(in));
    if (g->size() != n) {
      throw InvalidArgument("edge list has " + std::to_string(g->size()) +
                            " vertices, dataset has " + std::to_string(n));
    }
    return g;
  }
  throw InvalidArgument("unknown graph '" + kind +
                        "' (expected auto, grid, knn-covariance, ring or edge-list)");
}

PreparedData prepare_data(const RunConfig& raw) {
  const RunConfig config = resolve_defaults(raw);
  PreparedData out;
  std::shared_ptr<const Graph> natural;
  if (config.dataset == "ring") {
    RingTask task = make_ring_task(config.ring_n, config.ring_classes, config.ring_samples,
                                   config.ring_noise, config.seed);
    out.dataset = std::move(task.dataset);
    natural = std::make_shared<const Graph>(std::move(task.graph));
  } else if (config.dataset == "cifar10") {
    require_exists(config.data_dir, "CIFAR-10 directory");
    CifarOptions options;
    options.max_train = config.cifar_train;
    options.max_validation = config.cifar_validation;
    out.dataset = load_cifar10(config.data_dir, options);
    natural = std::make_shared<const Graph>(build_grid_graph(16, 16, true));
  } else {
    require_exists(config.webkb_content, "WebKB content file");
    require_exists(config.webkb_cites, "WebKB cites file");
    WebkbData web = load_webkb(config.webkb_content, config.webkb_cites);
    out.dataset = std::move(web.dataset);
    natural = std::make_shared<const Graph>(std::move(web.graph));
    const auto splits = make_splits(out.dataset, {0.6, 0.2, 0.2}, config.num_splits,
                                    config.seed ^ kSplitSeedSalt);
    if (config.split_index >= splits.size()) {
      throw InvalidArgument("split index " + std::to_string(config.split_index) + " out of range");
    }
    out.dataset.split = splits[config.split_index];
  }
  out.graph = config.graph == "auto" ? natural : build_graph(config, out.dataset);

  const std::size_t n = out.graph->size();
  const bool grid_shaped = config.graph == "grid" || (config.graph == "auto" && config.dataset == "cifar10");
  if (grid_shaped) {
    const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
    out.grid = std::make_pair(side, side);
  }
  return out;
}

TrainConfig make_train_config(const RunConfig& raw, const Dataset& dataset) {
  const RunConfig config = resolve_defaults(raw);
  TrainConfig tc;
  tc.seed = config.seed;
  tc.num_slices = config.k;
  tc.widths = config.layers;
  tc.batch_size = *config.batch_size;
  tc.optimizer.kind = parse_optimizer_kind(config.optimizer);
  tc.optimizer.learning_rate = *config.learning_rate;
  tc.schedule.t_init = config.t_init;
  tc.schedule.t_final = config.t_final;
  if (config.steps != 0) {
    tc.schedule.total_steps = config.steps;
  } else if (dataset.mode == TaskMode::Vertex) {
    tc.schedule.total_steps = config.epochs;
  } else {
    tc.schedule.total_steps =
        steps_for_epochs(config.epochs, dataset.split.train.size(), *config.batch_size);
  }
  tc.validate();
  return tc;
}

void write_metrics_csv(std::ostream& out, const std::vector<EpochRecord>& history) {
  out << "step,temperature,train_loss,train_acc,val_acc\n";
  for (const auto& r : history) {
    out << r.step << ',' << format_number(r.temperature) << ',' << format_number(r.train_loss)
        << ',' << format_number(r.train_accuracy) << ',' << format_number(r.validation_accuracy)
        << '\n';
  }
}

TrainSummary run_train(const RunConfig& config, const PreparedData& data, std::ostream& log) {
  const TrainConfig tc = make_train_config(config, data.dataset);
  std::filesystem::create_directories(config.out_dir);

  TrainResult result = train(data.dataset, data.graph, tc, [&log](const EpochRecord& r) {
    log << "step " << r.step << "  t=" << format_number(r.temperature)
        << "  loss=" << format_number(r.train_loss) << "  acc=" << format_number(r.train_accuracy)
        << "  val=" << format_number(r.validation_accuracy) << '\n';
  });

  const SoftTransforms s = soften(result.logits, tc.schedule.t_final);
  TrainSummary summary{std::move(result), std::numeric_limits<double>::quiet_NaN(),
                       std::numeric_limits<double>::quiet_NaN(), std::nullopt};
  if (!data.dataset.split.validation.empty()) {
    summary.validation_accuracy =
        evaluate_accuracy(summary.result.model, s, data.dataset, data.dataset.split.validation);
  }
  if (!data.dataset.split.test.empty()) {
    summary.test_accuracy =
        evaluate_accuracy(summary.result.model, s, data.dataset, data.dataset.split.test);
  }

  const auto& out = config.out_dir;
  write_file(out / "checkpoint.json",
             checkpoint_to_json(summary.result.model, summary.result.logits, tc.schedule,
                                tc.schedule.total_steps, summary.result.optimizer));
  {
    std::ostringstream metrics;
    write_metrics_csv(metrics, summary.result.history);
    write_file(out / "metrics.csv", metrics.str());
  }
  write_file(out / "transforms.json", hard_transforms_to_json(summary.result.hard));

  log << "validation accuracy: " << format_number(summary.validation_accuracy) << '\n';
  if (!std::isnan(summary.test_accuracy)) {
    log << "test accuracy: " << format_number(summary.test_accuracy) << '\n';
  }
  if (data.grid) {
    const auto [h, w] = *data.grid;
    std::ostringstream report;
    summary.mean_distance = write_eval_report(report, summary.result.hard, h, w);
    write_file(out / "eval_report.csv", report.str());
    const auto refs = canonical_transforms(h, w);
    for (std::size_t k = 0; k < summary.result.hard.num_slices(); ++k) {
      const auto best = nearest_canonical(summary.result.hard.targets[k], refs);
      log << "T" << k << ": nearest " << best.name << " at distance "
          << format_number(best.distance) << '\n';
    }
    log << "mean distance: " << format_number(*summary.mean_distance) << '\n';
  }
  return summary;
}

TrainSummary run_train(const RunConfig& config, std::ostream& log) {
  return run_train(config, prepare_data(config), log);
}

void run_sweep(const RunConfig& config, std::ostream& log) {
  const bool vary_init = !config.t_init_grid.empty();
  const bool vary_final = !config.t_final_grid.empty();
  if (vary_init == vary_final) {
    throw InvalidArgument("sweep: give exactly one non-empty grid (t_init or t_final)");
  }
  if (config.repeats == 0) throw InvalidArgument("sweep: repeats must be >= 1");
  const auto& grid = vary_init ? config.t_init_grid : config.t_final_grid;
  for (double v : grid) {
    if (!(v > 0.0)) throw InvalidArgument("sweep: temperatures must be positive");
  }

  const PreparedData data = prepare_data(config);
  std::filesystem::create_directories(config.out_dir);
  std::ostringstream csv;
  csv << "t_init,t_final,accuracy,distance_identity,distance_up,distance_down,"
         "distance_dilation,distance_mean\n";
  std::vector<CanonicalTransform> refs;
  if (data.grid) refs = canonical_transforms(data.grid->first, data.grid->second);
  auto ref = [&refs](const std::string& name) -> const CanonicalTransform& {
    for (const auto& r : refs) {
      if (r.name == name) return r;
    }
    throw InvalidArgument("unknown canonical " + name);
  };

  for (double v : grid) {
    RunConfig point = resolve_defaults(config);
    (vary_init ? point.t_init : point.t_final) = v;
    double acc = 0.0;
    std::array<double, 5> dist{};
    for (std::size_t rep = 0; rep < config.repeats; ++rep) {
      point.seed = config.seed + rep;
      const TrainConfig tc = make_train_config(point, data.dataset);
      const TrainResult result = train(data.dataset, data.graph, tc);
      const auto& items = data.dataset.split.validation.empty() ? data.dataset.split.train
                                                                : data.dataset.split.validation;
      acc += evaluate_accuracy(result.model, soften(result.logits, tc.schedule.t_final),
                               data.dataset, items);
      if (data.grid) {
        dist[0] += closest_slice_distance(result.hard, ref("identity"));
        dist[1] += closest_slice_distance(result.hard, ref("up"));
        dist[2] += closest_slice_distance(result.hard, ref("down"));
        dist[3] += std::min(closest_slice_distance(result.hard, ref("h-dilate")),
                            closest_slice_distance(result.hard, ref("v-dilate")));
        double mean = 0.0;
        for (const auto& slice : result.hard.targets) mean += nearest_canonical(slice, refs).distance;
        dist[4] += mean / static_cast<double>(result.hard.num_slices());
      }
    }
    const double reps = static_cast<double>(config.repeats);
    csv << format_number(point.t_init) << ',' << format_number(point.t_final) << ','
        << format_number(acc / reps);
    for (double d : dist) {
      csv << ',' << (data.grid ? format_number(d / reps) : std::string());
    }
    csv << '\n';
    log << "t_init=" << format_number(point.t_init) << " t_final=" << format_number(point.t_final)
        << " accuracy=" << format_number(acc / reps) << '\n';
  }
  write_file(config.out_dir / "sweep.csv", csv.str());
}

void run_viz(const std::filesystem::path& transforms_path,
             const std::optional<std::filesystem::path>& image_path, std::size_t height,
             std::size_t width, const std::filesystem::path& out_dir) {
  const HardTransforms hard = hard_transforms_from_json(read_file(transforms_path));
  if (height * width != hard.n) {
    throw InvalidArgument("viz: " + std::to_string(height) + "x" + std::to_string(width) +
                          " does not match the " + std::to_string(hard.n) + " vertices");
  }
  std::optional<Matrix> image;
  if (image_path) {
    std::size_t ih = 0;
    std::size_t iw = 0;
    image = decode_ppm(read_file(*image_path), &ih, &iw);
    if (ih != height || iw != width) {
      throw InvalidArgument("viz: image is " + std::to_string(ih) + "x" + std::to_string(iw) +
                            ", expected " + std::to_string(height) + "x" + std::to_string(width));
    }
  }
  std::filesystem::create_directories(out_dir);
  for (std::size_t k = 0; k < hard.num_slices(); ++k) {
    const std::string stem = "T" + std::to_string(k);
    write_file(out_dir / (stem + ".svg"), arrow_field_svg(hard.targets[k], height, width));
    if (image) {
      write_file(out_dir / (stem + ".ppm"), translated_image_ppm(hard, k, *image, height, width));
    }
  }
}

}  // namespace graphtrans
