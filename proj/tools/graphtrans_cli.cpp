// Command-line front end: train, sweep, viz, eval, export-graph.

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "graphtrans/checkpoint.hpp"
#include "graphtrans/error.hpp"
#include "graphtrans/eval.hpp"
#include "graphtrans/pipeline.hpp"

namespace {

using graphtrans::RunConfig;

constexpr int kUsageError = 2;

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

bool has_flag(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == flag || a.rfind(flag + "=", 0) == 0;
  });
}

// Inlines `--config FILE` as "--key value" pairs for every key not already
// given on the command line. Lines are "key = value"; '#' starts a comment;
// list values may be written "a,b" or "[a, b]".
std::vector<std::string> expand_config(std::vector<std::string> args) {
  for (std::size_t i = 1; i < args.size(); ++i) {
    std::string path;
    std::size_t consumed = 0;
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      consumed = 2;
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      consumed = 1;
    } else {
      continue;
    }
    std::ifstream in(path);
    if (!in) throw graphtrans::InvalidArgument("cannot read config file " + path);
    std::vector<std::string> injected;
    std::string line;
    for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
      line = trim(line.substr(0, line.find('#')));
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw graphtrans::InvalidArgument(path + ":" + std::to_string(line_no) + ": expected key = value");
      }
      const std::string key = trim(line.substr(0, eq));
      std::string value = trim(line.substr(eq + 1));
      if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front()) {
        value = value.substr(1, value.size() - 2);
      }
      if (!value.empty() && value.front() == '[' && value.back() == ']') {
        std::string list;
        std::istringstream items(value.substr(1, value.size() - 2));
        for (std::string item; std::getline(items, item, ',');) list += (list.empty() ? "" : ",") + trim(item);
        value = list;
      }
      const std::string flag = "--" + key;
      if (has_flag(args, flag)) continue;
      injected.push_back(flag);
      injected.push_back(value);
    }
    args.insert(args.begin() + static_cast<std::ptrdiff_t>(i + consumed), injected.begin(), injected.end());
    break;
  }
  return args;
}

void add_common_options(CLI::App* app, RunConfig& c) {
  static std::string config_file;  // consumed by expand_config before parsing
  app->add_option("--config", config_file, "flat 'key = value' file of long option names; command-line "
                              "flags override it");
  app->add_option("--dataset", c.dataset, "ring | cifar10 | webkb")->capture_default_str();
  app->add_option("--graph", c.graph,
                  "auto | grid | knn-covariance | ring | edge-list (auto: ring for ring, "
                  "16x16 grid for cifar10, hyperlinks for webkb)")
      ->capture_default_str();
  app->add_option("--data-dir", c.data_dir, "CIFAR-10 binary batch directory");
  app->add_option("--webkb-content", c.webkb_content, "WebKB content file");
  app->add_option("--webkb-cites", c.webkb_cites, "WebKB cites file");
  app->add_option("--edge-list", c.edge_list, "edge list file for --graph edge-list");
  app->add_option("--out-dir", c.out_dir, "output directory")->capture_default_str();
  app->add_option("--seed", c.seed, "random seed")->capture_default_str();
  app->add_option("--k", c.k, "number of transforms (slices of S)")->capture_default_str();
  app->add_option("--t-init", c.t_init, "initial softmax temperature")->capture_default_str();
  app->add_option("--t-final", c.t_final, "final softmax temperature")->capture_default_str();
  app->add_option("--steps", c.steps,
                  "optimizer steps (default: 2000 ring, 200 webkb; overrides --epochs)");
  app->add_option("--epochs", c.epochs, "epochs when --steps is unset (default: 10 cifar10)");
  app->add_option("--batch-size", c.batch_size, "mini-batch size, signal mode (default: 64 ring, 32 otherwise)");
  app->add_option("--lr", c.learning_rate, "learning rate (default: 1e-2 ring, 1e-3 otherwise)");
  app->add_option("--optimizer", c.optimizer, "adam | sgd")->capture_default_str();
  app->add_option("--layers", c.layers,
                  "GSL output widths (default: 16 16 ring, 32 64 cifar10, 64 64 webkb)")
      ->delimiter(',');
  app->add_option("--ring-n", c.ring_n, "ring task: vertices")->capture_default_str();
  app->add_option("--ring-classes", c.ring_classes, "ring task: classes")->capture_default_str();
  app->add_option("--ring-samples", c.ring_samples, "ring task: samples per class")->capture_default_str();
  app->add_option("--ring-noise", c.ring_noise, "ring task: noise std")->capture_default_str();
  app->add_option("--cifar-train", c.cifar_train, "CIFAR-10 training images (0 = all)")->capture_default_str();
  app->add_option("--cifar-val", c.cifar_validation, "CIFAR-10 validation images (0 = all)")->capture_default_str();
  app->add_option("--knn", c.knn, "neighbors per vertex for knn-covariance (self included)")->capture_default_str();
  app->add_option("--splits", c.num_splits, "WebKB: number of stratified 60/20/20 splits")->capture_default_str();
  app->add_option("--split-index", c.split_index, "WebKB: which split to train on")->capture_default_str();
}

int report(const std::exception& e, int code) {
  std::cerr << "error: " << e.what() << '\n';
  return code;
}

template <typename F>
int guarded(F&& body) {
  try {
    body();
    return 0;
  } catch (const graphtrans::InvalidArgument& e) {
    return report(e, kUsageError);
  } catch (const graphtrans::IngestionError& e) {
    return report(e, kUsageError);
  } catch (const graphtrans::ParseError& e) {
    return report(e, kUsageError);
  } catch (const std::exception& e) {
    return report(e, 1);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Infer edge-constrained graph signal translations from labeled signals"};
  app.require_subcommand(1);

  RunConfig train_cfg;
  auto* train = app.add_subcommand("train", "train, harden and evaluate; writes checkpoint.json, "
                                            "metrics.csv, transforms.json, eval_report.csv");
  add_common_options(train, train_cfg);

  RunConfig sweep_cfg;
  auto* sweep = app.add_subcommand("sweep", "one training per temperature value; writes sweep.csv");
  add_common_options(sweep, sweep_cfg);
  sweep->add_option("--t-init-grid", sweep_cfg.t_init_grid, "values of t_init (t_final fixed)")
      ->delimiter(',');
  sweep->add_option("--t-final-grid", sweep_cfg.t_final_grid, "values of t_final (t_init fixed)")
      ->delimiter(',');
  sweep->add_option("--repeats", sweep_cfg.repeats, "runs averaged per grid point")->capture_default_str();

  std::filesystem::path viz_transforms;
  std::optional<std::filesystem::path> viz_image;
  std::size_t viz_height = 0;
  std::size_t viz_width = 0;
  std::filesystem::path viz_out = "viz";
  auto* viz = app.add_subcommand("viz", "T<k>.svg arrow fields (and T<k>.ppm with --image)");
  viz->add_option("--transforms", viz_transforms, "transforms.json")->required();
  viz->add_option("--image", viz_image, "P6 image of height x width pixels");
  viz->add_option("--height", viz_height, "grid height")->required();
  viz->add_option("--width", viz_width, "grid width")->required();
  viz->add_option("--out-dir", viz_out, "output directory")->capture_default_str();

  RunConfig eval_cfg;
  std::filesystem::path eval_transforms;
  std::filesystem::path eval_checkpoint;
  std::size_t eval_height = 0;
  std::size_t eval_width = 0;
  auto* eval = app.add_subcommand(
      "eval", "nearest canonical transform per slice (--transforms, --height, --width) and/or "
              "accuracy of a checkpoint on the configured dataset (--checkpoint)");
  add_common_options(eval, eval_cfg);
  eval->add_option("--transforms", eval_transforms, "transforms.json");
  eval->add_option("--checkpoint", eval_checkpoint, "checkpoint.json");
  eval->add_option("--height", eval_height, "grid height");
  eval->add_option("--width", eval_width, "grid width");

  RunConfig export_cfg;
  std::filesystem::path export_path = "graph.txt";
  auto* export_graph = app.add_subcommand("export-graph", "write the configured graph as an edge list");
  add_common_options(export_graph, export_cfg);
  export_graph->add_option("--output", export_path, "edge list path")->capture_default_str();

  try {
    std::vector<std::string> args(argv, argv + argc);
    args = expand_config(std::move(args));
    std::reverse(args.begin() + 1, args.end());
    args.erase(args.begin());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  } catch (const graphtrans::InvalidArgument& e) {
    return report(e, kUsageError);
  }

  if (*train) {
    return guarded([&] { graphtrans::run_train(train_cfg, std::cout); });
  }
  if (*sweep) {
    return guarded([&] { graphtrans::run_sweep(sweep_cfg, std::cout); });
  }
  if (*viz) {
    return guarded([&] {
      graphtrans::run_viz(viz_transforms, viz_image, viz_height, viz_width, viz_out);
    });
  }
  if (*eval) {
    return guarded([&] {
      if (eval_transforms.empty() && eval_checkpoint.empty()) {
        throw graphtrans::InvalidArgument("eval: give --transforms and/or --checkpoint");
      }
      if (!eval_transforms.empty()) {
        const auto hard =
            graphtrans::hard_transforms_from_json(graphtrans::read_file(eval_transforms));
        std::ostringstream report;
        graphtrans::write_eval_report(report, hard, eval_height, eval_width);
        std::filesystem::create_directories(eval_cfg.out_dir);
        graphtrans::write_file(eval_cfg.out_dir / "eval_report.csv", report.str());
        std::cout << report.str();
      }
      if (!eval_checkpoint.empty()) {
        const auto data = graphtrans::prepare_data(eval_cfg);
        const auto ck =
            graphtrans::checkpoint_from_json(graphtrans::read_file(eval_checkpoint), data.graph);
        const auto s = graphtrans::soften(ck.logits, ck.schedule.t_final);
        for (auto kind : {graphtrans::SplitKind::Validation, graphtrans::SplitKind::Test}) {
          const auto& items = data.dataset.indices(kind);
          if (items.empty()) continue;
          std::cout << (kind == graphtrans::SplitKind::Validation ? "validation" : "test")
                    << " accuracy: "
                    << graphtrans::evaluate_accuracy(ck.model, s, data.dataset, items) << '\n';
        }
      }
    });
  }
  if (*export_graph) {
    return guarded([&] {
      const auto data = graphtrans::prepare_data(export_cfg);
      std::ofstream out(export_path);
      if (!out) throw std::runtime_error("cannot write " + export_path.string());
      graphtrans::write_edge_list(out, *data.graph);
    });
  }
  return 0;
}
