#include "graphtrans/pipeline.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "graphtrans/checkpoint.hpp"
#include "graphtrans/error.hpp"
#include "graphtrans/viz.hpp"

namespace graphtrans {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("graphtrans_pipeline_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

RunConfig tiny_ring(const fs::path& out) {
  RunConfig c;
  c.dataset = "ring";
  c.ring_n = 8;
  c.ring_classes = 2;
  c.ring_samples = 20;
  c.k = 3;
  c.steps = 30;
  c.layers = {4, 4};
  c.out_dir = out;
  c.seed = 5;
  return c;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(GRAPHTRANS_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(ResolveDefaults, PerDataset) {
  RunConfig c;
  const RunConfig ring = resolve_defaults(c);
  EXPECT_EQ(ring.layers, (std::vector<std::size_t>{16, 16}));
  EXPECT_EQ(ring.steps, 2000u);
  EXPECT_EQ(ring.batch_size, 64u);
  EXPECT_EQ(ring.learning_rate, 1e-2);
  c.learning_rate = 5e-4;
  EXPECT_EQ(resolve_defaults(c).learning_rate, 5e-4);
  c.learning_rate.reset();
  c.dataset = "webkb";
  const RunConfig w = resolve_defaults(c);
  EXPECT_EQ(w.layers, (std::vector<std::size_t>{64, 64}));
  EXPECT_EQ(w.steps, 200u);
  c.dataset = "cifar10";
  const RunConfig cf = resolve_defaults(c);
  EXPECT_EQ(cf.layers, (std::vector<std::size_t>{32, 64}));
  EXPECT_EQ(cf.epochs, 10u);
  EXPECT_EQ(cf.batch_size, 32u);
  EXPECT_EQ(cf.learning_rate, 1e-3);
  c.dataset = "mnist";
  EXPECT_THROW(resolve_defaults(c), InvalidArgument);
}

TEST(RunTrain, WritesArtifacts) {
  const fs::path out = scratch("artifacts");
  std::ostringstream log;
  const TrainSummary summary = run_train(tiny_ring(out), log);
  for (const char* name : {"checkpoint.json", "metrics.csv", "transforms.json"}) {
    EXPECT_TRUE(fs::exists(out / name)) << name;
  }
  EXPECT_FALSE(fs::exists(out / "eval_report.csv"));

  const auto transforms = nlohmann::json::parse(read_file(out / "transforms.json"));
  ASSERT_EQ(transforms["targets"].size(), 3u);
  for (const auto& row : transforms["targets"]) EXPECT_EQ(row.size(), 8u);

  const auto metrics = lines(read_file(out / "metrics.csv"));
  ASSERT_EQ(metrics.front(), "step,temperature,train_loss,train_acc,val_acc");
  EXPECT_EQ(metrics.size(), summary.result.history.size() + 1);
  EXPECT_EQ(metrics[1].rfind("0,10,", 0), 0u);
  EXPECT_EQ(metrics.back().rfind("30,0.01,", 0), 0u);

  EXPECT_GE(summary.validation_accuracy, 0.0);
  EXPECT_LE(summary.validation_accuracy, 1.0);
  EXPECT_NE(log.str().find("validation accuracy"), std::string::npos);
}

TEST(RunTrain, ByteIdenticalRerun) {
  const fs::path a = scratch("det_a");
  const fs::path b = scratch("det_b");
  std::ostringstream log;
  run_train(tiny_ring(a), log);
  run_train(tiny_ring(b), log);
  for (const char* name : {"transforms.json", "metrics.csv", "checkpoint.json"}) {
    EXPECT_EQ(read_file(a / name), read_file(b / name)) << name;
  }
}

TEST(RunTrain, GridGraphWritesEvalReport) {
  const fs::path out = scratch("grid");
  RunConfig c = tiny_ring(out);
  c.ring_n = 9;
  c.graph = "grid";
  std::ostringstream log;
  const TrainSummary summary = run_train(c, log);
  ASSERT_TRUE(summary.mean_distance.has_value());
  const auto report = lines(read_file(out / "eval_report.csv"));
  EXPECT_EQ(report.front(), "k,nearest_name,distance");
  EXPECT_EQ(report.size(), 5u);
  EXPECT_EQ(report.back().rfind("mean,,", 0), 0u);
}

TEST(Checkpoint, RoundTripsParametersAndOptimizerState) {
  const fs::path out = scratch("checkpoint");
  RunConfig c = tiny_ring(out);
  std::ostringstream log;
  const TrainSummary summary = run_train(c, log);
  const PreparedData data = prepare_data(c);
  const Checkpoint ck = checkpoint_from_json(read_file(out / "checkpoint.json"), data.graph);
  EXPECT_EQ(ck.logits.values(), summary.result.logits.values());
  EXPECT_EQ(ck.model.fc_weight, summary.result.model.fc_weight);
  EXPECT_EQ(ck.model.layers[1].weights[2], summary.result.model.layers[1].weights[2]);
  EXPECT_EQ(ck.step, 30u);
  EXPECT_EQ(ck.schedule.total_steps, 30u);
  EXPECT_EQ(ck.optimizer_steps, 30u);
  EXPECT_EQ(ck.first_moments, summary.result.optimizer.first_moments());
  EXPECT_EQ(ck.second_moments, summary.result.optimizer.second_moments());

  auto other = std::make_shared<const Graph>(build_ring_graph(8, false));
  EXPECT_THROW(checkpoint_from_json(read_file(out / "checkpoint.json"), other), ParseError);
  EXPECT_THROW(checkpoint_from_json("{\"format\": \"x\"}", data.graph), ParseError);
}

TEST(RunSweep, OneRowPerGridValue) {
  const fs::path out = scratch("sweep");
  RunConfig c = tiny_ring(out);
  c.ring_n = 9;
  c.graph = "grid";
  c.steps = 10;
  c.t_final_grid = {1e-4, 0.1, 10};
  std::ostringstream log;
  run_sweep(c, log);
  const auto rows = lines(read_file(out / "sweep.csv"));
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0],
            "t_init,t_final,accuracy,distance_identity,distance_up,distance_down,distance_dilation,"
            "distance_mean");
  EXPECT_EQ(rows[1].rfind("10,0.0001,", 0), 0u);
  EXPECT_EQ(rows[3].rfind("10,10,", 0), 0u);
}

TEST(RunSweep, RejectsBadGridsBeforeTraining) {
  const fs::path out = scratch("sweep_bad");
  RunConfig c = tiny_ring(out);
  std::ostringstream log;
  EXPECT_THROW(run_sweep(c, log), InvalidArgument);
  c.t_init_grid = {1.0};
  c.t_final_grid = {0.1};
  EXPECT_THROW(run_sweep(c, log), InvalidArgument);
  EXPECT_TRUE(log.str().empty());
  EXPECT_FALSE(fs::exists(out / "sweep.csv"));
}

TEST(RunViz, NamesFilesPerSlice) {
  const fs::path out = scratch("viz");
  const HardTransforms hard{4, {{0, 1, 2, 3}, {1, 1, 3, 3}, {0, 0, 2, 2}, {2, 3, 2, 3}, {0, 1, 0, 1}}};
  write_file(out / "transforms.json", hard_transforms_to_json(hard));
  Matrix img = Matrix::Constant(4, 3, 0.5);
  write_file(out / "image.ppm", encode_ppm(img, 2, 2));
  run_viz(out / "transforms.json", std::nullopt, 2, 2, out / "svg_only");
  run_viz(out / "transforms.json", out / "image.ppm", 2, 2, out / "with_image");
  for (int k = 0; k < 5; ++k) {
    const std::string stem = "T" + std::to_string(k);
    EXPECT_TRUE(fs::exists(out / "svg_only" / (stem + ".svg")));
    EXPECT_FALSE(fs::exists(out / "svg_only" / (stem + ".ppm")));
    EXPECT_TRUE(fs::exists(out / "with_image" / (stem + ".svg")));
    EXPECT_TRUE(fs::exists(out / "with_image" / (stem + ".ppm")));
  }
  EXPECT_THROW(run_viz(out / "transforms.json", std::nullopt, 3, 2, out / "bad"), InvalidArgument);
  write_file(out / "broken.json", "{\"n\": 4, \"k\": ");
  EXPECT_THROW(run_viz(out / "broken.json", std::nullopt, 2, 2, out / "bad"), ParseError);
}

TEST(PrepareData, MissingPathsAreRejected) {
  RunConfig c;
  c.dataset = "cifar10";
  c.data_dir = "/nonexistent/cifar";
  EXPECT_THROW(prepare_data(c), IngestionError);
  c.dataset = "webkb";
  c.webkb_content = "/nonexistent/webkb.content";
  c.webkb_cites = "/nonexistent/webkb.cites";
  EXPECT_THROW(prepare_data(c), IngestionError);
}

TEST(PrepareData, EdgeListGraph) {
  const fs::path out = scratch("edges");
  std::ofstream(out / "ring.edges") << "# n 8\n0 0\n1 1\n2 2\n3 3\n4 4\n5 5\n6 6\n7 7\n"
                                    << "0 1\n1 2\n2 3\n3 4\n4 5\n5 6\n6 7\n7 0\n";
  RunConfig c = tiny_ring(out);
  c.graph = "edge-list";
  c.edge_list = out / "ring.edges";
  EXPECT_EQ(*prepare_data(c).graph, build_ring_graph(8, true));
  c.edge_list = out / "missing.edges";
  EXPECT_THROW(prepare_data(c), IngestionError);
}

TEST(Cli, ExitCodes) {
  const fs::path out = scratch("cli");
  EXPECT_EQ(run_cli("train --dataset cifar10 --data-dir /nonexistent/cifar --out-dir " + out.string()), 2);
  EXPECT_EQ(run_cli("train --no-such-flag"), 2);
  EXPECT_EQ(run_cli("sweep --out-dir " + out.string()), 2);
  EXPECT_EQ(run_cli("train --ring-n 9 --graph grid --ring-classes 2 --ring-samples 10 --steps 5 "
                    "--layers 4 --k 3 --out-dir " + out.string()),
            0);
  EXPECT_TRUE(fs::exists(out / "transforms.json"));
  EXPECT_TRUE(fs::exists(out / "eval_report.csv"));
  EXPECT_EQ(run_cli("viz --transforms " + (out / "transforms.json").string() +
                    " --height 3 --width 3 --out-dir " + (out / "viz").string()),
            0);
  EXPECT_EQ(run_cli("viz --transforms " + (out / "transforms.json").string() +
                    " --height 2 --width 4 --out-dir " + (out / "viz_bad").string()),
            2);
  EXPECT_TRUE(fs::exists(out / "viz" / "T2.svg"));
  EXPECT_EQ(run_cli("export-graph --ring-n 8 --output " + (out / "g.edges").string()), 0);
  EXPECT_TRUE(fs::exists(out / "g.edges"));
}

TEST(Cli, ConfigFileWithOverrides) {
  const fs::path out = scratch("cli_config");
  std::ofstream(out / "run.cfg") << "ring-n = 8\nring-classes = 2\nring-samples = 10\nsteps = 5\n"
                                 << "layers = [4]\nk = 2\nseed = 3\n";
  const std::string base = "train --config " + (out / "run.cfg").string() + " --out-dir ";
  ASSERT_EQ(run_cli(base + (out / "a").string()), 0);
  ASSERT_EQ(run_cli(base + (out / "b").string() + " --k 3"), 0);
  const auto a = nlohmann::json::parse(read_file(out / "a" / "transforms.json"));
  const auto b = nlohmann::json::parse(read_file(out / "b" / "transforms.json"));
  EXPECT_EQ(a["n"], 8);
  EXPECT_EQ(a["k"], 2);
  EXPECT_EQ(b["k"], 3);
}

}  // namespace
}  // namespace graphtrans
