#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "graphtrans/data.hpp"
#include "graphtrans/nn.hpp"
#include "graphtrans/optimizer.hpp"
#include "graphtrans/transform.hpp"

namespace graphtrans {

struct TrainConfig {
  Schedule schedule;  // schedule.total_steps is the number of optimizer steps
  std::size_t batch_size = 32;
  OptimizerConfig optimizer;
  std::uint64_t seed = 0;
  std::size_t num_slices = 5;
  std::vector<std::size_t> widths = {32, 64};
  double logit_init = 0.01;  // S logits start uniform in [-logit_init, logit_init]

  void validate() const;
};

/// One row of the training history. The first record is taken before any
/// update (step 0, t_init); the rest at the end of each epoch.
struct EpochRecord {
  std::size_t step = 0;
  double temperature = 0.0;
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double validation_accuracy = 0.0;  // NaN when there is no validation split
};

struct TrainResult {
  Model model;
  EdgeLogits logits;
  HardTransforms hard;
  std::vector<EpochRecord> history;
  Optimizer optimizer;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Runs schedule.total_steps optimizer steps. Signal mode draws shuffled
/// mini-batches from the training split; vertex mode uses the full training
/// vertex set every step. Step s uses temperature_at(s, schedule).
/// Deterministic for a given seed.
TrainResult train(const Dataset& dataset, std::shared_ptr<const Graph> graph,
                  const TrainConfig& config, const EpochCallback& on_epoch = {});

/// Optimizer steps needed for `epochs` passes over `train_size` samples.
std::size_t steps_for_epochs(std::size_t epochs, std::size_t train_size, std::size_t batch_size);

}  // namespace graphtrans
