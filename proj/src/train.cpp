#include "graphtrans/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "graphtrans/error.hpp"
#include "graphtrans/eval.hpp"

namespace graphtrans {

namespace {

std::size_t argmax(const Matrix& probs, Eigen::Index row) {
  Eigen::Index best = 0;
  probs.row(row).maxCoeff(&best);
  return static_cast<std::size_t>(best);
}

struct LossAccuracy {
  double loss = 0.0;
  double accuracy = 0.0;
};

LossAccuracy measure(const Model& model, const SoftTransforms& s, const Dataset& dataset,
                     std::span<const std::size_t> items) {
  LossAccuracy out;
  if (items.empty()) return out;
  std::size_t correct = 0;
  if (dataset.mode == TaskMode::Vertex) {
    const Matrix probs = model_forward(dataset.signals.front(), model, s);
    for (auto i : items) {
      const auto y = static_cast<std::size_t>(dataset.labels[i]);
      out.loss += cross_entropy({probs.row(static_cast<Eigen::Index>(i)).data(), model.num_classes()}, y);
      correct += argmax(probs, static_cast<Eigen::Index>(i)) == y ? 1 : 0;
    }
  } else {
    constexpr std::size_t kChunk = 256;
    std::vector<const Matrix*> xs;
    for (std::size_t start = 0; start < items.size(); start += kChunk) {
      const std::size_t end = std::min(items.size(), start + kChunk);
      xs.clear();
      for (std::size_t i = start; i < end; ++i) xs.push_back(&dataset.signals[items[i]]);
      const Matrix probs = forward_batch(xs, model, s);
      for (std::size_t i = start; i < end; ++i) {
        const auto row = static_cast<Eigen::Index>(i - start);
        const auto y = static_cast<std::size_t>(dataset.labels[items[i]]);
        out.loss += cross_entropy({probs.row(row).data(), model.num_classes()}, y);
        correct += argmax(probs, row) == y ? 1 : 0;
      }
    }
  }
  out.loss /= static_cast<double>(items.size());
  out.accuracy = static_cast<double>(correct) / static_cast<double>(items.size());
  return out;
}

double validation_accuracy(const Model& model, const SoftTransforms& s, const Dataset& dataset) {
  if (dataset.split.validation.empty()) return std::numeric_limits<double>::quiet_NaN();
  return evaluate_accuracy(model, s, dataset, dataset.split.validation);
}

}  // namespace

void TrainConfig::validate() const {
  schedule.validate();
  if (batch_size == 0) throw InvalidArgument("TrainConfig: batch size must be >= 1");
  if (!(optimizer.learning_rate >= 0.0)) {
    throw InvalidArgument("TrainConfig: learning rate must be non-negative");
  }
  if (num_slices == 0) throw InvalidArgument("TrainConfig: need at least one transform slice");
  if (widths.empty()) throw InvalidArgument("TrainConfig: need at least one GSL");
  for (auto w : widths) {
    if (w == 0) throw InvalidArgument("TrainConfig: layer widths must be positive");
  }
  if (!(logit_init >= 0.0)) throw InvalidArgument("TrainConfig: logit_init must be >= 0");
}

std::size_t steps_for_epochs(std::size_t epochs, std::size_t train_size, std::size_t batch_size) {
  if (batch_size == 0) throw InvalidArgument("steps_for_epochs: batch size must be >= 1");
  return epochs * ((train_size + batch_size - 1) / batch_size);
}

TrainResult train(const Dataset& dataset, std::shared_ptr<const Graph> graph,
                  const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  dataset.validate();
  if (!graph || graph->size() != dataset.num_vertices()) {
    throw InvalidArgument("train: graph vertex count does not match the dataset");
  }
  const auto& train_items = dataset.split.train;
  if (train_items.empty()) throw InvalidArgument("train: empty training set");

  std::mt19937_64 rng(config.seed);
  Model model = Model::zeros(config.num_slices, dataset.channels(), config.widths,
                             dataset.num_classes, dataset.mode);
  initialize(model, rng);
  EdgeLogits logits =
      EdgeLogits::uniform(graph, config.num_slices, -config.logit_init, config.logit_init, rng);
  const auto params = parameter_blocks(model, logits);
  Optimizer optimizer(config.optimizer, params);

  std::vector<EpochRecord> history;
  auto record = [&](EpochRecord rec) {
    history.push_back(rec);
    if (on_epoch) on_epoch(rec);
  };
  {
    const double t0 = temperature_at(0, config.schedule);
    const SoftTransforms s = soften(logits, t0);
    const auto initial = measure(model, s, dataset, train_items);
    record({0, t0, initial.loss, initial.accuracy, validation_accuracy(model, s, dataset)});
  }

  std::vector<int> vertex_labels;
  if (dataset.mode == TaskMode::Vertex) {
    vertex_labels.assign(dataset.num_vertices(), -1);
    for (auto i : train_items) vertex_labels[i] = dataset.labels[i];
  }

  std::vector<std::size_t> order(train_items.begin(), train_items.end());
  std::size_t cursor = 0;
  double epoch_loss = 0.0;
  std::size_t epoch_correct = 0;
  std::size_t epoch_seen = 0;
  std::vector<const Matrix*> batch_x;
  std::vector<int> batch_y;
  const std::size_t total = config.schedule.total_steps;

  for (std::size_t step = 0; step < total; ++step) {
    const double t = temperature_at(step, config.schedule);
    Gradients grads;
    std::size_t seen = 0;
    std::size_t correct = 0;
    try {
      if (dataset.mode == TaskMode::Vertex) {
        grads = backward(dataset.signals.front(), vertex_labels, model, logits, t);
        for (auto i : train_items) {
          correct += argmax(grads.probs, static_cast<Eigen::Index>(i)) ==
                             static_cast<std::size_t>(dataset.labels[i])
                         ? 1
                         : 0;
        }
        seen = train_items.size();
      } else {
        if (cursor == 0) std::shuffle(order.begin(), order.end(), rng);
        const std::size_t end = std::min(order.size(), cursor + config.batch_size);
        batch_x.clear();
        batch_y.clear();
        for (std::size_t i = cursor; i < end; ++i) {
          batch_x.push_back(&dataset.signals[order[i]]);
          batch_y.push_back(dataset.labels[order[i]]);
        }
        grads = backward_batch(batch_x, batch_y, model, logits, t);
        for (std::size_t b = 0; b < batch_y.size(); ++b) {
          correct += argmax(grads.probs, static_cast<Eigen::Index>(b)) ==
                             static_cast<std::size_t>(batch_y[b])
                         ? 1
                         : 0;
        }
        seen = batch_y.size();
        cursor = end == order.size() ? 0 : end;
      }
    } catch (const NumericError&) {
      throw TrainingDiverged(step);
    }
    if (!std::isfinite(grads.loss)) throw TrainingDiverged(step);
    optimizer.step(params, parameter_blocks(grads));

    epoch_loss += grads.loss * static_cast<double>(seen);
    epoch_correct += correct;
    epoch_seen += seen;
    if (cursor == 0 || step + 1 == total) {
      const double t_end = temperature_at(step + 1, config.schedule);
      double val = std::numeric_limits<double>::quiet_NaN();
      try {
        val = validation_accuracy(model, soften(logits, t_end), dataset);
      } catch (const NumericError&) {
        throw TrainingDiverged(step + 1);
      }
      record({step + 1, t_end, epoch_loss / static_cast<double>(epoch_seen),
              static_cast<double>(epoch_correct) / static_cast<double>(epoch_seen), val});
      epoch_loss = 0.0;
      epoch_correct = 0;
      epoch_seen = 0;
    }
  }

  HardTransforms hard = harden(logits);
  return TrainResult{std::move(model), std::move(logits), std::move(hard), std::move(history),
                     std::move(optimizer)};
}

}  // namespace graphtrans
