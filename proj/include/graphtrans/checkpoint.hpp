#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "graphtrans/nn.hpp"
#include "graphtrans/optimizer.hpp"
#include "graphtrans/transform.hpp"

namespace graphtrans {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  Model model;
  EdgeLogits logits;
  Schedule schedule;
  std::size_t step = 0;
  OptimizerConfig optimizer;
  std::size_t optimizer_steps = 0;
  std::vector<std::vector<double>> first_moments;
  std::vector<std::vector<double>> second_moments;
};

/// JSON container holding the graph hash, every parameter tensor, the
/// optimizer state, the step counter and the temperature schedule.
std::string checkpoint_to_json(const Model& model, const EdgeLogits& logits,
                               const Schedule& schedule, std::size_t step,
                               const Optimizer& optimizer);

/// Throws ParseError on malformed input or when the stored graph hash does
/// not match `graph`.
Checkpoint checkpoint_from_json(const std::string& text, std::shared_ptr<const Graph> graph);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace graphtrans
