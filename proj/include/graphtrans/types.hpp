#pragma once

#include <cstddef>
#include <Eigen/Dense>

namespace graphtrans {

/// Dense row-major matrix. Signals are stored as N x C (one row per vertex).
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

using Vertex = std::size_t;

/// Signal mode: one labeled graph signal per sample, pooled before the head.
/// Vertex mode: a single signal whose vertices carry the labels.
enum class TaskMode { Signal, Vertex };

}  // namespace graphtrans
