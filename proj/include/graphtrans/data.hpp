#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "graphtrans/graph.hpp"
#include "graphtrans/types.hpp"

namespace graphtrans {

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
};

enum class SplitKind { Train, Validation, Test };

/// Labeled graph signals.
///
/// Signal mode: `signals` holds one N x C matrix per sample and `labels` one
/// class per sample; split indices refer to samples. Vertex mode: `signals`
/// holds exactly one matrix, `labels` has one entry per vertex (-1 when
/// unlabeled) and split indices refer to vertices.
struct Dataset {
  TaskMode mode = TaskMode::Signal;
  std::vector<Matrix> signals;
  std::vector<int> labels;
  std::size_t num_classes = 0;
  Split split;

  std::size_t num_vertices() const { return signals.empty() ? 0 : signals.front().rows(); }
  std::size_t channels() const { return signals.empty() ? 0 : signals.front().cols(); }
  /// Samples (signal mode) or vertices (vertex mode) that carry a label.
  std::vector<std::size_t> labeled_items() const;
  const std::vector<std::size_t>& indices(SplitKind kind) const;

  /// Checks label ranges, shape consistency and split disjointness.
  void validate() const;
};

// ---------------------------------------------------------------------------
// CIFAR-10

inline constexpr std::size_t kCifarSide = 32;
inline constexpr std::size_t kCifarPixels = kCifarSide * kCifarSide;
inline constexpr std::size_t kCifarRecordBytes = 1 + 3 * kCifarPixels;

struct CifarBatch {
  std::vector<Matrix> images;  // 1024 x 3, values in [0, 1]
  std::vector<int> labels;
};

/// Parses concatenated 3073-byte records: one label byte then the R, G and
/// B planes, each 32 x 32 row-major. Pixel (r, c) becomes row r * 32 + c.
/// Stops after `max_records` records when non-zero.
CifarBatch parse_cifar_records(std::span<const std::uint8_t> bytes, std::size_t max_records = 0);
CifarBatch read_cifar_batch(const std::filesystem::path& file, std::size_t max_records = 0);

struct CifarOptions {
  std::size_t max_train = 0;  // 0 keeps everything
  std::size_t max_validation = 0;
  bool downscale = true;  // 32x32 -> 16x16
};

/// Loads data_batch_1.bin ... data_batch_5.bin (at least the first must
/// exist) as the training split. Validation comes from test_batch.bin when
/// present, otherwise from training records past max_train.
Dataset load_cifar10(const std::filesystem::path& dir, const CifarOptions& options = {});

/// Mean of each non-overlapping 2x2 block, per channel. Input is a
/// 32 x 32 image stored as 1024 x 3 (row-major pixels).
Matrix downscale_2x(const Matrix& image, std::size_t height = kCifarSide,
                    std::size_t width = kCifarSide);

/// Per-sample channel-averaged intensities as an M x N matrix, for building
/// covariance graphs.
Matrix channel_mean_samples(const Dataset& dataset, std::span<const std::size_t> items);

// ---------------------------------------------------------------------------
// WebKB

/// Class names in label order.
inline const std::array<std::string, 5> kWebkbClasses = {"student", "project", "course", "staff",
                                                         "faculty"};

struct WebkbData {
  Dataset dataset;
  Graph graph;
  std::size_t dropped_citations = 0;
  std::vector<std::string> page_ids;
};

/// content: "<page-id> <binary features...> <class>" per line.
/// cites:   "<page-id> <page-id>" per line; unknown ids are dropped.
/// The hyperlink graph is symmetrized and self-looped.
WebkbData load_webkb(const std::filesystem::path& content_path,
                     const std::filesystem::path& cites_path);
WebkbData parse_webkb(std::istream& content, std::istream& cites);

// ---------------------------------------------------------------------------
// Synthetic ring task

struct RingTask {
  Dataset dataset;
  Graph graph;
  std::vector<Vector> waveforms;  // one base waveform per class
};

/// Each class owns a distinct arrangement of the same value set on the
/// ring, so only the order of values separates classes. Consecutive classes
/// are mirror images of each other; no two are equal up to rotation.
/// Samples are random circular shifts of their class waveform plus Gaussian
/// noise.
/// Stratified 80/10/10 split.
RingTask make_ring_task(std::size_t n, std::size_t num_classes, std::size_t samples_per_class,
                        double noise_std, std::uint64_t seed);

/// Circular shift: out[(i + shift) mod n] = x[i].
Vector rotate(const Vector& x, std::size_t shift);

// ---------------------------------------------------------------------------
// Splits and export

/// Stratified random train/validation/test assignments over the labeled
/// items. Per class, the first two parts get round(ratio * count) items and
/// the test part the remainder.
std::vector<Split> make_splits(const Dataset& dataset, std::array<double, 3> ratios,
                               std::size_t num_splits, std::uint64_t seed);

/// values CSV: sample_id,vertex,channel,value. labels CSV: sample_id,label.
void write_dataset_csv(const Dataset& dataset, std::ostream& values, std::ostream& labels);

}  // namespace graphtrans
