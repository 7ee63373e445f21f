#include "graphtrans/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "graphtrans/error.hpp"

namespace graphtrans {

std::vector<std::size_t> Dataset::labeled_items() const {
  std::vector<std::size_t> items;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= 0) items.push_back(i);
  }
  return items;
}

const std::vector<std::size_t>& Dataset::indices(SplitKind kind) const {
  switch (kind) {
    case SplitKind::Train:
      return split.train;
    case SplitKind::Validation:
      return split.validation;
    case SplitKind::Test:
      return split.test;
  }
  return split.test;
}

void Dataset::validate() const {
  if (signals.empty()) throw InvalidArgument("Dataset: no signals");
  if (num_classes < 2) throw InvalidArgument("Dataset: need at least two classes");
  const auto rows = signals.front().rows();
  const auto cols = signals.front().cols();
  for (const auto& s : signals) {
    if (s.rows() != rows || s.cols() != cols) {
      throw InvalidArgument("Dataset: signals have inconsistent shapes");
    }
  }
  std::size_t items = signals.size();
  if (mode == TaskMode::Vertex) {
    if (signals.size() != 1) throw InvalidArgument("Dataset: vertex mode holds exactly one signal");
    items = static_cast<std::size_t>(rows);
  }
  if (labels.size() != items) throw InvalidArgument("Dataset: label count mismatch");
  for (int y : labels) {
    if (y >= static_cast<int>(num_classes) || (y < 0 && mode == TaskMode::Signal)) {
      throw InvalidArgument("Dataset: label " + std::to_string(y) + " out of range");
    }
  }
  std::unordered_set<std::size_t> seen;
  for (const auto* part : {&split.train, &split.validation, &split.test}) {
    for (auto i : *part) {
      if (i >= items) throw InvalidArgument("Dataset: split index out of range");
      if (labels[i] < 0) throw InvalidArgument("Dataset: split contains an unlabeled item");
      if (!seen.insert(i).second) throw InvalidArgument("Dataset: split sets overlap");
    }
  }
}

// ---------------------------------------------------------------------------
// CIFAR-10

CifarBatch parse_cifar_records(std::span<const std::uint8_t> bytes, std::size_t max_records) {
  if (bytes.size() % kCifarRecordBytes != 0) {
    throw IngestionError("CIFAR-10: truncated record",
                         bytes.size() / kCifarRecordBytes * kCifarRecordBytes);
  }
  std::size_t count = bytes.size() / kCifarRecordBytes;
  if (max_records != 0) count = std::min(count, max_records);
  CifarBatch batch;
  batch.images.reserve(count);
  batch.labels.reserve(count);
  for (std::size_t r = 0; r < count; ++r) {
    const std::size_t offset = r * kCifarRecordBytes;
    const std::uint8_t* rec = bytes.data() + offset;
    if (rec[0] > 9) {
      throw CorruptRecord("CIFAR-10: label byte " + std::to_string(rec[0]) + " exceeds 9", offset);
    }
    Matrix image(static_cast<Eigen::Index>(kCifarPixels), 3);
    for (std::size_t ch = 0; ch < 3; ++ch) {
      const std::uint8_t* plane = rec + 1 + ch * kCifarPixels;
      for (std::size_t p = 0; p < kCifarPixels; ++p) {
        image(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(ch)) = plane[p] / 255.0;
      }
    }
    batch.images.push_back(std::move(image));
    batch.labels.push_back(rec[0]);
  }
  return batch;
}

CifarBatch read_cifar_batch(const std::filesystem::path& file, std::size_t max_records) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IngestionError("CIFAR-10: cannot open " + file.string(), 0);
  std::vector<std::uint8_t> bytes;
  if (max_records != 0) {
    bytes.resize(max_records * kCifarRecordBytes);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    bytes.resize(static_cast<std::size_t>(in.gcount()));
  } else {
    bytes.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  try {
    return parse_cifar_records(bytes, max_records);
  } catch (const CorruptRecord& e) {
    throw CorruptRecord(file.string() + ": " + e.what(), e.offset());
  } catch (const IngestionError& e) {
    throw IngestionError(file.string() + ": " + e.what(), e.offset());
  }
}

Matrix downscale_2x(const Matrix& image, std::size_t height, std::size_t width) {
  if (static_cast<std::size_t>(image.rows()) != height * width || image.cols() != 3 ||
      height % 2 != 0 || width % 2 != 0 || height == 0 || width == 0) {
    throw InvalidArgument("downscale_2x: expected an even-sized " + std::to_string(height) + "x" +
                          std::to_string(width) + "x3 image");
  }
  const std::size_t oh = height / 2;
  const std::size_t ow = width / 2;
  Matrix out(static_cast<Eigen::Index>(oh * ow), 3);
  for (std::size_t r = 0; r < oh; ++r) {
    for (std::size_t c = 0; c < ow; ++c) {
      const auto p = [&](std::size_t dr, std::size_t dc) {
        return image.row(static_cast<Eigen::Index>((2 * r + dr) * width + 2 * c + dc));
      };
      out.row(static_cast<Eigen::Index>(r * ow + c)) = (p(0, 0) + p(0, 1) + p(1, 0) + p(1, 1)) / 4.0;
    }
  }
  return out;
}

Dataset load_cifar10(const std::filesystem::path& dir, const CifarOptions& options) {
  if (!std::filesystem::is_directory(dir)) {
    throw IngestionError("CIFAR-10: directory not found: " + dir.string(), 0);
  }
  const std::size_t wanted_extra =
      std::filesystem::exists(dir / "test_batch.bin") ? 0 : options.max_validation;
  CifarBatch train;
  for (int b = 1; b <= 5; ++b) {
    const auto file = dir / ("data_batch_" + std::to_string(b) + ".bin");
    if (!std::filesystem::exists(file)) {
      if (b == 1) throw IngestionError("CIFAR-10: missing " + file.string(), 0);
      break;
    }
    std::size_t remaining = 0;
    if (options.max_train != 0) {
      const std::size_t target = options.max_train + wanted_extra;
      if (train.images.size() >= target) break;
      remaining = target - train.images.size();
    }
    CifarBatch part = read_cifar_batch(file, remaining);
    std::move(part.images.begin(), part.images.end(), std::back_inserter(train.images));
    train.labels.insert(train.labels.end(), part.labels.begin(), part.labels.end());
  }

  CifarBatch validation;
  const std::size_t n_train = options.max_train == 0
                                  ? train.images.size() - std::min(wanted_extra, train.images.size())
                                  : std::min(options.max_train, train.images.size());
  if (wanted_extra == 0 && std::filesystem::exists(dir / "test_batch.bin")) {
    validation = read_cifar_batch(dir / "test_batch.bin", options.max_validation);
  } else {
    for (std::size_t i = n_train; i < train.images.size(); ++i) {
      validation.images.push_back(std::move(train.images[i]));
      validation.labels.push_back(train.labels[i]);
    }
  }
  train.images.resize(n_train);
  train.labels.resize(n_train);

  Dataset ds;
  ds.mode = TaskMode::Signal;
  ds.num_classes = 10;
  auto add = [&](CifarBatch& batch, std::vector<std::size_t>& split) {
    for (std::size_t i = 0; i < batch.images.size(); ++i) {
      split.push_back(ds.signals.size());
      ds.signals.push_back(options.downscale ? downscale_2x(batch.images[i])
                                             : std::move(batch.images[i]));
      ds.labels.push_back(batch.labels[i]);
    }
  };
  add(train, ds.split.train);
  add(validation, ds.split.validation);
  return ds;
}

Matrix channel_mean_samples(const Dataset& dataset, std::span<const std::size_t> items) {
  Matrix out(static_cast<Eigen::Index>(items.size()),
             static_cast<Eigen::Index>(dataset.num_vertices()));
  for (std::size_t r = 0; r < items.size(); ++r) {
    out.row(static_cast<Eigen::Index>(r)) =
        dataset.signals.at(items[r]).rowwise().mean().transpose();
  }
  return out;
}

// ---------------------------------------------------------------------------
// WebKB

WebkbData parse_webkb(std::istream& content, std::istream& cites) {
  WebkbData out;
  std::unordered_map<std::string, std::size_t> index;
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::size_t width = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(content, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::vector<std::string> tokens;
    for (std::string tok; fields >> tok;) tokens.push_back(std::move(tok));
    if (tokens.empty()) continue;
    if (tokens.size() < 3) throw IngestionError("WebKB content: too few fields", line_no);
    const std::size_t w = tokens.size() - 2;
    if (width == 0) width = w;
    if (w != width) {
      throw IngestionError("WebKB content: expected " + std::to_string(width) +
                               " features, got " + std::to_string(w),
                           line_no);
    }
    const auto cls = std::find(kWebkbClasses.begin(), kWebkbClasses.end(), tokens.back());
    if (cls == kWebkbClasses.end()) {
      throw IngestionError("WebKB content: unknown class '" + tokens.back() + "'", line_no);
    }
    std::vector<double> features(w);
    for (std::size_t f = 0; f < w; ++f) {
      const auto& tok = tokens[f + 1];
      if (tok != "0" && tok != "1") {
        throw IngestionError("WebKB content: non-binary feature '" + tok + "'", line_no);
      }
      features[f] = tok == "1" ? 1.0 : 0.0;
    }
    if (!index.emplace(tokens.front(), rows.size()).second) {
      throw IngestionError("WebKB content: duplicate page id '" + tokens.front() + "'", line_no);
    }
    out.page_ids.push_back(tokens.front());
    rows.push_back(std::move(features));
    labels.push_back(static_cast<int>(cls - kWebkbClasses.begin()));
  }
  if (rows.empty()) throw IngestionError("WebKB content: no pages", 0);

  std::vector<std::pair<Vertex, Vertex>> edges;
  line_no = 0;
  while (std::getline(cites, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string a;
    std::string b;
    if (!(fields >> a)) continue;
    if (!(fields >> b)) throw IngestionError("WebKB cites: expected two page ids", line_no);
    auto ia = index.find(a);
    auto ib = index.find(b);
    if (ia == index.end() || ib == index.end()) {
      ++out.dropped_citations;
      continue;
    }
    edges.emplace_back(ia->second, ib->second);
  }

  const std::size_t n = rows.size();
  Matrix features(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t f = 0; f < width; ++f) {
      features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(f)) = rows[i][f];
    }
  }
  out.dataset.mode = TaskMode::Vertex;
  out.dataset.num_classes = kWebkbClasses.size();
  out.dataset.signals.push_back(std::move(features));
  out.dataset.labels = std::move(labels);
  out.graph = Graph::from_edges(n, edges, true);
  return out;
}

WebkbData load_webkb(const std::filesystem::path& content_path,
                     const std::filesystem::path& cites_path) {
  std::ifstream content(content_path);
  if (!content) throw IngestionError("WebKB: cannot open " + content_path.string(), 0);
  std::ifstream cites(cites_path);
  if (!cites) throw IngestionError("WebKB: cannot open " + cites_path.string(), 0);
  return parse_webkb(content, cites);
}

// ---------------------------------------------------------------------------
// Synthetic ring task

Vector rotate(const Vector& x, std::size_t shift) {
  const auto n = static_cast<std::size_t>(x.size());
  Vector out(x.size());
  for (std::size_t i = 0; i < n; ++i) out[static_cast<Eigen::Index>((i + shift) % n)] = x[static_cast<Eigen::Index>(i)];
  return out;
}

namespace {

bool rotation_equivalent(const Vector& a, const Vector& b) {
  const auto n = static_cast<std::size_t>(a.size());
  for (std::size_t shift = 0; shift < n; ++shift) {
    if (rotate(a, shift) == b) return true;
  }
  return false;
}

}  // namespace

RingTask make_ring_task(std::size_t n, std::size_t num_classes, std::size_t samples_per_class,
                        double noise_std, std::uint64_t seed) {
  if (n < 4) throw InvalidArgument("make_ring_task: n must be >= 4");
  if (num_classes < 2) throw InvalidArgument("make_ring_task: need at least two classes");
  if (samples_per_class == 0) throw InvalidArgument("make_ring_task: samples_per_class must be > 0");
  if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) {
    throw InvalidArgument("make_ring_task: noise_std must be finite and non-negative");
  }
  std::mt19937_64 rng(seed);
  RingTask task;
  task.graph = build_ring_graph(n, true);

  Vector base(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    base[static_cast<Eigen::Index>(i)] = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  // Classes come in mirror-image pairs, so telling them apart needs the
  // orientation of the ring and not only which values are adjacent.
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  auto is_new = [&task](const Vector& w) {
    return std::none_of(task.waveforms.begin(), task.waveforms.end(),
                        [&w](const Vector& other) { return rotation_equivalent(w, other); });
  };
  for (std::size_t attempts = 0; task.waveforms.size() < num_classes; ++attempts) {
    if (attempts > 10000) throw InvalidArgument("make_ring_task: cannot draw distinct waveforms");
    std::shuffle(perm.begin(), perm.end(), rng);
    Vector w(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) w[static_cast<Eigen::Index>(i)] = base[static_cast<Eigen::Index>(perm[i])];
    const Vector mirrored = w.reverse();
    if (!is_new(w) || !is_new(mirrored) || rotation_equivalent(w, mirrored)) continue;
    task.waveforms.push_back(w);
    if (task.waveforms.size() < num_classes) task.waveforms.push_back(mirrored);
  }

  Dataset& ds = task.dataset;
  ds.mode = TaskMode::Signal;
  ds.num_classes = num_classes;
  std::uniform_int_distribution<std::size_t> shift_dist(0, n - 1);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (std::size_t cls = 0; cls < num_classes; ++cls) {
    for (std::size_t s = 0; s < samples_per_class; ++s) {
      Vector x = rotate(task.waveforms[cls], shift_dist(rng));
      if (noise_std > 0.0) {
        for (Eigen::Index i = 0; i < x.size(); ++i) x[i] += noise_std * noise(rng);
      }
      ds.signals.emplace_back(x);
      ds.labels.push_back(static_cast<int>(cls));
    }
  }
  ds.split = make_splits(ds, {0.8, 0.1, 0.1}, 1, seed ^ 0x9e3779b97f4a7c15ULL).front();
  return task;
}

// ---------------------------------------------------------------------------
// Splits and export

std::vector<Split> make_splits(const Dataset& dataset, std::array<double, 3> ratios,
                               std::size_t num_splits, std::uint64_t seed) {
  for (double r : ratios) {
    if (!(r >= 0.0)) throw InvalidArgument("make_splits: ratios must be non-negative");
  }
  if (std::abs(ratios[0] + ratios[1] + ratios[2] - 1.0) > 1e-9) {
    throw InvalidArgument("make_splits: ratios must sum to 1");
  }
  if (num_splits == 0) throw InvalidArgument("make_splits: num_splits must be >= 1");
  const std::size_t parts = static_cast<std::size_t>(std::count_if(
      ratios.begin(), ratios.end(), [](double r) { return r > 0.0; }));

  std::vector<std::vector<std::size_t>> by_class(dataset.num_classes);
  for (auto i : dataset.labeled_items()) by_class.at(static_cast<std::size_t>(dataset.labels[i])).push_back(i);
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    if (!by_class[c].empty() && by_class[c].size() < parts) {
      throw InvalidArgument("make_splits: class " + std::to_string(c) + " has " +
                            std::to_string(by_class[c].size()) + " items, fewer than the " +
                            std::to_string(parts) + " split sets");
    }
  }

  std::mt19937_64 rng(seed);
  std::vector<Split> splits(num_splits);
  for (auto& split : splits) {
    for (auto members : by_class) {
      if (members.empty()) continue;
      std::shuffle(members.begin(), members.end(), rng);
      const auto count = static_cast<double>(members.size());
      std::array<std::size_t, 3> sizes{};
      sizes[0] = static_cast<std::size_t>(std::llround(ratios[0] * count));
      sizes[1] = static_cast<std::size_t>(std::llround(ratios[1] * count));
      // Every non-empty part gets at least one item of each class.
      for (std::size_t p = 0; p < 2; ++p) {
        if (ratios[p] > 0.0) sizes[p] = std::max<std::size_t>(sizes[p], 1);
      }
      const std::size_t reserve_test = ratios[2] > 0.0 ? 1 : 0;
      while (sizes[0] + sizes[1] + reserve_test > members.size()) {
        (sizes[0] >= sizes[1] ? sizes[0] : sizes[1])--;
      }
      sizes[2] = members.size() - sizes[0] - sizes[1];
      auto it = members.begin();
      for (std::size_t p = 0; p < 3; ++p) {
        auto& dst = p == 0 ? split.train : p == 1 ? split.validation : split.test;
        dst.insert(dst.end(), it, it + static_cast<std::ptrdiff_t>(sizes[p]));
        it += static_cast<std::ptrdiff_t>(sizes[p]);
      }
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.validation.begin(), split.validation.end());
    std::sort(split.test.begin(), split.test.end());
  }
  return splits;
}

void write_dataset_csv(const Dataset& dataset, std::ostream& values, std::ostream& labels) {
  values << "sample_id,vertex,channel,value\n" << std::setprecision(17);
  for (std::size_t s = 0; s < dataset.signals.size(); ++s) {
    const Matrix& x = dataset.signals[s];
    for (Eigen::Index v = 0; v < x.rows(); ++v) {
      for (Eigen::Index c = 0; c < x.cols(); ++c) {
        values << s << ',' << v << ',' << c << ',' << x(v, c) << '\n';
      }
    }
  }
  labels << "sample_id,label\n";
  for (std::size_t i = 0; i < dataset.labels.size(); ++i) {
    labels << i << ',' << dataset.labels[i] << '\n';
  }
}

}  // namespace graphtrans
