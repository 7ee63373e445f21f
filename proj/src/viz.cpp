#include "graphtrans/viz.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "graphtrans/error.hpp"

namespace graphtrans {

namespace {

constexpr double kCell = 24.0;

}  // namespace

const char* to_string(Direction d) {
  switch (d) {
    case Direction::Self:
      return "self";
    case Direction::Up:
      return "up";
    case Direction::Down:
      return "down";
    case Direction::Left:
      return "left";
    case Direction::Right:
      return "right";
  }
  return "self";
}

std::size_t ArrowField::count(Direction d) const {
  return static_cast<std::size_t>(std::count(displacement.begin(), displacement.end(), d));
}

ArrowField arrow_field(std::span<const Vertex> target, std::size_t height, std::size_t width) {
  if (height == 0 || width == 0 || target.size() != height * width) {
    throw InvalidArgument("arrow_field: transform has " + std::to_string(target.size()) +
                          " vertices, expected " + std::to_string(height) + "x" +
                          std::to_string(width));
  }
  ArrowField field{height, width, {}, Direction::Self};
  field.displacement.reserve(target.size());
  for (std::size_t i = 0; i < target.size(); ++i) {
    const std::size_t r = i / width;
    const std::size_t c = i % width;
    const Vertex t = target[i];
    Direction d;
    if (t == i) {
      d = Direction::Self;
    } else if (r > 0 && t == i - width) {
      d = Direction::Up;
    } else if (r + 1 < height && t == i + width) {
      d = Direction::Down;
    } else if (c > 0 && t == i - 1) {
      d = Direction::Left;
    } else if (c + 1 < width && t == i + 1) {
      d = Direction::Right;
    } else {
      throw InvalidArgument("arrow_field: target of pixel " + std::to_string(i) +
                            " is not a grid neighbor");
    }
    field.displacement.push_back(d);
  }
  std::size_t best = 0;
  for (Direction d : kDirections) {
    const std::size_t n = field.count(d);
    if (n > best) {
      best = n;
      field.majority = d;
    }
  }
  return field;
}

std::string arrow_field_svg(std::span<const Vertex> target, std::size_t height, std::size_t width) {
  const ArrowField field = arrow_field(target, height, width);
  const double w = kCell * static_cast<double>(width);
  const double h = kCell * static_cast<double>(height);
  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << w
      << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n"
      << "  <rect x=\"0\" y=\"0\" width=\"" << w << "\" height=\"" << h
      << "\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < target.size(); ++i) {
    const Direction d = field.displacement[i];
    const bool highlight = d == field.majority;
    const char* color = highlight ? "#d62728" : "#7f7f7f";
    const double cx = kCell * (static_cast<double>(i % width) + 0.5);
    const double cy = kCell * (static_cast<double>(i / width) + 0.5);
    svg << "  <g class=\"glyph " << to_string(d) << (highlight ? " majority" : "") << "\">";
    if (d == Direction::Self) {
      svg << "<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"3\" fill=\"" << color << "\"/>";
    } else {
      double dx = 0.0;
      double dy = 0.0;
      if (d == Direction::Up) dy = -1.0;
      if (d == Direction::Down) dy = 1.0;
      if (d == Direction::Left) dx = -1.0;
      if (d == Direction::Right) dx = 1.0;
      const double half = 0.35 * kCell;
      const double x0 = cx - dx * half;
      const double y0 = cy - dy * half;
      const double x1 = cx + dx * half;
      const double y1 = cy + dy * half;
      const double head = 0.2 * kCell;
      // Arrow head: tip at (x1, y1), base perpendicular to the shaft.
      const double bx = x1 - dx * head;
      const double by = y1 - dy * head;
      const double px = -dy * head * 0.5;
      const double py = dx * head * 0.5;
      svg << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << bx << "\" y2=\"" << by
          << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>"
          << "<polygon points=\"" << x1 << ',' << y1 << ' ' << bx + px << ',' << by + py << ' '
          << bx - px << ',' << by - py << "\" fill=\"" << color << "\"/>";
    }
    svg << "</g>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string encode_ppm(const Matrix& image, std::size_t height, std::size_t width) {
  if (height == 0 || width == 0 || static_cast<std::size_t>(image.rows()) != height * width ||
      image.cols() != 3) {
    throw InvalidArgument("encode_ppm: image must be (height*width) x 3");
  }
  std::string out = "P6\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  out.reserve(out.size() + image.size());
  for (Eigen::Index p = 0; p < image.rows(); ++p) {
    for (Eigen::Index ch = 0; ch < 3; ++ch) {
      const double v = std::clamp(image(p, ch), 0.0, 1.0);
      out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0))));
    }
  }
  return out;
}

Matrix decode_ppm(const std::string& bytes, std::size_t* height, std::size_t* width) {
  std::istringstream in(bytes);
  std::string magic;
  std::size_t w = 0;
  std::size_t h = 0;
  int maxval = 0;
  if (!(in >> magic >> w >> h >> maxval) || magic != "P6" || maxval != 255) {
    throw ParseError("decode_ppm: expected a P6 header with maxval 255");
  }
  in.get();
  const auto start = static_cast<std::size_t>(in.tellg());
  if (bytes.size() < start + 3 * w * h) throw ParseError("decode_ppm: truncated pixel data");
  Matrix image(static_cast<Eigen::Index>(w * h), 3);
  for (std::size_t i = 0; i < 3 * w * h; ++i) {
    image.data()[i] = static_cast<unsigned char>(bytes[start + i]) / 255.0;
  }
  if (height) *height = h;
  if (width) *width = w;
  return image;
}

std::string translated_image_ppm(const HardTransforms& hard, std::size_t k, const Matrix& image,
                                 std::size_t height, std::size_t width) {
  if (height == 0 || width == 0 || hard.n != height * width ||
      static_cast<std::size_t>(image.rows()) != hard.n || image.cols() != 3) {
    throw InvalidArgument("translated_image_ppm: image and transform must both cover a " +
                          std::to_string(height) + "x" + std::to_string(width) + " grid");
  }
  return encode_ppm(apply_hard(hard, k, image), height, width);
}

}  // namespace graphtrans
