#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "graphtrans/transform.hpp"
#include "graphtrans/types.hpp"

namespace graphtrans {

enum class Direction { Self, Up, Down, Left, Right };

inline constexpr std::array<Direction, 5> kDirections = {Direction::Self, Direction::Up,
                                                         Direction::Down, Direction::Left,
                                                         Direction::Right};

const char* to_string(Direction d);

/// Per-pixel displacement of a hard transform on a height x width grid.
struct ArrowField {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<Direction> displacement;
  /// Most frequent displacement; ties follow kDirections order.
  Direction majority = Direction::Self;

  std::size_t count(Direction d) const;
};

/// Throws InvalidArgument unless every target is the pixel itself or one of
/// its 4-neighbors.
ArrowField arrow_field(std::span<const Vertex> target, std::size_t height, std::size_t width);

/// Standalone SVG: an arrow per pixel toward its target, a dot for fixed
/// pixels. Glyphs in the majority direction are highlighted.
std::string arrow_field_svg(std::span<const Vertex> target, std::size_t height, std::size_t width);

/// Binary PPM (P6, maxval 255) of apply_hard(hard, k, image). Collisions are
/// summed, then every channel is clamped to [0, 1] and rounded to 8 bits.
std::string translated_image_ppm(const HardTransforms& hard, std::size_t k, const Matrix& image,
                                 std::size_t height, std::size_t width);

/// Writes an N x 3 image in [0, 1] as P6.
std::string encode_ppm(const Matrix& image, std::size_t height, std::size_t width);
/// Reads a P6 image (maxval 255) into an N x 3 matrix scaled to [0, 1].
Matrix decode_ppm(const std::string& bytes, std::size_t* height = nullptr,
                  std::size_t* width = nullptr);

}  // namespace graphtrans
