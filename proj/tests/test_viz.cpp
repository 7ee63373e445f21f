#include "graphtrans/viz.hpp"

#include <gtest/gtest.h>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <sstream>

#include "graphtrans/error.hpp"
#include "graphtrans/eval.hpp"

namespace graphtrans {
namespace {

namespace pt = boost::property_tree;

std::vector<Vertex> identity_map(std::size_t n) {
  std::vector<Vertex> t(n);
  for (Vertex i = 0; i < n; ++i) t[i] = i;
  return t;
}

TEST(ArrowField, IdentityIsAllDots) {
  const ArrowField f = arrow_field(identity_map(12), 3, 4);
  EXPECT_EQ(f.count(Direction::Self), 12u);
  EXPECT_EQ(f.majority, Direction::Self);
}

TEST(ArrowField, RightOnFourByFour) {
  const auto right = canonical_transforms(4, 4)[4].target;
  const ArrowField f = arrow_field(right, 4, 4);
  EXPECT_EQ(f.count(Direction::Right), 12u);
  EXPECT_EQ(f.count(Direction::Self), 4u);
  EXPECT_EQ(f.majority, Direction::Right);
  for (std::size_t r = 0; r < 4; ++r) EXPECT_EQ(f.displacement[r * 4 + 3], Direction::Self);
}

TEST(ArrowField, DirectionsOfEveryCanonical) {
  const auto refs = canonical_transforms(5, 5);
  const std::pair<std::size_t, Direction> majority[] = {
      {0, Direction::Self}, {1, Direction::Up}, {2, Direction::Down}, {3, Direction::Left}, {4, Direction::Right}};
  for (auto [i, d] : majority) EXPECT_EQ(arrow_field(refs[i].target, 5, 5).majority, d);
  // h-dilate on 5 columns: 2 columns move left, 2 right, the centre stays;
  // boundary columns clamp, so self wins 15 to 5 and 5.
  const ArrowField dilate = arrow_field(refs[5].target, 5, 5);
  EXPECT_EQ(dilate.count(Direction::Left), 5u);
  EXPECT_EQ(dilate.count(Direction::Right), 5u);
  EXPECT_EQ(dilate.majority, Direction::Self);
}

TEST(ArrowField, TieGoesToEarlierDirection) {
  // 1x2 grid: pixel 0 moves right, pixel 1 stays.
  const std::vector<Vertex> t = {1, 1};
  EXPECT_EQ(arrow_field(t, 1, 2).majority, Direction::Self);
}

TEST(ArrowField, Errors) {
  std::vector<Vertex> jump = identity_map(9);
  jump[0] = 8;
  EXPECT_THROW(arrow_field(jump, 3, 3), InvalidArgument);
  std::vector<Vertex> wrap = identity_map(9);
  wrap[2] = 3;  // end of row 0 to start of row 1 is not a grid edge
  EXPECT_THROW(arrow_field(wrap, 3, 3), InvalidArgument);
  EXPECT_THROW(arrow_field(identity_map(8), 3, 3), InvalidArgument);
}

TEST(ArrowSvg, IsWellFormedAndCountsGlyphs) {
  const auto up = canonical_transforms(4, 6)[1].target;
  const std::string svg = arrow_field_svg(up, 4, 6);
  std::istringstream in(svg);
  pt::ptree tree;
  ASSERT_NO_THROW(pt::read_xml(in, tree));
  const pt::ptree& root = tree.get_child("svg");
  EXPECT_EQ(root.get<std::string>("<xmlattr>.width"), "144");
  EXPECT_EQ(root.get<std::string>("<xmlattr>.height"), "96");
  std::size_t glyphs = 0;
  std::size_t majority = 0;
  std::size_t dots = 0;
  for (const auto& [tag, child] : root) {
    if (tag != "g") continue;
    ++glyphs;
    const auto cls = child.get<std::string>("<xmlattr>.class");
    if (cls == "glyph up majority") ++majority;
    if (cls == "glyph self") {
      ++dots;
      EXPECT_EQ(child.count("circle"), 1u);
    }
  }
  EXPECT_EQ(glyphs, 24u);
  EXPECT_EQ(majority, 18u);
  EXPECT_EQ(dots, 6u);
}

TEST(Ppm, EncodeDecodeRoundTrip) {
  Matrix img(6, 3);
  img << 0, 0.5, 1, 0.2, 0.4, 0.6, 1, 1, 1, 0, 0, 0, 0.1, 0.9, 0.3, 0.7, 0.8, 0.05;
  const std::string bytes = encode_ppm(img, 2, 3);
  EXPECT_EQ(bytes.substr(0, 11), "P6\n3 2\n255\n");
  EXPECT_EQ(bytes.size(), 11u + 18u);
  std::size_t h = 0;
  std::size_t w = 0;
  const Matrix back = decode_ppm(bytes, &h, &w);
  EXPECT_EQ(h, 2u);
  EXPECT_EQ(w, 3u);
  EXPECT_LE((back - img).cwiseAbs().maxCoeff(), 0.5 / 255.0 + 1e-12);
  EXPECT_EQ(encode_ppm(back, 2, 3), bytes);
  EXPECT_THROW(decode_ppm("P3\n1 1\n255\n"), ParseError);
  EXPECT_THROW(decode_ppm("P6\n2 2\n255\nabc"), ParseError);
}

TEST(TranslatedImage, IdentityRoundTrips) {
  Matrix img(4, 3);
  img << 0, 0.25, 1, 0.5, 0.5, 0.5, 1, 0, 0, 0.75, 0.1, 0.2;
  const HardTransforms hard{4, {identity_map(4)}};
  EXPECT_EQ(translated_image_ppm(hard, 0, img, 2, 2), encode_ppm(img, 2, 2));
}

TEST(TranslatedImage, RightMovesLitPixel) {
  const HardTransforms hard{9, {canonical_transforms(3, 3)[4].target}};
  Matrix img = Matrix::Zero(9, 3);
  img.row(0).setOnes();
  const Matrix out = decode_ppm(translated_image_ppm(hard, 0, img, 3, 3));
  Matrix expected = Matrix::Zero(9, 3);
  expected.row(1).setOnes();
  EXPECT_EQ(out, expected);
}

TEST(TranslatedImage, CollisionsClamp) {
  // Pixels 0 and 1 both land on 1: 0.75 + 0.75 clamps to 1.
  const HardTransforms hard{4, {{1, 1, 2, 3}}};
  Matrix img = Matrix::Zero(4, 3);
  img.row(0).setConstant(0.75);
  img.row(1).setConstant(0.75);
  const Matrix out = decode_ppm(translated_image_ppm(hard, 0, img, 2, 2));
  EXPECT_EQ(out.row(1), Eigen::RowVector3d::Ones());
  EXPECT_EQ(out.row(0), Eigen::RowVector3d::Zero());
  EXPECT_THROW(translated_image_ppm(hard, 0, img, 3, 3), InvalidArgument);
}

}  // namespace
}  // namespace graphtrans
