#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <set>

#include "mapseg/synth.hpp"

using namespace mapseg;
using namespace mapseg::synth;

namespace {

bool near(Rgb a, Rgb b, int tol) {
  return std::abs(a.r - b.r) <= tol && std::abs(a.g - b.g) <= tol && std::abs(a.b - b.b) <= tol;
}

SheetSpec small_spec() {
  SheetSpec s;
  s.width = s.height = 512;
  s.margin = 24;
  s.blocks = 1;
  s.grid_lines = 2;
  s.grid_period = 150;
  s.legend_count = 0;
  return s;
}

}  // namespace

TEST_CASE("minimal sheet: 2x2 graticule and one block") {
  const Sheet sheet = generate(small_spec());
  CHECK(sheet.truth.intersections.size() == 4);
  std::set<std::int32_t> labels;
  for (std::size_t i = 0; i < sheet.truth.blocks.size(); ++i) {
    if (sheet.truth.blocks[i] > 0) labels.insert(sheet.truth.blocks[i]);
  }
  CHECK(labels.size() == 1);
}

TEST_CASE("generation is deterministic in the seed") {
  SheetSpec spec;
  const Sheet a = generate(spec);
  const Sheet b = generate(spec);
  CHECK(a.image == b.image);
  CHECK(a.truth.blocks == b.truth.blocks);
  CHECK(a.truth.content == b.truth.content);
  CHECK(a.truth.intersections == b.truth.intersections);
  spec.seed = 2;
  CHECK_FALSE(a.image == generate(spec).image);
}

TEST_CASE("default sheet truth is consistent with the rendering") {
  const SheetSpec spec;
  const Sheet sheet = generate(spec);
  const auto& t = sheet.truth;
  CHECK(t.intersections.size() == 25);

  // Blocks: every truth pixel is drawn as block fill or outline and the
  // rendered block colours outside the truth are rare.
  const Rgb fill{222, 205, 190};
  const Rgb ink{45, 40, 35};
  long long truth_area = 0, disagree = 0;
  std::set<std::int32_t> labels;
  for (int y = 0; y < t.blocks.height(); ++y) {
    for (int x = 0; x < t.blocks.width(); ++x) {
      const bool in_truth = t.blocks.at(x, y) > 0;
      const Rgb px = sheet.image.at(x, y);
      const bool drawn = near(px, fill, 6) || near(px, ink, 4);
      truth_area += in_truth;
      disagree += in_truth != drawn;
      if (in_truth) labels.insert(t.blocks.at(x, y));
    }
  }
  CHECK(labels.size() == static_cast<std::size_t>(spec.blocks));
  CHECK(static_cast<double>(disagree) < 0.01 * truth_area);

  // Graticule passes through every truth intersection.
  for (const Point& p : t.intersections) {
    const int x = static_cast<int>(std::lround(p.x));
    const int y = static_cast<int>(std::lround(p.y));
    CHECK(luminance(sheet.image.at(x, y)) < 170);
    CHECK(t.content.test(x, y));
  }
}

TEST_CASE("blocks lie inside the content and never touch") {
  const Sheet sheet = generate(SheetSpec{});
  const auto& b = sheet.truth.blocks;
  bool inside = true, separated = true;
  for (int y = 0; y < b.height(); ++y) {
    for (int x = 0; x < b.width(); ++x) {
      const std::int32_t l = b.at(x, y);
      if (l == 0) continue;
      inside = inside && sheet.truth.content.test(x, y);
      for (int dy = -2; dy <= 2; ++dy) {
        for (int dx = -2; dx <= 2; ++dx) {
          if (!b.contains(x + dx, y + dy)) continue;
          const std::int32_t o = b.at(x + dx, y + dy);
          separated = separated && (o == 0 || o == l);
        }
      }
    }
  }
  CHECK(inside);
  CHECK(separated);
}

TEST_CASE("graticule-free and river sheets") {
  SheetSpec spec;
  spec.graticule = false;
  CHECK(generate(spec).truth.intersections.empty());
  spec = SheetSpec{};
  spec.river = true;
  spec.seed = 4;
  const Sheet river = generate(spec);
  long long water = 0;
  for (std::size_t i = 0; i < river.image.size(); ++i) water += near(river.image[i], {160, 185, 205}, 8);
  CHECK(water > 10000);
}

TEST_CASE("infeasible layouts and bad levels are rejected") {
  SheetSpec spec;
  spec.blocks = 400;
  CHECK_THROWS_AS(generate(spec), PreconditionError);
  const RgbImage img = generate(small_spec()).image;
  CHECK_THROWS_AS(corrupt(img, -0.1), PreconditionError);
  CHECK_THROWS_AS(corrupt(img, 1.5), PreconditionError);
}

TEST_CASE("corrupt: identity at level 0, deterministic otherwise") {
  const RgbImage img = generate(small_spec()).image;
  CHECK(corrupt(img, 0.0) == img);
  const RgbImage a = corrupt(img, 0.3, 9);
  CHECK_FALSE(a == img);
  CHECK(a == corrupt(img, 0.3, 9));
  CHECK_FALSE(a == corrupt(img, 0.3, 10));
  // Heavier corruption changes more pixels.
  long long d_low = 0, d_high = 0;
  const RgbImage b = corrupt(img, 1.0, 9);
  for (std::size_t i = 0; i < img.size(); ++i) {
    d_low += !(a[i] == img[i]);
    d_high += !(b[i] == img[i]);
  }
  CHECK(d_high > d_low);
}
