#include <doctest.h>

#include <random>

#include "mapseg/thresh.hpp"
#include "oracles.hpp"

using namespace mapseg;
using namespace mapseg::thresh;

namespace {

GrayImage image_from(const std::vector<std::pair<int, int>>& counts) {
  std::vector<std::uint8_t> px;
  for (auto [v, n] : counts) px.insert(px.end(), static_cast<std::size_t>(n), static_cast<std::uint8_t>(v));
  return GrayImage(static_cast<int>(px.size()), 1, px);
}

}  // namespace

TEST_CASE("otsu examples") {
  Histogram256 bimodal;
  bimodal.bins[10] = 50;
  bimodal.bins[200] = 50;
  CHECK(otsu_threshold(bimodal) == 10);

  Histogram256 single;
  single.bins[77] = 12;
  CHECK(otsu_threshold(single) == 77);

  Histogram256 tri;
  tri.bins[0] = 100;
  tri.bins[120] = 100;
  tri.bins[255] = 200;
  CHECK(otsu_threshold(tri) == oracle::exhaustive_otsu(tri.bins));

  CHECK_THROWS_AS(otsu_threshold(Histogram256{}), PreconditionError);
}

TEST_CASE("otsu agrees with the exhaustive oracle on random histograms") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 300; ++trial) {
    Histogram256 h;
    const int occupied = 2 + static_cast<int>(rng() % 20);
    for (int k = 0; k < occupied; ++k) h.bins[rng() % 256] += 1 + rng() % 1000;
    CHECK(otsu_threshold(h) == oracle::exhaustive_otsu(h.bins));
  }
}

TEST_CASE("binarize") {
  const GrayImage img(2, 2, std::vector<std::uint8_t>{0, 7, 7, 0});
  CHECK(binarize(img, 255, Polarity::DarkForeground).count() == 4);
  const BinaryMask dark = binarize(img, 0, Polarity::DarkForeground);
  CHECK(dark.test(0, 0));
  CHECK_FALSE(dark.test(1, 0));
  const BinaryMask bright = binarize(img, 0, Polarity::BrightForeground);
  CHECK(bright == dark.complement());
  CHECK((bright & dark).count() == 0);
}

TEST_CASE("recursive otsu") {
  std::mt19937 rng(47);
  GrayImage img(64, 64);
  for (auto& v : img.pixels()) v = static_cast<std::uint8_t>(rng() % 256);
  const Histogram256 h = Histogram256::of(img);
  CHECK(recursive_otsu(img, {1, 5, 0.4}) == binarize(img, otsu_threshold(h), Polarity::DarkForeground));

  // Strong ink 20 (30%), faint ink 160 (5%), paper 230 (65%). Plain Otsu
  // cuts at 20; the second round on the remaining pixels cuts at 160.
  const GrayImage strata = image_from({{20, 300}, {160, 50}, {230, 650}});
  const RecursiveOtsuResult one = recursive_otsu_detailed(strata, {1, 5, 0.4});
  const RecursiveOtsuResult two = recursive_otsu_detailed(strata, {2, 5, 0.4});
  CHECK(one.ink.count() == 300);
  CHECK(two.ink.count() == 350);
  CHECK(two.thresholds == std::vector<int>{20, 160});
  // A tight ink budget stops the recursion.
  CHECK(recursive_otsu(strata, {3, 5, 0.32}).count() == 300);

  CHECK_FALSE(recursive_otsu(GrayImage(9, 9, 128), {3, 5, 0.4}).any());
  CHECK_THROWS_AS(recursive_otsu(strata, {0, 5, 0.4}), PreconditionError);

  // Monotone in depth.
  for (int trial = 0; trial < 20; ++trial) {
    GrayImage g(40, 40);
    for (auto& v : g.pixels()) v = static_cast<std::uint8_t>(rng() % 256);
    BinaryMask prev = recursive_otsu(g, {1, 2, 0.9});
    for (int d = 2; d <= 4; ++d) {
      const BinaryMask cur = recursive_otsu(g, {d, 2, 0.9});
      CHECK((prev & cur) == prev);
      prev = cur;
    }
  }
}
