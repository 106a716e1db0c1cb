#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>
#include <set>

#include "mapseg/components.hpp"
#include "mapseg/morph.hpp"

using namespace mapseg;
using namespace mapseg::morph;

namespace {

GrayImage random_gray(std::mt19937& rng, int w, int h, int levels = 256) {
  GrayImage img(w, h);
  for (auto& v : img.pixels()) v = static_cast<std::uint8_t>(rng() % levels);
  return img;
}

BinaryMask random_mask(std::mt19937& rng, int w, int h, double p) {
  BinaryMask m(w, h);
  std::bernoulli_distribution on(p);
  for (std::size_t i = 0; i < m.size(); ++i) m.set(i, on(rng));
  return m;
}

// Direct min/max over the offsets, out-of-image samples ignored.
GrayImage naive_erode(const GrayImage& img, const StructuringElement& se) {
  GrayImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      int m = 255;
      for (const Offset& o : se.offsets()) {
        if (img.contains(x + o.dx, y + o.dy)) m = std::min<int>(m, img.at(x + o.dx, y + o.dy));
      }
      out.at(x, y) = static_cast<std::uint8_t>(m);
    }
  }
  return out;
}

GrayImage naive_dilate(const GrayImage& img, const StructuringElement& se) {
  GrayImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      int m = 0;
      for (const Offset& o : se.offsets()) {
        if (img.contains(x - o.dx, y - o.dy)) m = std::max<int>(m, img.at(x - o.dx, y - o.dy));
      }
      out.at(x, y) = static_cast<std::uint8_t>(m);
    }
  }
  return out;
}

bool leq(const GrayImage& a, const GrayImage& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) return false;
  }
  return true;
}

// Iterated elementary geodesic dilation until stability.
GrayImage naive_reconstruct(GrayImage marker, const GrayImage& mask) {
  const StructuringElement sq = StructuringElement::square(3);
  for (;;) {
    GrayImage next = naive_dilate(marker, sq);
    for (std::size_t i = 0; i < next.size(); ++i) next[i] = std::min(next[i], mask[i]);
    if (next == marker) return marker;
    marker = std::move(next);
  }
}

// Area closing by threshold decomposition: a pixel's value is the smallest
// level t >= f(x) whose 8-connected component of {f <= t} through x has
// area >= a (or 255 when none).
GrayImage naive_area_close(const GrayImage& img, long long area) {
  GrayImage out(img.width(), img.height(), 255);
  for (int t = 255; t >= 0; --t) {
    BinaryMask below(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i) below.set(i, img[i] <= t);
    const LabelImage lab = components::label_components(below);
    const auto stats = components::component_stats(lab);
    for (std::size_t i = 0; i < img.size(); ++i) {
      if (lab[i] > 0 && stats[static_cast<std::size_t>(lab[i] - 1)].area >= area) {
        out[i] = static_cast<std::uint8_t>(t);
      }
    }
  }
  for (std::size_t i = 0; i < img.size(); ++i) out[i] = std::max(out[i], img[i]);
  return out;
}

double brute_distance(const BinaryMask& m, int x, int y) {
  double best = std::numeric_limits<double>::infinity();
  for (int v = 0; v < m.height(); ++v) {
    for (int u = 0; u < m.width(); ++u) {
      if (m.test(u, v)) best = std::min(best, std::hypot(u - x, v - y));
    }
  }
  return best;
}

int count_labels(const LabelImage& l) {
  std::set<std::int32_t> s;
  for (auto v : l.pixels()) {
    if (v > 0) s.insert(v);
  }
  return static_cast<int>(s.size());
}

}  // namespace

TEST_CASE("structuring elements") {
  CHECK(StructuringElement::square(3).size() == 9);
  CHECK(StructuringElement::cross(2).size() == 9);
  CHECK(StructuringElement::disk(1).size() == 5);
  const auto h = StructuringElement::line(9, 0);
  CHECK(h.size() == 9);
  for (const Offset& o : h.offsets()) CHECK(o.dy == 0);
  const auto v = StructuringElement::line(9, 90);
  CHECK(v.size() == 9);
  for (const Offset& o : v.offsets()) CHECK(o.dx == 0);
  const auto d = StructuringElement::line(21, 7);
  CHECK(d.size() == 21);
  bool has_origin = false;
  for (const Offset& o : d.offsets()) has_origin |= (o.dx == 0 && o.dy == 0);
  CHECK(has_origin);
  // Bresenham digitization stays within half a pixel of the ideal segment.
  const double a = 7 * std::acos(-1.0) / 180;
  for (const Offset& o : d.offsets()) {
    CHECK(std::abs(-o.dx * std::sin(a) + o.dy * std::cos(a)) <= 0.5 + 1e-9);
  }
}

TEST_CASE("erosion and dilation match a direct scan") {
  std::mt19937 rng(5);
  const std::vector<StructuringElement> ses = {
      StructuringElement::square(3), StructuringElement::square(4), StructuringElement::disk(3),
      StructuringElement::cross(2),  StructuringElement::line(7, 23),
      StructuringElement::from_offsets({{2, 1}, {-1, 3}, {0, -2}})};
  for (int trial = 0; trial < 30; ++trial) {
    const GrayImage img = random_gray(rng, 5 + static_cast<int>(rng() % 14), 5 + static_cast<int>(rng() % 14));
    for (const auto& se : ses) {
      CHECK(erode(img, se) == naive_erode(img, se));
      CHECK(dilate(img, se) == naive_dilate(img, se));
    }
  }
}

TEST_CASE("se_filter examples") {
  CHECK(erode(GrayImage(9, 9, 77), StructuringElement::disk(3)) == GrayImage(9, 9, 77));
  GrayImage dot(5, 5, 0);
  dot.at(2, 2) = 255;
  const GrayImage d = dilate(dot, StructuringElement::square(3));
  for (int y = 0; y < 5; ++y) {
    for (int x = 0; x < 5; ++x) {
      const bool inside = std::abs(x - 2) <= 1 && std::abs(y - 2) <= 1;
      CHECK(d.at(x, y) == (inside ? 255 : 0));
    }
  }
}

TEST_CASE("duality, ordering and idempotence") {
  std::mt19937 rng(7);
  const std::vector<StructuringElement> ses = {
      StructuringElement::square(3), StructuringElement::line(5, 30),
      StructuringElement::from_offsets({{1, 0}, {2, 1}, {0, 2}})};
  for (int trial = 0; trial < 40; ++trial) {
    const GrayImage img = random_gray(rng, 16, 16);
    for (const auto& se : ses) {
      CHECK(erode(img, se) == invert(dilate(invert(img), se.reflect())));
      const GrayImage e = erode(img, se);
      const GrayImage o = open(img, se);
      const GrayImage c = close(img, se);
      const GrayImage dl = dilate(img, se);
      CHECK(leq(e, o));
      CHECK(leq(o, img));
      CHECK(leq(img, c));
      CHECK(leq(c, dl));
      CHECK(close(c, se) == c);
      CHECK(open(o, se) == o);
    }
  }
}

TEST_CASE("top hats") {
  CHECK(top_hat(GrayImage(7, 7, 90), StructuringElement::square(3), Polarity::White) ==
        GrayImage(7, 7, 0));
  GrayImage lined(11, 11, 230);
  for (int y = 0; y < 11; ++y) lined.at(5, y) = 40;
  const GrayImage bth = top_hat(lined, StructuringElement::square(3), Polarity::Black);
  for (int y = 0; y < 11; ++y) {
    for (int x = 0; x < 11; ++x) CHECK(bth.at(x, y) == (x == 5 ? 190 : 0));
  }
  GrayImage dot(7, 7, 0);
  dot.at(3, 3) = 200;
  CHECK(top_hat(dot, StructuringElement::square(3), Polarity::White) == dot);
}

TEST_CASE("geodesic reconstruction") {
  std::mt19937 rng(9);
  for (int trial = 0; trial < 40; ++trial) {
    const GrayImage mask = random_gray(rng, 14, 12, 8);
    GrayImage marker = mask;
    for (auto& v : marker.pixels()) v = rng() % 3 == 0 ? v : 0;
    const GrayImage r = geodesic_reconstruct(marker, mask, ReconstructDirection::ByDilation);
    CHECK(r == naive_reconstruct(marker, mask));
    CHECK(leq(marker, r));
    CHECK(leq(r, mask));
    // By erosion is the dual.
    const GrayImage re = geodesic_reconstruct(invert(marker), invert(mask), ReconstructDirection::ByErosion);
    CHECK(re == invert(r));
  }
  const GrayImage m = random_gray(rng, 8, 8);
  CHECK(geodesic_reconstruct(m, m, ReconstructDirection::ByDilation) == m);
  CHECK(geodesic_reconstruct(GrayImage(8, 8, 0), m, ReconstructDirection::ByDilation) ==
        GrayImage(8, 8, 0));
  CHECK_THROWS_AS(geodesic_reconstruct(GrayImage(8, 8, 255), GrayImage(8, 8, 3),
                                       ReconstructDirection::ByDilation),
                  PreconditionError);

  BinaryMask two(10, 5);
  for (int y = 0; y < 5; ++y) {
    two.set(1, y);
    two.set(7, y);
  }
  BinaryMask seed(10, 5);
  seed.set(7, 2);
  const BinaryMask kept = geodesic_reconstruct(seed, two);
  for (int y = 0; y < 5; ++y) {
    CHECK_FALSE(kept.test(1, y));
    CHECK(kept.test(7, y));
  }
}

TEST_CASE("reconstruction is increasing in marker and mask") {
  std::mt19937 rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    const GrayImage mask = random_gray(rng, 12, 12, 6);
    GrayImage bigger_mask = mask;
    for (auto& v : bigger_mask.pixels()) v = static_cast<std::uint8_t>(std::min(255, v + static_cast<int>(rng() % 3)));
    GrayImage marker(12, 12, 0);
    for (std::size_t i = 0; i < marker.size(); ++i) marker[i] = rng() % 5 == 0 ? mask[i] : 0;
    GrayImage bigger_marker = marker;
    for (std::size_t i = 0; i < marker.size(); ++i) {
      if (rng() % 7 == 0) bigger_marker[i] = mask[i];
    }
    const auto base = geodesic_reconstruct(marker, mask, ReconstructDirection::ByDilation);
    CHECK(leq(base, geodesic_reconstruct(bigger_marker, mask, ReconstructDirection::ByDilation)));
    CHECK(leq(base, geodesic_reconstruct(marker, bigger_mask, ReconstructDirection::ByDilation)));
  }
}

TEST_CASE("fill_holes") {
  BinaryMask square(8, 8);
  for (int y = 2; y < 6; ++y) {
    for (int x = 2; x < 6; ++x) square.set(x, y);
  }
  CHECK(fill_holes(square) == square);

  BinaryMask ring(9, 9);
  for (int i = 1; i < 8; ++i) {
    ring.set(i, 1);
    ring.set(i, 7);
    ring.set(1, i);
    ring.set(7, i);
  }
  const BinaryMask filled = fill_holes(ring);
  for (int y = 0; y < 9; ++y) {
    for (int x = 0; x < 9; ++x) {
      CHECK(filled.test(x, y) == (x >= 1 && x <= 7 && y >= 1 && y <= 7));
    }
  }
  BinaryMask c_shape = ring;
  c_shape.set(7, 4, false);
  CHECK(fill_holes(c_shape) == c_shape);

  // A background pocket linked to the outside only diagonally is a hole
  // (background is 4-connected).
  BinaryMask diag(5, 5);
  for (int i = 0; i < 5; ++i) {
    diag.set(i, 0);
    diag.set(0, i);
  }
  diag.set(1, 1);
  diag.set(2, 1);
  diag.set(1, 2);
  diag.set(3, 1, false);
  CHECK(fill_holes(fill_holes(diag)) == fill_holes(diag));

  std::mt19937 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const BinaryMask m = random_mask(rng, 12, 12, 0.5);
    const BinaryMask f = fill_holes(m);
    CHECK(fill_holes(f) == f);
    // Oracle: 4-connected flood of background from the border.
    BinaryMask outside(12, 12);
    std::deque<std::pair<int, int>> q;
    for (int y = 0; y < 12; ++y) {
      for (int x = 0; x < 12; ++x) {
        if ((x == 0 || y == 0 || x == 11 || y == 11) && !m.test(x, y)) {
          outside.set(x, y);
          q.emplace_back(x, y);
        }
      }
    }
    while (!q.empty()) {
      auto [x, y] = q.front();
      q.pop_front();
      const int dx[] = {1, -1, 0, 0};
      const int dy[] = {0, 0, 1, -1};
      for (int k = 0; k < 4; ++k) {
        const int nx = x + dx[k];
        const int ny = y + dy[k];
        if (m.contains(nx, ny) && !m.test(nx, ny) && !outside.test(nx, ny)) {
          outside.set(nx, ny);
          q.emplace_back(nx, ny);
        }
      }
    }
    CHECK(f == outside.complement());
  }
}

TEST_CASE("gray fill_holes fills a dark pit") {
  GrayImage img(7, 7, 100);
  for (int y = 1; y < 6; ++y) {
    for (int x = 1; x < 6; ++x) img.at(x, y) = 200;
  }
  img.at(3, 3) = 10;
  const GrayImage f = fill_holes(img);
  CHECK(f.at(3, 3) == 200);
  CHECK(f.at(0, 0) == 100);
}

TEST_CASE("area filters") {
  GrayImage img(12, 12, 255);
  CHECK(area_filter(img, 1, AreaMode::Closing) == img);
  for (int y = 2; y < 4; ++y) {
    for (int x = 2; x < 4; ++x) img.at(x, y) = 30;
  }
  img.at(4, 2) = 30;
  GrayImage blank(12, 12, 255);
  CHECK(area_filter(img, 1000, AreaMode::Closing) == blank);
  CHECK(area_filter(img, 5, AreaMode::Closing) == img);
  CHECK(area_filter(img, 6, AreaMode::Closing) == blank);

  std::mt19937 rng(19);
  for (int trial = 0; trial < 25; ++trial) {
    const GrayImage g = random_gray(rng, 11, 9, 6);
    for (long long a : {2LL, 4LL, 9LL, 30LL}) {
      const GrayImage c = area_filter(g, a, AreaMode::Closing);
      CHECK(c == naive_area_close(g, a));
      CHECK(leq(g, c));
      CHECK(area_filter(c, a, AreaMode::Closing) == c);
      const GrayImage o = area_filter(g, a, AreaMode::Opening);
      CHECK(o == invert(naive_area_close(invert(g), a)));
      CHECK(leq(o, g));
    }
  }
}

TEST_CASE("minima by dynamics") {
  const MarkerSpec flat = minima_by_dynamics(GrayImage(6, 4, 50), 2);
  CHECK(flat.count == 1);
  for (auto v : flat.labels.pixels()) CHECK(v == 1);

  // Two basins of depth 5 below a ridge: profile 10 5 5 10 5 5 10.
  const std::vector<int> profile = {10, 5, 5, 10, 5, 5, 10};
  GrayImage img(7, 3);
  for (int y = 0; y < 3; ++y) {
    for (int x = 0; x < 7; ++x) img.at(x, y) = static_cast<std::uint8_t>(profile[x]);
  }
  CHECK(minima_by_dynamics(img, 2).count == 2);
  CHECK(minima_by_dynamics(img, 5).count == 2);
  CHECK(minima_by_dynamics(img, 6).count == 1);

  // Uneven basins: depth 5 and depth 2; h=3 keeps only the deep one.
  const std::vector<int> uneven = {10, 5, 10, 8, 10};
  GrayImage u(5, 1);
  for (int x = 0; x < 5; ++x) u.at(x, 0) = static_cast<std::uint8_t>(uneven[x]);
  CHECK(minima_by_dynamics(u, 2).count == 2);
  CHECK(minima_by_dynamics(u, 3).count == 1);
  CHECK(minima_by_dynamics(u, 3).labels.at(1, 0) == 1);
  CHECK_THROWS_AS(minima_by_dynamics(u, 0), PreconditionError);
}

TEST_CASE("watershed") {
  GrayImage relief(9, 1);
  const std::vector<int> v = {0, 1, 2, 3, 4, 3, 2, 1, 0};
  for (int x = 0; x < 9; ++x) relief.at(x, 0) = static_cast<std::uint8_t>(v[x]);
  MarkerSpec markers{LabelImage(9, 1, 0), 2};
  markers.labels.at(0, 0) = 1;
  markers.labels.at(8, 0) = 2;
  const LabelImage ws = watershed(relief, markers);
  for (int x = 0; x < 4; ++x) CHECK(ws.at(x, 0) == 1);
  for (int x = 5; x < 9; ++x) CHECK(ws.at(x, 0) == 2);
  // The ridge is reached by both floods at the same level; the first label
  // queued (raster order of seeds) wins.
  CHECK(ws.at(4, 0) == 1);

  MarkerSpec single{LabelImage(5, 5, 0), 1};
  single.labels.at(2, 2) = 1;
  std::mt19937 rng(23);
  const LabelImage all = watershed(random_gray(rng, 5, 5), single);
  for (auto l : all.pixels()) CHECK(l == 1);

  MarkerSpec full{LabelImage(4, 4, 0), 16};
  for (std::size_t i = 0; i < 16; ++i) full.labels[i] = static_cast<std::int32_t>(i + 1);
  CHECK(watershed(random_gray(rng, 4, 4), full) == full.labels);

  CHECK_THROWS_AS(watershed(GrayImage(3, 3), MarkerSpec{LabelImage(3, 3, 0), 0}),
                  PreconditionError);
}

TEST_CASE("watershed regions partition the image and stay connected") {
  std::mt19937 rng(29);
  for (int trial = 0; trial < 30; ++trial) {
    const GrayImage relief = random_gray(rng, 16, 16, 20);
    const MarkerSpec m = minima_by_dynamics(relief, 3);
    const LabelImage ws = watershed(relief, m);
    CHECK(count_labels(ws) == m.count);
    for (auto l : ws.pixels()) CHECK(l >= 1);
    for (int l = 1; l <= m.count; ++l) {
      BinaryMask region(16, 16);
      for (std::size_t i = 0; i < ws.size(); ++i) region.set(i, ws[i] == l);
      CHECK(components::max_label(components::label_components(region, Connectivity::Eight)) == 1);
    }
  }
}

TEST_CASE("quasi-flat zones") {
  CHECK(count_labels(quasi_flat_zones(GrayImage(5, 5, 3), 0)) == 1);
  GrayImage ramp(10, 1);
  for (int x = 0; x < 10; ++x) ramp.at(x, 0) = static_cast<std::uint8_t>(x);
  CHECK(count_labels(quasi_flat_zones(ramp, 1)) == 1);
  CHECK(count_labels(quasi_flat_zones(ramp, 0)) == 10);
  // Diagonal neighbours are not linked.
  GrayImage checker(2, 2, std::vector<std::uint8_t>{0, 100, 100, 0});
  CHECK(count_labels(quasi_flat_zones(checker, 5)) == 4);
}

TEST_CASE("distance transform") {
  BinaryMask corner(6, 6);
  corner.set(0, 0);
  CHECK(distance_transform(corner).at(3, 4) == 5.0);
  const RealImage zero = distance_transform(BinaryMask(4, 3, true));
  for (double d : zero.pixels()) CHECK(d == 0.0);
  CHECK_THROWS_AS(distance_transform(BinaryMask(4, 4)), PreconditionError);
  std::mt19937 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    BinaryMask m = random_mask(rng, 12, 12, 0.08);
    if (!m.any()) m.set(static_cast<int>(rng() % 12), static_cast<int>(rng() % 12));
    const RealImage d = distance_transform(m);
    for (int y = 0; y < 12; ++y) {
      for (int x = 0; x < 12; ++x) CHECK(d.at(x, y) == brute_distance(m, x, y));
    }
  }
}

TEST_CASE("directional closing") {
  // Bright dashes on a dark ground: the closing bridges the dark gaps.
  GrayImage dashed(30, 31, 20);
  for (int x = 0; x < 30; ++x) {
    if (x % 6 < 3) dashed.at(x, 15) = 220;
  }
  const GrayImage h = directional_close(dashed, 9, 0);
  for (int x = 0; x < 27; ++x) CHECK(h.at(x, 15) == 220);
  CHECK(h == close(dashed, StructuringElement::line(9, 0)));
  const GrayImage v = directional_close(dashed, 9, 90);
  CHECK(v == dashed);
}

TEST_CASE("block_min") {
  GrayImage img(5, 3, 200);
  img.at(4, 2) = 3;
  img.at(1, 0) = 7;
  const GrayImage b = block_min(img, 2);
  CHECK(b.width() == 3);
  CHECK(b.height() == 2);
  CHECK(b.at(0, 0) == 7);
  CHECK(b.at(2, 1) == 3);
  CHECK(b.at(1, 1) == 200);
}
