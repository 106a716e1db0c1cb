#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mapseg/lines.hpp"

using namespace mapseg;
using namespace mapseg::lines;

namespace {

constexpr double kPi = std::numbers::pi;

// Pixels within `half` px of the line x cos t + y sin t = rho.
void draw_line(BinaryMask& m, double theta, double rho, double half = 1.0) {
  const double c = std::cos(theta), s = std::sin(theta);
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (std::abs(x * c + y * s - rho) <= half) m.set(x, y, true);
    }
  }
}

BinaryMask grid_mask(int size, double angle, double period, double offset, int n,
                     int skip_a = -1) {
  BinaryMask m(size, size);
  for (int k = 0; k < n; ++k) {
    if (k != skip_a) draw_line(m, angle, offset + k * period);
    draw_line(m, angle + kPi / 2, offset + k * period);
  }
  return m;
}

// Dark anti-aliased cross on white, centred at (cx, cy).
GrayImage cross_image(int w, int h, double cx, double cy, double angle, double stroke = 2.0) {
  GrayImage img(w, h, 240);
  const double c = std::cos(angle), s = std::sin(angle);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double dx = x - cx, dy = y - cy;
      const double d1 = std::abs(-dx * s + dy * c);
      const double d2 = std::abs(dx * c + dy * s);
      const double cover = std::max(std::clamp(stroke / 2 + 0.5 - d1, 0.0, 1.0),
                                    std::clamp(stroke / 2 + 0.5 - d2, 0.0, 1.0));
      img.at(x, y) = static_cast<std::uint8_t>(std::lround(240 - 200 * cover));
    }
  }
  return img;
}

}  // namespace

TEST_CASE("hough: vote conservation and single line maximum") {
  BinaryMask m(40, 30);
  for (int y = 0; y < 30; ++y) m.set(12, y, true);
  const Accumulator acc = hough_transform(m, 1.0, 1.0);
  CHECK(acc.theta_bins() == 180);
  CHECK(acc.total() == doctest::Approx(30.0 * 180.0));
  double best = 0;
  int bt = -1, br = -1;
  for (int t = 0; t < acc.theta_bins(); ++t) {
    for (int r = 0; r < acc.rho_bins; ++r) {
      if (acc.at(t, r) > best) {
        best = acc.at(t, r);
        bt = t;
        br = r;
      }
    }
  }
  CHECK(best == 30.0);
  CHECK(bt == 0);
  CHECK(acc.rho_of(br) == doctest::Approx(12.0));
}

TEST_CASE("hough: single pixel votes once per angle") {
  BinaryMask m(10, 10);
  m.set(3, 7, true);
  const Accumulator acc = hough_transform(m, 2.0, 1.0);
  for (int t = 0; t < acc.theta_bins(); ++t) {
    double s = 0;
    for (int r = 0; r < acc.rho_bins; ++r) s += acc.at(t, r);
    CHECK(s == 1.0);
  }
}

TEST_CASE("hough: two parallel lines give equal maxima in one theta bin") {
  BinaryMask m(50, 40);
  for (int y = 0; y < 40; ++y) {
    m.set(10, y, true);
    m.set(35, y, true);
  }
  const Accumulator acc = hough_transform(m, 1.0, 1.0);
  const auto col = acc.column(0);
  const int r10 = static_cast<int>(std::lround(10 - acc.rho_min));
  const int r35 = static_cast<int>(std::lround(35 - acc.rho_min));
  CHECK(col[static_cast<std::size_t>(r10)] == 40.0);
  CHECK(col[static_cast<std::size_t>(r35)] == 40.0);
}

TEST_CASE("hough: errors") {
  CHECK_THROWS_AS(hough_transform(BinaryMask(5, 5)), PreconditionError);
  BinaryMask m(5, 5);
  m.set(1, 1, true);
  CHECK_THROWS_AS(hough_transform(m, 0.0, 1.0), PreconditionError);
}

TEST_CASE("select_grid: recovers a rotated 5x5 grid") {
  const double angle = 2.0 * kPi / 180.0;
  const BinaryMask m = grid_mask(600, angle, 100.0, 90.0, 5);
  const Accumulator acc = hough_transform(m, 0.25, 1.0);
  const GridModel g = select_grid(acc);
  REQUIRE(g.found);
  CHECK(std::abs(g.angle - angle) <= 1.0 * kPi / 180.0);
  CHECK(std::abs(g.period - 100.0) <= 1.0);
  CHECK(g.family_a.size() + g.family_b.size() == 10);
  for (const auto* fam : {&g.family_a, &g.family_b}) {
    for (std::size_t k = 1; k < fam->size(); ++k) {
      CHECK(std::abs((*fam)[k].rho - (*fam)[k - 1].rho - g.period) <= 3.0);
    }
  }
  // Intersections against the construction.
  const GridModel r = refine_lines(m, g);
  const auto pts = grid_points(r, Box{0, 0, 599, 599});
  CHECK(pts.size() == 25);
  for (const GridPoint& p : pts) {
    LineParam a{angle, 90.0 + 100.0 * p.a};
    LineParam b{angle + kPi / 2, 90.0 + 100.0 * p.b};
    const auto truth = intersect(a, b);
    REQUIRE(truth);
    CHECK(std::hypot(p.point.x - truth->x, p.point.y - truth->y) < 2.0);
  }
}

TEST_CASE("select_grid: an erased line is re-inserted") {
  const double angle = 2.0 * kPi / 180.0;
  const BinaryMask m = grid_mask(600, angle, 100.0, 90.0, 5, 2);
  const GridModel g = select_grid(hough_transform(m, 0.25, 1.0));
  REQUIRE(g.found);
  REQUIRE(g.family_a.size() == 5);
  int inserted = 0;
  for (const LineParam& l : g.family_a) inserted += l.inserted;
  CHECK(inserted == 1);
  CHECK(g.family_a[2].inserted);
  CHECK(g.family_a[2].rho == doctest::Approx(290.0).epsilon(0.01));
  CHECK(g.family_a[2].rating == 0.0);
}

TEST_CASE("select_grid: speckle has no grid") {
  std::mt19937 rng(7);
  BinaryMask m(300, 300);
  for (int y = 0; y < 300; ++y) {
    for (int x = 0; x < 300; ++x) m.set(x, y, rng() % 50 == 0);
  }
  const GridModel g = select_grid(hough_transform(m, 0.5, 1.0));
  CHECK_FALSE(g.found);
  CHECK(g.diagnostic.find("no grid") != std::string::npos);
}

TEST_CASE("radon: mass conservation and line delta") {
  std::mt19937 rng(3);
  GrayImage img(37, 29);
  double mass = 0;
  for (std::size_t i = 0; i < img.size(); ++i) {
    img[i] = static_cast<std::uint8_t>(rng() % 256);
    mass += img[i];
  }
  std::vector<double> angles;
  for (int a = 0; a < 180; a += 7) angles.push_back(a + 0.3);
  const Accumulator s = radon_transform(img, angles);
  for (int t = 0; t < s.theta_bins(); ++t) {
    double sum = 0;
    for (double v : s.column(t)) sum += v;
    CHECK(std::abs(sum - mass) <= 0.01 * mass);
  }

  GrayImage line(30, 30, 0);
  for (int y = 0; y < 30; ++y) line.at(17, y) = 100;
  const Accumulator p = radon_transform(line, {0.0, 90.0});
  const auto col = p.column(0);
  const auto peak = std::max_element(col.begin(), col.end()) - col.begin();
  CHECK(p.rho_of(static_cast<int>(peak)) == doctest::Approx(17.0));
  CHECK(col[static_cast<std::size_t>(peak)] == doctest::Approx(3000.0));
  CHECK_THROWS_AS(radon_transform(line, {}), PreconditionError);
}

TEST_CASE("longest_run follows tilted lines") {
  BinaryMask m(100, 60);
  const double a = 7.0 * kPi / 180.0;
  for (int x = 5; x < 95; ++x) m.set(x, static_cast<int>(std::lround(10 + x * std::tan(a))), true);
  CHECK(longest_run(m, 7.0) >= 89);
  CHECK(longest_run(m, 0.0) < 40);
  CHECK(longest_run(BinaryMask(10, 10), 0.0) == 0);
}

TEST_CASE("best_direction") {
  auto grid_image = [](double deg) {
    GrayImage img(200, 200, 230);
    const double a = deg * kPi / 180.0;
    const double c = std::cos(a), s = std::sin(a);
    for (int y = 0; y < 200; ++y) {
      for (int x = 0; x < 200; ++x) {
        const double u = x * c + y * s;
        const double v = -x * s + y * c;
        const double du = std::abs(std::remainder(u - 20, 60.0));
        const double dv = std::abs(std::remainder(v - 20, 60.0));
        if (du <= 1.0 || dv <= 1.0) img.at(x, y) = 40;
      }
    }
    return img;
  };
  const DirectionResult r7 = best_direction(grid_image(7.0));
  CHECK(r7.angle_deg == 7.0);
  CHECK_FALSE(r7.low_confidence);
  const DirectionResult r0 = best_direction(grid_image(0.0));
  CHECK(r0.angle_deg == 0.0);
  const DirectionResult blank = best_direction(GrayImage(80, 80, 200));
  CHECK(blank.angle_deg == 0.0);
  CHECK(blank.longest_run == 0);
  CHECK(blank.low_confidence);
}

TEST_CASE("grid_period") {
  std::vector<double> train(400, 0.0);
  for (std::size_t i = 13; i < train.size(); i += 40) train[i] = 10.0;
  CHECK(std::abs(grid_period(train) - 40.0) <= 0.5);
  train[133] = 0.0;
  CHECK(std::abs(grid_period(train) - 40.0) <= 0.5);
  CHECK_THROWS_AS(grid_period(std::vector<double>(400, 3.0)), PreconditionError);
  CHECK_THROWS_AS(grid_period(std::vector<double>(6, 1.0), 4.0), PreconditionError);

  // Wide peaks on a ramp still give the period.
  std::vector<double> smooth(500);
  for (std::size_t i = 0; i < smooth.size(); ++i) {
    smooth[i] = 0.05 * i + 20.0 * std::exp(-std::pow(std::remainder(i - 7.0, 37.5), 2) / 8.0);
  }
  CHECK(std::abs(grid_period(smooth) - 37.5) <= 0.5);
}

TEST_CASE("profile_peaks") {
  std::vector<double> p(100, 0.0);
  p[10] = 5;
  p[12] = 4;
  p[50] = 6;
  p[80] = 1;
  const auto peaks = profile_peaks(p, 5.0);
  REQUIRE(peaks.size() == 2);
  CHECK(peaks[0] == doctest::Approx(10.0));
  CHECK(peaks[1] == doctest::Approx(50.0));
}

TEST_CASE("complete_grid") {
  const auto full = complete_grid({100, 200, 400}, 100, 0, 500);
  CHECK(full == std::vector<double>{0, 100, 200, 300, 400, 500});
  const auto single = complete_grid({37}, 50, 0, 200);
  CHECK(single == std::vector<double>{37, 87, 137, 187});
  const auto jitter = complete_grid({102, 198, 301, 399, 500}, 100, 50, 450);
  REQUIRE(jitter.size() == 4);
  for (std::size_t k = 0; k < jitter.size(); ++k) {
    CHECK(jitter[k] == doctest::Approx(100.0 * (k + 1)));
  }
  for (std::size_t k = 1; k < jitter.size(); ++k) CHECK(jitter[k] - jitter[k - 1] == doctest::Approx(100.0));
  CHECK_THROWS_AS(complete_grid({}, 100, 0, 10), PreconditionError);
  CHECK_THROWS_AS(complete_grid({5}, 0, 0, 10), PreconditionError);
}

TEST_CASE("intersections") {
  const auto p = intersect({0.0, 10.0}, {kPi / 2, 20.0});
  REQUIRE(p);
  CHECK(p->x == doctest::Approx(10.0));
  CHECK(p->y == doctest::Approx(20.0));
  CHECK_FALSE(intersect({0.3, 10.0}, {0.3, 20.0}));

  GridModel g;
  g.found = true;
  for (int k = 0; k < 3; ++k) g.family_a.push_back({0.0, 10.0 + 20 * k});
  for (int k = 0; k < 4; ++k) g.family_b.push_back({kPi / 2, 5.0 + 20 * k});
  CHECK(line_intersections(g, Box{0, 0, 100, 100}).size() == 12);
  CHECK(line_intersections(g, Box{0, 0, 30, 100}).size() == 8);
}

TEST_CASE("refine_intersection: template") {
  const double angle = 3.0 * kPi / 180.0;
  const GrayImage img = cross_image(160, 160, 80, 80, angle);
  const Refined exact = refine_intersection(img, {80, 80}, angle, RefineMethod::Template);
  CHECK(std::hypot(exact.point.x - 80, exact.point.y - 80) <= 0.5);
  CHECK(exact.confidence > 0.8);
  CHECK_FALSE(exact.low_confidence);

  RefineParams wide;
  wide.window = 25;
  const GrayImage off = cross_image(160, 160, 84, 77, angle);
  const Refined r = refine_intersection(off, {80, 80}, angle, RefineMethod::Template, wide);
  CHECK(std::hypot(r.point.x - 84, r.point.y - 77) <= 1.0);

  const Refined blank =
      refine_intersection(GrayImage(100, 100, 200), {50, 50}, angle, RefineMethod::Template);
  CHECK(blank.low_confidence);
  CHECK(blank.point.x == 50);
  CHECK(blank.point.y == 50);
}

TEST_CASE("refine_intersection: closing") {
  const double angle = 3.0 * kPi / 180.0;
  const GrayImage img = cross_image(160, 160, 80, 80, angle);
  const Refined exact = refine_intersection(img, {80, 80}, angle, RefineMethod::Closing);
  CHECK(std::hypot(exact.point.x - 80, exact.point.y - 80) <= 1.0);
  CHECK_FALSE(exact.low_confidence);

  RefineParams wide;
  wide.window = 25;
  const GrayImage off = cross_image(160, 160, 84, 77, angle);
  const Refined r = refine_intersection(off, {80, 80}, angle, RefineMethod::Closing, wide);
  CHECK(std::hypot(r.point.x - 84, r.point.y - 77) <= 1.0);

  const Refined blank =
      refine_intersection(GrayImage(100, 100, 200), {50, 50}, angle, RefineMethod::Closing);
  CHECK(blank.low_confidence);
  CHECK(blank.point.x == 50);
  CHECK_THROWS_AS(refine_intersection(img, {80, 80}, angle, RefineMethod::Closing,
                                      RefineParams{0, 20, 3.0, 0.3, 20, 10}),
                  PreconditionError);
}

TEST_CASE("refine_intersection never leaves the window") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const double cx = 40 + rng() % 80, cy = 40 + rng() % 80;
    const GrayImage img = cross_image(160, 160, cx, cy, 0.05);
    const Point coarse{80.3, 79.6};
    for (auto method : {RefineMethod::Template, RefineMethod::Closing}) {
      RefineParams p;
      p.window = 6;
      const Refined r = refine_intersection(img, coarse, 0.05, method, p);
      CHECK(std::hypot(r.point.x - coarse.x, r.point.y - coarse.y) <= 6.0 + 1e-9);
    }
  }
}

TEST_CASE("infer_missing") {
  std::vector<Slot> slots;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      slots.push_back({{10.0 + 30 * b + 0.1 * a, 5.0 + 30 * a - 0.1 * b}, a, b, true});
    }
  }
  const InferResult same = infer_missing(slots);
  CHECK(same.unfilled.empty());
  for (std::size_t i = 0; i < slots.size(); ++i) {
    CHECK_FALSE(same.filled[i]);
    CHECK(same.points[i].x == slots[i].point.x);
  }

  auto missing = slots;
  missing[5].confident = false;  // a=1, b=1
  const Point truth = missing[5].point;
  missing[5].point = {0, 0};
  const InferResult r = infer_missing(missing);
  CHECK(r.filled[5]);
  CHECK(r.points[5].x == doctest::Approx(truth.x));
  CHECK(r.points[5].y == doctest::Approx(truth.y));

  std::vector<Slot> lonely{{{1, 1}, 0, 0, true}, {{5, 5}, 1, 1, false}};
  const InferResult u = infer_missing(lonely);
  CHECK(u.unfilled == std::vector<std::size_t>{1});
  CHECK(u.points[1].x == 5);
}

TEST_CASE("infer_missing interpolates whole lines but never extrapolates") {
  std::vector<Slot> slots;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 5; ++b) {
      // b = 2 is erased everywhere, b = 4 lies past the last supported line.
      const bool seen = b != 2 && b != 4;
      slots.push_back({{10.0 + 30 * b + 0.1 * a, 5.0 + 30 * a - 0.1 * b}, a, b, seen});
    }
  }
  const InferResult r = infer_missing(slots);
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i].b == 2) {
      CHECK(r.filled[i]);
      CHECK(r.points[i].x == doctest::Approx(slots[i].point.x));
      CHECK(r.points[i].y == doctest::Approx(slots[i].point.y));
    }
    if (slots[i].b == 4) CHECK_FALSE(r.filled[i]);
  }
  CHECK(r.unfilled.size() == 4);
}

TEST_CASE("fit_line") {
  const auto l = fit_line({{3, 0}, {3, 5}, {3, 9}});
  REQUIRE(l);
  CHECK(l->theta == doctest::Approx(0.0));
  CHECK(l->rho == doctest::Approx(3.0));
  CHECK_FALSE(fit_line({{1, 1}}));
  CHECK_FALSE(fit_line({{1, 1}, {1, 1}}));
}
