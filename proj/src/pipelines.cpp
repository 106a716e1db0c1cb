#include "mapseg/pipelines.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "mapseg/components.hpp"
#include "mapseg/morph.hpp"

namespace mapseg::pipelines {
namespace {

using morph::StructuringElement;
constexpr double kPi = std::numbers::pi;

void note(Diagnostics* diag, std::string msg) {
  if (diag) diag->push_back(std::move(msg));
}

GrayImage crop(const GrayImage& img, const Box& b) {
  GrayImage out(b.width(), b.height());
  for (int y = 0; y < b.height(); ++y) {
    for (int x = 0; x < b.width(); ++x) out.at(x, y) = img.at(b.xmin + x, b.ymin + y);
  }
  return out;
}

BinaryMask crop(const BinaryMask& m, const Box& b) {
  BinaryMask out(b.width(), b.height());
  for (int y = 0; y < b.height(); ++y) {
    for (int x = 0; x < b.width(); ++x) out.set(x, y, m.test(b.xmin + x, b.ymin + y));
  }
  return out;
}

BinaryMask paste(const BinaryMask& part, const Box& b, int width, int height) {
  BinaryMask out(width, height);
  for (int y = 0; y < part.height(); ++y) {
    for (int x = 0; x < part.width(); ++x) {
      if (part.test(x, y)) out.set(b.xmin + x, b.ymin + y, true);
    }
  }
  return out;
}

// Mean over a (2r+1)^2 window clipped to the image, via a summed-area table.
GrayImage box_mean(const GrayImage& img, int r) {
  const int W = img.width();
  const int H = img.height();
  std::vector<long long> sat(static_cast<std::size_t>(W + 1) * (H + 1), 0);
  auto S = [&](int x, int y) -> long long& { return sat[static_cast<std::size_t>(y) * (W + 1) + x]; };
  for (int y = 0; y < H; ++y) {
    long long row = 0;
    for (int x = 0; x < W; ++x) {
      row += img.at(x, y);
      S(x + 1, y + 1) = S(x + 1, y) + row;
    }
  }
  GrayImage out(W, H);
  for (int y = 0; y < H; ++y) {
    const int y0 = std::max(0, y - r), y1 = std::min(H, y + r + 1);
    for (int x = 0; x < W; ++x) {
      const int x0 = std::max(0, x - r), x1 = std::min(W, x + r + 1);
      const long long sum = S(x1, y1) - S(x0, y1) - S(x1, y0) + S(x0, y0);
      const long long n = 1LL * (x1 - x0) * (y1 - y0);
      out.at(x, y) = static_cast<std::uint8_t>((sum + n / 2) / n);
    }
  }
  return out;
}

// Nearest-neighbour enlargement of a block-reduced mask back to w x h.
BinaryMask upsample(const BinaryMask& small, int factor, int w, int h) {
  BinaryMask out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      out.set(x, y, small.test(std::min(x / factor, small.width() - 1),
                               std::min(y / factor, small.height() - 1)));
    }
  }
  return out;
}

GrayImage block_mean(const GrayImage& img, int factor) {
  const int w = (img.width() + factor - 1) / factor;
  const int h = (img.height() + factor - 1) / factor;
  GrayImage out(w, h);
  for (int by = 0; by < h; ++by) {
    for (int bx = 0; bx < w; ++bx) {
      long sum = 0, n = 0;
      for (int y = by * factor; y < std::min(img.height(), (by + 1) * factor); ++y) {
        for (int x = bx * factor; x < std::min(img.width(), (bx + 1) * factor); ++x) {
          sum += img.at(x, y);
          ++n;
        }
      }
      out.at(bx, by) = static_cast<std::uint8_t>((sum + n / 2) / n);
    }
  }
  return out;
}

bool on_border(const Box& b, int w, int h, int side) {
  switch (side) {
    case 0: return b.ymin == 0;
    case 1: return b.xmax == w - 1;
    case 2: return b.ymax == h - 1;
    default: return b.xmin == 0;
  }
}

}  // namespace

PipelineConfig PipelineConfig::desk() {
  PipelineConfig c;
  c.task1.area_close = 10;
  c.task1.min_area = 500;
  c.task1.max_area = 10000;
  c.task1.river_subsample = 2;
  c.task1.river_open_radius = 2;
  c.task1.river_close_radius = 5;
  c.task1.river_min_area = 500;
  c.task2.tophat_size = 15;
  c.task2.marker_gap = 5;
  c.task2.margin_smooth = 2;
  c.task2.line_close = 3;
  c.binarize.min_area = 3;
  c.task3_uwb.refine.window = 5;
  c.task3_uwb.line_max_width = 5;
  c.task3_cmm.subsample = 4;
  c.task3_cmm.pre_erosion = 4;
  c.task3_cmm.refine_window = 8;
  return c;
}

BinaryMask river_mask(const GrayImage& gray, const Task1Config& cfg) {
  const int k = std::max(1, cfg.river_subsample);
  const GrayImage small = block_mean(gray, k);
  const GrayImage opened = morph::open(small, StructuringElement::disk(cfg.river_open_radius));
  const GrayImage closed = morph::close(opened, StructuringElement::disk(cfg.river_close_radius));
  const thresh::Histogram256 hist = thresh::Histogram256::of(closed);
  int occupied = 0;
  for (auto b : hist.bins) occupied += b > 0;
  if (occupied < 2) return BinaryMask(gray.width(), gray.height());
  const BinaryMask dark =
      thresh::binarize(closed, thresh::otsu_threshold(hist), thresh::Polarity::DarkForeground);
  const long long min_area = cfg.river_min_area / (1LL * k * k);
  const BinaryMask rivers = components::filter_components(
      components::label_components(dark), [&](const components::ComponentStats& s) {
        return s.area >= min_area && s.fill_ratio < cfg.river_max_fill;
      });
  return upsample(rivers, k, gray.width(), gray.height());
}

BinaryMask task1_blocks_cmm2(const RgbImage& img, const BinaryMask& content,
                             const PipelineConfig& cfg, Diagnostics* diag) {
  require_same_size(img, content, "task1: image and content mask");
  const Box box = bounding_box(content);
  if (!box.valid()) throw PreconditionError("task1: empty content mask");
  const Task1Config& c = cfg.task1;

  // Work on the content bounding box; pixels outside the content read as paper.
  GrayImage gray = crop(to_luminance(img), box);
  const BinaryMask inside = crop(content, box);
  for (std::size_t i = 0; i < gray.size(); ++i) {
    if (!inside.test(i)) gray[i] = 255;
  }

  const GrayImage closed = morph::area_filter(gray, c.area_close, morph::AreaMode::Closing);
  const GrayImage filled = morph::fill_holes(invert(closed));
  const GrayImage grad = morph::gradient(filled, StructuringElement::square(3));
  const morph::MarkerSpec markers = morph::minima_by_dynamics(grad, c.dynamics_h);
  if (markers.count == 0) {
    note(diag, "task1: no minima");
    return BinaryMask(img.width(), img.height());
  }
  GrayImage seed(grad.width(), grad.height(), 255);
  for (std::size_t i = 0; i < seed.size(); ++i) {
    if (markers.labels[i] > 0) seed[i] = grad[i];
  }
  const GrayImage relief =
      morph::geodesic_reconstruct(seed, grad, morph::ReconstructDirection::ByErosion);
  const LabelImage regions = morph::watershed(relief, markers);

  BinaryMask blocks = components::filter_components(regions, [&](const components::ComponentStats& s) {
    return s.area >= c.min_area && s.area <= c.max_area && s.fill_ratio >= c.min_fill_ratio;
  });
  blocks = morph::fill_holes(blocks);

  const BinaryMask water = river_mask(gray, c);
  if (water.any()) {
    const LabelImage labels = components::label_components(blocks);
    const std::size_t before = components::component_stats(labels).size();
    blocks = components::filter_components(
        labels, [&](const components::ComponentStats& s) { return *s.overlap < c.river_overlap; },
        &water);
    const std::size_t after = components::component_stats(components::label_components(blocks)).size();
    if (after < before) note(diag, "task1: removed " + std::to_string(before - after) + " river pieces");
  }
  return paste(blocks, box, img.width(), img.height()) & content;
}

BinaryMask task2_content_cmm(const RgbImage& img, const PipelineConfig& cfg, Diagnostics* diag) {
  const Task2Config& c = cfg.task2;
  const int W = img.width();
  const int H = img.height();
  GrayImage gray = to_luminance(img);

  // (i) margin: bright quasi-flat zones spanning most of the border.
  const LabelImage zones = morph::quasi_flat_zones(
      c.margin_smooth > 0 ? box_mean(gray, c.margin_smooth) : gray, c.qfz_slope);
  BinaryMask margin(W, H);
  {
    const auto stats = components::component_stats(zones);
    std::vector<double> sum(stats.size() + 1, 0.0);
    for (std::size_t i = 0; i < zones.size(); ++i) sum[static_cast<std::size_t>(zones[i])] += gray[i];
    // A zone that reaches into the centred rectangle is map paper.
    std::vector<char> central(stats.size() + 1, 0);
    const int cw = static_cast<int>(std::lround(W * c.center_fraction));
    const int ch = static_cast<int>(std::lround(H * c.center_fraction));
    for (int y = (H - ch) / 2; y < (H - ch) / 2 + ch; ++y) {
      for (int x = (W - cw) / 2; x < (W - cw) / 2 + cw; ++x) central[static_cast<std::size_t>(zones.at(x, y))] = 1;
    }
    std::vector<char> is_margin(stats.size() + 1, 0);
    for (const auto& s : stats) {
      if (central[static_cast<std::size_t>(s.label)]) continue;
      int sides = 0;
      for (int side = 0; side < 4; ++side) sides += on_border(s.bbox, W, H, side);
      if (sides < c.margin_min_sides) continue;
      if (sum[static_cast<std::size_t>(s.label)] / static_cast<double>(s.area) < c.margin_min_level) continue;
      is_margin[static_cast<std::size_t>(s.label)] = 1;
    }
    for (std::size_t i = 0; i < zones.size(); ++i) {
      if (is_margin[static_cast<std::size_t>(zones[i])]) margin.set(i, true);
    }
  }
  if (!margin.any()) {
    note(diag, "task2: no margin found; the whole image is map content");
    return BinaryMask(W, H, true);
  }
  for (std::size_t i = 0; i < gray.size(); ++i) {
    if (margin.test(i)) gray[i] = 255;
  }

  // (ii) dark line structure.
  const GrayImage bth = morph::top_hat(gray, StructuringElement::square(c.tophat_size), morph::Polarity::Black);
  const thresh::Histogram256 hist = thresh::Histogram256::of(bth);
  int occupied = 0;
  for (auto b : hist.bins) occupied += b > 0;
  BinaryMask lines(W, H);
  if (occupied >= 2) {
    lines = thresh::binarize(bth, thresh::otsu_threshold(hist), thresh::Polarity::BrightForeground);
  }
  if (c.line_close > 0) {
    // Axis-aligned closings bridge breaks in frames and near-axis lines
    // without merging parallel strokes.
    const int len = 2 * c.line_close + 1;
    lines = morph::close(lines, StructuringElement::line(len, 0.0)) |
            morph::close(lines, StructuringElement::line(len, 90.0));
  }

  // (iii)-(iv) structure connected to the centred rectangle.
  const int rw = std::max(1, static_cast<int>(std::lround(W * c.center_fraction)));
  const int rh = std::max(1, static_cast<int>(std::lround(H * c.center_fraction)));
  BinaryMask rect(W, H);
  const int rx = (W - rw) / 2;
  const int ry = (H - rh) / 2;
  for (int y = ry; y < ry + rh; ++y) {
    for (int x = rx; x < rx + rw; ++x) rect.set(x, y, true);
  }
  const BinaryMask connected = morph::geodesic_reconstruct(rect, lines | rect);

  // (v) watershed on the inverted distance to that structure.
  const RealImage dist = morph::distance_transform(connected);
  GrayImage relief(W, H);
  for (std::size_t i = 0; i < relief.size(); ++i) {
    relief[i] = static_cast<std::uint8_t>(255 - std::min(255L, std::lround(dist[i])));
  }
  const BinaryMask enclosed = morph::fill_holes(connected);
  const BinaryMask inner =
      rect | morph::erode(enclosed, StructuringElement::square(2 * c.marker_gap + 1));
  morph::MarkerSpec markers{LabelImage(W, H, 0), 2};
  bool inner_on_border = false;
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      const bool border = x == 0 || y == 0 || x == W - 1 || y == H - 1;
      if (inner.test(x, y)) {
        markers.labels.at(x, y) = 1;
        inner_on_border = inner_on_border || border;
      } else if (border) {
        markers.labels.at(x, y) = 2;
      }
    }
  }
  if (inner_on_border) {
    note(diag, "task2: map structure reaches the image border; keeping the whole image");
    return BinaryMask(W, H, true);
  }
  const LabelImage basins = morph::watershed(relief, markers);
  BinaryMask area(W, H);
  for (std::size_t i = 0; i < area.size(); ++i) area.set(i, basins[i] == 1);

  // (vi) legends: rectangular empty regions against the area boundary.
  const Box ab = bounding_box(area);
  const double bx = c.legend_border * ab.width();
  const double by = c.legend_border * ab.height();
  const long long min_area = std::llround(c.legend_min_area * static_cast<double>(area.count()));
  const LabelImage holes =
      components::label_components(subtract(area, connected), components::Connectivity::Four);
  BinaryMask legends(W, H);
  int found = 0;
  for (const auto& s : components::component_stats(holes)) {
    if (s.area < min_area || s.fill_ratio < c.legend_min_fill) continue;
    const bool near = s.bbox.xmin - ab.xmin <= bx || ab.xmax - s.bbox.xmax <= bx ||
                      s.bbox.ymin - ab.ymin <= by || ab.ymax - s.bbox.ymax <= by;
    if (!near) continue;
    ++found;
    for (int y = s.bbox.ymin; y <= s.bbox.ymax; ++y) {
      for (int x = s.bbox.xmin; x <= s.bbox.xmax; ++x) {
        if (holes.at(x, y) == s.label) legends.set(x, y, true);
      }
    }
  }
  if (found > 0) {
    note(diag, "task2: removed " + std::to_string(found) + " legend boxes");
    legends = morph::dilate(legends, StructuringElement::square(2 * c.legend_dilate + 1));
    area = subtract(area, legends);
  }
  return area;
}

BinaryMask task2_binarize_uwb(const RgbImage& img, const PipelineConfig& cfg) {
  const BinaryMask ink = thresh::recursive_otsu(to_luminance(img), cfg.binarize.otsu);
  return components::remove_small(ink, cfg.binarize.min_area);
}

PointList task3_graticule_uwb(const RgbImage& img, const BinaryMask& content,
                              const PipelineConfig& cfg, Diagnostics* diag) {
  require_same_size(img, content, "task3: image and content mask");
  if (!content.any()) throw PreconditionError("task3: empty content mask");
  const Task3UwbConfig& c = cfg.task3_uwb;
  BinaryMask ink = task2_binarize_uwb(img, cfg);
  BinaryMask inside = content;
  if (c.content_erosion > 0) {
    inside = morph::erode(content, StructuringElement::square(2 * c.content_erosion + 1));
  }
  ink = ink & inside;
  if (c.line_max_width > 0) {
    // Graticule strokes are thin; filled areas would vote along every direction.
    ink = subtract(ink, morph::open(ink, StructuringElement::square(c.line_max_width + 1)));
  }
  if (!ink.any()) {
    note(diag, "task3: no ink inside the content area");
    return {};
  }
  const lines::Accumulator acc = lines::hough_transform(ink, c.theta_step_deg, c.rho_step);
  lines::GridModel grid = lines::select_grid(acc, c.grid);
  if (!grid.found) {
    note(diag, "task3: " + grid.diagnostic);
    return {};
  }
  grid = lines::refine_lines(ink, grid, c.refine_band);
  const GrayImage gray = to_luminance(img);
  PointList out;
  for (const lines::GridPoint& g : lines::grid_points(grid, bounding_box(content))) {
    const lines::Refined r = lines::refine_intersection(gray, g.point, grid.angle,
                                                        lines::RefineMethod::Template, c.refine);
    const int x = static_cast<int>(std::lround(r.point.x));
    const int y = static_cast<int>(std::lround(r.point.y));
    if (content.contains(x, y) && content.test(x, y)) out.push_back(r.point);
  }
  return out;
}

Box detect_frame(const GrayImage& img, const Task3CmmConfig& cfg) {
  const int W = img.width();
  const int H = img.height();
  Box box{0, 0, W - 1, H - 1};
  const thresh::Histogram256 hist = thresh::Histogram256::of(img);
  int occupied = 0;
  for (auto b : hist.bins) occupied += b > 0;
  if (occupied < 2) return box;
  const BinaryMask dark =
      thresh::binarize(img, thresh::otsu_threshold(hist), thresh::Polarity::DarkForeground);
  const int hlen = std::max(3, static_cast<int>(cfg.frame_open * W));
  const int vlen = std::max(3, static_cast<int>(cfg.frame_open * H));
  const BinaryMask horiz = morph::open(dark, StructuringElement::line(hlen, 0.0));
  const BinaryMask vert = morph::open(dark, StructuringElement::line(vlen, 90.0));
  std::vector<int> rows(static_cast<std::size_t>(H), 0), cols(static_cast<std::size_t>(W), 0);
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      rows[static_cast<std::size_t>(y)] += horiz.test(x, y);
      cols[static_cast<std::size_t>(x)] += vert.test(x, y);
    }
  }
  const int band_y = static_cast<int>(cfg.frame_band * H);
  const int band_x = static_cast<int>(cfg.frame_band * W);
  auto is_row = [&](int y) { return rows[static_cast<std::size_t>(y)] >= cfg.frame_coverage * W; };
  auto is_col = [&](int x) { return cols[static_cast<std::size_t>(x)] >= cfg.frame_coverage * H; };
  for (int y = band_y; y >= 0; --y) {
    if (is_row(y)) { box.ymin = y + 1; break; }
  }
  for (int y = H - 1 - band_y; y < H; ++y) {
    if (is_row(y)) { box.ymax = y - 1; break; }
  }
  for (int x = band_x; x >= 0; --x) {
    if (is_col(x)) { box.xmin = x + 1; break; }
  }
  for (int x = W - 1 - band_x; x < W; ++x) {
    if (is_col(x)) { box.xmax = x - 1; break; }
  }
  if (!box.valid()) return Box{0, 0, W - 1, H - 1};
  return box;
}

PointList task3_graticule_cmm(const RgbImage& img, const PipelineConfig& cfg, Diagnostics* diag) {
  const Task3CmmConfig& c = cfg.task3_cmm;
  const int k = std::max(1, c.subsample);
  const GrayImage gray = to_luminance(img);
  GrayImage eroded = gray;
  if (c.pre_erosion > 1) eroded = morph::erode(gray, StructuringElement::square(c.pre_erosion));
  const GrayImage small = k > 1 ? morph::block_min(eroded, k) : eroded;

  const Box frame = detect_frame(small, c);
  if (frame.width() < 2 * c.line_length || frame.height() < 2 * c.line_length) {
    note(diag, "task3: frame interior too small");
    return {};
  }
  GrayImage inner(frame.width(), frame.height());
  for (int y = 0; y < inner.height(); ++y) {
    for (int x = 0; x < inner.width(); ++x) inner.at(x, y) = small.at(frame.xmin + x, frame.ymin + y);
  }

  const lines::DirectionResult dir = lines::best_direction(inner, c.angle_min, c.angle_max,
                                                           c.angle_step, c.line_length, c.tophat_size);
  if (dir.low_confidence) {
    note(diag, "task3: no dominant line direction");
    return {};
  }
  const double alpha = dir.angle_deg;

  // Lines along alpha have normal alpha + 90; lines along alpha + 90 have normal alpha.
  struct Family {
    double normal_deg;
    std::vector<double> rhos;
  };
  struct Profile {
    double normal_deg;
    std::vector<double> values;
    double rho_min, rho_step, period;
  };
  std::vector<Profile> profiles;
  for (double along : {alpha, alpha + 90.0}) {
    const BinaryMask m = lines::directional_lines(inner, c.line_length, along, c.tophat_size);
    const double normal = along + 90.0;
    if (!m.any()) {
      note(diag, "task3: no lines along " + std::to_string(along) + " deg");
      return {};
    }
    const lines::Accumulator sino = lines::radon_transform(m.gray(), {normal});
    const std::vector<double> profile = sino.column(0);
    double period = 0.0;
    try {
      period = lines::grid_period(profile, c.min_period);
    } catch (const PreconditionError& e) {
      note(diag, std::string("task3: period estimation failed: ") + e.what());
      return {};
    }
    profiles.push_back({normal, profile, sino.rho_min, sino.rho_step, period});
  }

  // Whole lines missing from one family double or triple its apparent period.
  if (c.shared_period) {
    Profile& lo_p = profiles[0].period < profiles[1].period ? profiles[0] : profiles[1];
    Profile& hi_p = &lo_p == &profiles[0] ? profiles[1] : profiles[0];
    for (int n : {2, 3}) {
      if (std::abs(hi_p.period / lo_p.period - n) < 0.1 * n) {
        note(diag, "task3: period " + std::to_string(hi_p.period) + " divided by " + std::to_string(n));
        hi_p.period /= n;
        break;
      }
    }
  }

  std::vector<Family> families;
  for (const Profile& pr : profiles) {
    const double normal = pr.normal_deg;
    const double period = pr.period;
    std::vector<double> peaks = lines::profile_peaks(pr.values, 0.5 * period, c.peak_floor);
    if (peaks.empty()) {
      note(diag, "task3: no line peaks");
      return {};
    }
    for (double& p : peaks) p = pr.rho_min + p * pr.rho_step;
    const double t = normal * kPi / 180.0;
    double lo = 1e300, hi = -1e300;
    for (double x : {0.0, inner.width() - 1.0}) {
      for (double y : {0.0, inner.height() - 1.0}) {
        const double r = x * std::cos(t) + y * std::sin(t);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
      }
    }
    families.push_back({normal, lines::complete_grid(peaks, period, lo, hi)});
  }

  // Coarse crossings in full-resolution coordinates.
  const double half = (k - 1) / 2.0;
  std::vector<lines::Slot> slots;
  const Box full_frame{k * frame.xmin, k * frame.ymin, std::min(img.width() - 1, k * frame.xmax + k - 1),
                       std::min(img.height() - 1, k * frame.ymax + k - 1)};
  lines::RefineParams rp;
  rp.window = c.refine_window;
  rp.cross_length = c.cross_length;
  rp.contrast_min = c.contrast_min;
  const double alpha_rad = alpha * kPi / 180.0;
  for (std::size_t a = 0; a < families[0].rhos.size(); ++a) {
    for (std::size_t b = 0; b < families[1].rhos.size(); ++b) {
      const auto p = lines::intersect({families[0].normal_deg * kPi / 180.0, families[0].rhos[a]},
                                      {families[1].normal_deg * kPi / 180.0, families[1].rhos[b]});
      if (!p) continue;
      const Point coarse{k * (p->x + frame.xmin) + half, k * (p->y + frame.ymin) + half};
      if (!full_frame.contains(coarse.x, coarse.y)) continue;
      const lines::Refined r =
          lines::refine_intersection(gray, coarse, alpha_rad, lines::RefineMethod::Closing, rp);
      slots.push_back({r.point, static_cast<int>(a), static_cast<int>(b), !r.low_confidence});
    }
  }
  std::set<int> conf_a, conf_b;
  int confirmed = 0;
  for (const lines::Slot& s : slots) {
    if (!s.confident) continue;
    ++confirmed;
    conf_a.insert(s.a);
    conf_b.insert(s.b);
  }
  if (confirmed < c.min_confirmed || conf_a.size() < 2 || conf_b.size() < 2) {
    note(diag, "task3: only " + std::to_string(confirmed) + " crossings confirmed, no graticule");
    return {};
  }
  const lines::InferResult inferred = lines::infer_missing(slots);
  PointList out;
  std::size_t dropped = 0;
  std::size_t next_unfilled = 0;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (next_unfilled < inferred.unfilled.size() && inferred.unfilled[next_unfilled] == i) {
      ++next_unfilled;
      ++dropped;
      continue;
    }
    const Point& p = inferred.points[i];
    if (full_frame.contains(p.x, p.y)) out.push_back(p);
  }
  if (dropped > 0) note(diag, "task3: dropped " + std::to_string(dropped) + " crossings without support");
  return out;
}

}  // namespace mapseg::pipelines
