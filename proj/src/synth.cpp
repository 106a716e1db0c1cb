#include "mapseg/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace mapseg::synth {
namespace {

struct Color {
  double r, g, b;
};

constexpr Color kPaper{235, 230, 215};
constexpr Color kFrameInk{35, 30, 30};
constexpr Color kBlockInk{45, 40, 35};
constexpr Color kBlockFill{222, 205, 190};
constexpr Color kGridInk{110, 110, 125};
constexpr Color kTextInk{50, 45, 45};
constexpr Color kWater{160, 185, 205};

class Canvas {
 public:
  Canvas(int w, int h) : w_(w), h_(h), px_(static_cast<std::size_t>(w) * h, kPaper) {}
  void paint(int x, int y, Color c, double alpha = 1.0) {
    if (x < 0 || y < 0 || x >= w_ || y >= h_ || alpha <= 0.0) return;
    Color& p = px_[static_cast<std::size_t>(y) * w_ + x];
    alpha = std::min(alpha, 1.0);
    p.r = p.r * (1 - alpha) + c.r * alpha;
    p.g = p.g * (1 - alpha) + c.g * alpha;
    p.b = p.b * (1 - alpha) + c.b * alpha;
  }
  void fill_rect(const Box& b, Color c) {
    for (int y = b.ymin; y <= b.ymax; ++y) {
      for (int x = b.xmin; x <= b.xmax; ++x) paint(x, y, c);
    }
  }
  // Outline of stroke s drawn inside the box.
  void stroke_rect(const Box& b, int s, Color c) {
    for (int y = b.ymin; y <= b.ymax; ++y) {
      for (int x = b.xmin; x <= b.xmax; ++x) {
        if (x - b.xmin < s || b.xmax - x < s || y - b.ymin < s || b.ymax - y < s) paint(x, y, c);
      }
    }
  }
  RgbImage image() const {
    RgbImage out(w_, h_);
    auto q = [](double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); };
    for (std::size_t i = 0; i < px_.size(); ++i) out[i] = {q(px_[i].r), q(px_[i].g), q(px_[i].b)};
    return out;
  }

 private:
  int w_, h_;
  std::vector<Color> px_;
};

// Uniform helpers over the raw engine so layouts do not depend on the
// standard library's distribution implementations.
struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}
  double uniform() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }
  int range(int lo, int hi) {  // inclusive
    if (hi <= lo) return lo;
    return lo + static_cast<int>(eng() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  double gauss() {
    const double u1 = std::max(uniform(), 1e-300);
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }
};

double box_distance(const Box& b, double x, double y) {
  const double dx = std::max({b.xmin - x, 0.0, x - b.xmax});
  const double dy = std::max({b.ymin - y, 0.0, y - b.ymax});
  return std::hypot(dx, dy);
}

int box_gap(const Box& a, const Box& b) {
  const int gx = std::max({a.xmin - b.xmax - 1, b.xmin - a.xmax - 1, 0});
  const int gy = std::max({a.ymin - b.ymax - 1, b.ymin - a.ymax - 1, 0});
  return std::max(gx, gy);
}

struct Block {
  Box box;
  Box notch;  // removed corner; invalid when rectangular
  bool contains(int x, int y) const {
    return box.contains(x, y) && !(notch.valid() && notch.contains(x, y));
  }
  long long area() const { return box.area() - notch.area(); }
};

struct Grid {
  double cx, cy, c, s, period, phase;
  std::vector<double> offsets;  // shared by both families
  // Offset of p along the family normal, relative to the centre.
  double along_a(double x, double y) const { return (x - cx) * c + (y - cy) * s; }
  double along_b(double x, double y) const { return -(x - cx) * s + (y - cy) * c; }
  Point crossing(double oa, double ob) const {
    return {cx + oa * c - ob * s, cy + oa * s + ob * c};
  }
};

struct River {
  double amplitude, wavelength, center, width;
  double at(double x) const {
    return center + amplitude * std::sin(2 * std::numbers::pi * x / wavelength);
  }
  double distance(double x, double y) const {
    const double slope =
        amplitude * 2 * std::numbers::pi / wavelength * std::cos(2 * std::numbers::pi * x / wavelength);
    return std::abs(y - at(x)) / std::sqrt(1 + slope * slope);
  }
};

void draw_glyphs(Canvas& cv, const Box& area, int glyph_w, int glyph_h, int pitch_x, int pitch_y,
                 Rng& rng) {
  for (int y = area.ymin; y + glyph_h - 1 <= area.ymax; y += pitch_y) {
    for (int x = area.xmin; x + glyph_w - 1 <= area.xmax; x += pitch_x) {
      if (rng.uniform() < 0.2) continue;  // word gaps
      cv.fill_rect({x, y, x + glyph_w - 1, y + glyph_h - 1}, kTextInk);
    }
  }
}

void degrade(RgbImage& img, double speck_density, double break_probability, double sigma,
             Rng& rng) {
  const int w = img.width();
  const int h = img.height();
  if (break_probability > 0.0) {
    const RgbImage src = img;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (luminance(src.at(x, y)) > 160 || rng.uniform() >= break_probability) continue;
        const int r = rng.range(1, 2);
        for (int dy = -r; dy <= r; ++dy) {
          for (int dx = -r; dx <= r; ++dx) {
            if (dx * dx + dy * dy > r * r || !img.contains(x + dx, y + dy)) continue;
            img.at(x + dx, y + dy) = {235, 230, 215};
          }
        }
      }
    }
  }
  if (speck_density > 0.0) {
    const long long n = std::llround(speck_density * w * h);
    for (long long i = 0; i < n; ++i) {
      const int x = rng.range(0, w - 1);
      const int y = rng.range(0, h - 1);
      const int sw = rng.range(1, 3);
      const int sh = rng.range(1, 3);
      for (int v = y; v < std::min(h, y + sh); ++v) {
        for (int u = x; u < std::min(w, x + sw); ++u) img.at(u, v) = {50, 45, 45};
      }
    }
  }
  if (sigma > 0.0) {
    for (std::size_t i = 0; i < img.size(); ++i) {
      const double n = sigma * rng.gauss();
      auto add = [&](std::uint8_t v) {
        return static_cast<std::uint8_t>(std::clamp(std::lround(v + n), 0L, 255L));
      };
      img[i] = {add(img[i].r), add(img[i].g), add(img[i].b)};
    }
  }
}

void validate(const SheetSpec& s) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw PreconditionError("synth: " + what);
  };
  require(s.width >= 64 && s.height >= 64, "sheet must be at least 64x64");
  require(s.margin >= 0 && s.outer_stroke >= 1 && s.inner_stroke >= 1 && s.frame_gap >= 1,
          "frame geometry must be positive");
  require(s.frame_count == 1 || s.frame_count == 2, "frame_count must be 1 or 2");
  require(s.legend_count >= 0 && s.legend_count <= 4, "legend_count must be in [0, 4]");
  require(s.blocks >= 0 && s.block_min >= 3 * s.block_stroke && s.block_max >= s.block_min,
          "block sizes must hold their outline");
  require(s.grid_period > 4 * s.grid_stroke, "grid period must exceed 4 strokes");
  require(s.grid_stroke > 0 && s.grid_lines >= 0, "grid stroke must be positive");
  require(s.block_gap >= 3, "blocks need at least 3 px between them");
  require(s.dash_on >= 0 && s.dash_off >= 0, "dash lengths must be non-negative");
  require(s.speck_density >= 0 && s.break_probability >= 0 && s.noise_sigma >= 0,
          "noise parameters must be non-negative");
}

}  // namespace

Sheet generate(const SheetSpec& spec) {
  validate(spec);
  const int W = spec.width;
  const int H = spec.height;
  Rng rng(spec.seed);
  Canvas cv(W, H);

  const Box outer{spec.margin, spec.margin, W - 1 - spec.margin, H - 1 - spec.margin};
  const int inset = spec.frame_count == 2 ? spec.outer_stroke + spec.frame_gap : 0;
  const Box inner{outer.xmin + inset, outer.ymin + inset, outer.xmax - inset, outer.ymax - inset};
  const Box content{inner.xmin + spec.inner_stroke, inner.ymin + spec.inner_stroke,
                    inner.xmax - spec.inner_stroke, inner.ymax - spec.inner_stroke};
  if (content.width() < 32 || content.height() < 32) {
    throw PreconditionError("synth: frames leave no room for map content");
  }

  std::vector<Box> legends;
  for (int i = 0; i < spec.legend_count; ++i) {
    const int lw = std::min(spec.legend_width, content.width() / 3);
    const int lh = std::min(spec.legend_height, content.height() / 3);
    const bool right = i == 0 || i == 3;
    const bool top = i == 0 || i == 2;
    const int x0 = right ? content.xmax - lw + 1 : content.xmin;
    const int y0 = top ? content.ymin : content.ymax - lh + 1;
    legends.push_back({x0, y0, x0 + lw - 1, y0 + lh - 1});
  }

  Grid grid{(W - 1) / 2.0, (H - 1) / 2.0,
            std::cos(spec.grid_angle_deg * std::numbers::pi / 180.0),
            std::sin(spec.grid_angle_deg * std::numbers::pi / 180.0),
            spec.grid_period, spec.grid_phase, {}};
  if (spec.graticule) {
    if (spec.grid_lines > 0) {
      for (int j = 0; j < spec.grid_lines; ++j) {
        grid.offsets.push_back((j - (spec.grid_lines - 1) / 2.0 + spec.grid_phase) * spec.grid_period);
      }
    } else {
      const double reach = std::hypot(content.width(), content.height()) / 2.0 + spec.grid_period;
      const int kmax = static_cast<int>(std::ceil(reach / spec.grid_period));
      for (int k = -kmax; k <= kmax; ++k) grid.offsets.push_back((k + spec.grid_phase) * spec.grid_period);
    }
  }

  auto in_legend = [&](double x, double y) {
    for (const Box& b : legends) {
      if (b.contains(x, y)) return true;
    }
    return false;
  };

  SheetTruth truth;
  truth.content = BinaryMask(W, H);
  for (int y = content.ymin; y <= content.ymax; ++y) {
    for (int x = content.xmin; x <= content.xmax; ++x) {
      if (!in_legend(x, y)) truth.content.set(x, y, true);
    }
  }
  // Crossings anywhere inside the content rectangle constrain block placement;
  // only those on visible content are ground truth.
  PointList all_crossings;
  for (double oa : grid.offsets) {
    for (double ob : grid.offsets) {
      const Point p = grid.crossing(oa, ob);
      if (!content.contains(p.x, p.y)) continue;
      all_crossings.push_back(p);
      if (!in_legend(p.x, p.y)) truth.intersections.push_back(p);
    }
  }

  std::optional<River> river;
  if (spec.river) {
    river = River{content.height() * 0.06, content.width() * 0.9,
                  content.ymin + content.height() * (0.3 + 0.4 * rng.uniform()), spec.river_width};
  }

  // Block layout by rejection sampling.
  std::vector<Block> blocks;
  const int cells = static_cast<int>(grid.offsets.size()) + 1;
  auto cell_of = [&](double x, double y) -> int {
    if (grid.offsets.empty()) return 0;
    auto idx = [&](double o) {
      return static_cast<int>(std::upper_bound(grid.offsets.begin(), grid.offsets.end(), o) -
                              grid.offsets.begin());
    };
    return idx(grid.along_a(x, y)) * cells + idx(grid.along_b(x, y));
  };
  // Paper left per graticule cell once blocks are placed.
  std::vector<long long> cell_free(static_cast<std::size_t>(cells) * cells, 0);
  for (int y = content.ymin; y <= content.ymax; ++y) {
    for (int x = content.xmin; x <= content.xmax; ++x) {
      if (!in_legend(x, y)) ++cell_free[static_cast<std::size_t>(cell_of(x, y))];
    }
  }
  const int clear = spec.block_clearance;
  for (int attempt = 0; attempt < 40000 && static_cast<int>(blocks.size()) < spec.blocks; ++attempt) {
    const int bw = rng.range(spec.block_min, spec.block_max);
    const int bh = rng.range(spec.block_min, spec.block_max);
    const int xlo = content.xmin + clear;
    const int xhi = content.xmax - clear - bw + 1;
    const int ylo = content.ymin + clear;
    const int yhi = content.ymax - clear - bh + 1;
    if (xhi < xlo || yhi < ylo) break;
    Block b;
    b.box = {rng.range(xlo, xhi), rng.range(ylo, yhi), 0, 0};
    b.box.xmax = b.box.xmin + bw - 1;
    b.box.ymax = b.box.ymin + bh - 1;
    if (rng.uniform() < spec.l_shape_fraction) {
      const int nw = static_cast<int>(bw * (0.35 + 0.25 * rng.uniform()));
      const int nh = static_cast<int>(bh * (0.35 + 0.25 * rng.uniform()));
      const bool right = rng.uniform() < 0.5;
      const bool top = rng.uniform() < 0.5;
      const int nx = right ? b.box.xmax - nw + 1 : b.box.xmin;
      const int ny = top ? b.box.ymin : b.box.ymax - nh + 1;
      b.notch = {nx, ny, nx + nw - 1, ny + nh - 1};
    }
    bool ok = true;
    for (const Block& o : blocks) ok = ok && box_gap(b.box, o.box) >= spec.block_gap;
    for (const Box& l : legends) ok = ok && box_gap(b.box, l) >= clear;
    for (const Point& p : all_crossings) ok = ok && box_distance(b.box, p.x, p.y) >= spec.crossing_clearance;
    if (ok && river) {
      for (int x = b.box.xmin; x <= b.box.xmax && ok; ++x) {
        const double half = river->width / 2 + spec.block_gap;
        const double yc = river->at(x);
        ok = yc + half < b.box.ymin || yc - half > b.box.ymax;
      }
    }
    if (!ok) continue;
    const auto cell = static_cast<std::size_t>(
        cell_of((b.box.xmin + b.box.xmax) / 2.0, (b.box.ymin + b.box.ymax) / 2.0));
    if (cell_free[cell] - b.area() < spec.min_street_area) continue;
    cell_free[cell] -= b.area();
    blocks.push_back(b);
  }
  if (static_cast<int>(blocks.size()) < spec.blocks) {
    throw PreconditionError("synth: placed only " + std::to_string(blocks.size()) + " of " +
                            std::to_string(spec.blocks) + " blocks; layout too crowded");
  }

  // Paint back to front: river, graticule, blocks, legends, frames, text.
  if (river) {
    for (int y = content.ymin; y <= content.ymax; ++y) {
      for (int x = content.xmin; x <= content.xmax; ++x) {
        const double d = river->distance(x, y);
        cv.paint(x, y, kWater, std::clamp(river->width / 2 + 0.5 - d, 0.0, 1.0));
      }
    }
  }
  if (!grid.offsets.empty()) {
    const double half = spec.grid_stroke / 2 + 0.5;
    const double dash = spec.dash_on + spec.dash_off;
    auto dashed_off = [&](double t) {
      if (spec.dash_on <= 0.0 || spec.dash_off <= 0.0) return false;
      double m = std::fmod(t, dash);
      if (m < 0) m += dash;
      return m >= spec.dash_on;
    };
    for (int y = content.ymin; y <= content.ymax; ++y) {
      for (int x = content.xmin; x <= content.xmax; ++x) {
        const double oa = grid.along_a(x, y);
        const double ob = grid.along_b(x, y);
        double cover = 0.0;
        for (double o : grid.offsets) {
          const double da = std::abs(oa - o);
          if (da < half && !dashed_off(ob)) cover = std::max(cover, std::min(1.0, half - da));
          const double db = std::abs(ob - o);
          if (db < half && !dashed_off(oa)) cover = std::max(cover, std::min(1.0, half - db));
        }
        cv.paint(x, y, kGridInk, cover);
      }
    }
  }
  truth.blocks = LabelImage(W, H, 0);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const Block& b = blocks[i];
    const int s = spec.block_stroke;
    for (int y = b.box.ymin; y <= b.box.ymax; ++y) {
      for (int x = b.box.xmin; x <= b.box.xmax; ++x) {
        if (!b.contains(x, y)) continue;
        truth.blocks.at(x, y) = static_cast<std::int32_t>(i + 1);
        bool edge = false;
        for (int dy = -s; dy <= s && !edge; ++dy) {
          for (int dx = -s; dx <= s; ++dx) {
            if (std::max(std::abs(dx), std::abs(dy)) < s && !b.contains(x + dx, y + dy)) {
              edge = true;
              break;
            }
          }
        }
        if (edge) {
          cv.paint(x, y, kBlockInk);
        } else {
          cv.paint(x, y, kBlockFill);
          if (spec.hatching && (x + y) % 6 == 0) cv.paint(x, y, kBlockInk, 0.5);
        }
      }
    }
  }
  for (const Box& l : legends) {
    cv.fill_rect(l, kPaper);
    cv.stroke_rect(l, spec.block_stroke, kFrameInk);
    const int pad = spec.block_stroke + 8;
    draw_glyphs(cv, {l.xmin + pad, l.ymin + pad, l.xmax - pad, l.ymax - pad}, 2, 3, 5, 10, rng);
  }
  if (spec.frame_count == 2) cv.stroke_rect(outer, spec.outer_stroke, kFrameInk);
  cv.stroke_rect(inner, spec.inner_stroke, kFrameInk);
  if (spec.margin_text && spec.margin >= 12) {
    const int gy = spec.margin / 2 - 2;
    draw_glyphs(cv, {W / 3, gy, 2 * W / 3, gy + 4}, 3, 5, 6, 20, rng);
  }

  Sheet sheet{cv.image(), std::move(truth)};
  if (spec.speck_density > 0 || spec.break_probability > 0 || spec.noise_sigma > 0) {
    degrade(sheet.image, spec.speck_density, spec.break_probability, spec.noise_sigma, rng);
  }
  return sheet;
}

RgbImage corrupt(const RgbImage& img, double level, std::uint64_t seed) {
  if (!(level >= 0.0 && level <= 1.0)) throw PreconditionError("corrupt: level must be in [0, 1]");
  RgbImage out = img;
  if (level == 0.0) return out;
  Rng rng(seed);
  degrade(out, 0.0015 * level, 0.02 * level, 20.0 * level, rng);
  return out;
}

}  // namespace mapseg::synth
