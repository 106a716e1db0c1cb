#include "mapseg/lines.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <map>
#include <numbers>
#include <numeric>

#include "mapseg/morph.hpp"
#include "mapseg/thresh.hpp"

namespace mapseg::lines {
namespace {

constexpr double kPi = std::numbers::pi;

double deg2rad(double d) { return d * kPi / 180.0; }

double normalize_pi(double theta) {
  double t = std::fmod(theta, kPi);
  if (t < 0) t += kPi;
  return t;
}

// Angular distance between two undirected normals.
double angle_distance(double a, double b) {
  const double d = normalize_pi(a - b);
  return std::min(d, kPi - d);
}

// Same line re-expressed with theta within pi/2 of `ref`.
LineParam align(LineParam l, double ref) {
  while (l.theta - ref > kPi / 2) {
    l.theta -= kPi;
    l.rho = -l.rho;
  }
  while (l.theta - ref < -kPi / 2) {
    l.theta += kPi;
    l.rho = -l.rho;
  }
  return l;
}

double parabolic_offset(double left, double mid, double right) {
  const double den = left - 2.0 * mid + right;
  if (den >= 0.0) return 0.0;
  return std::clamp(0.5 * (left - right) / den, -0.5, 0.5);
}

struct Cluster {
  double theta = 0.0;
  double weight = 0.0;
  std::vector<LineParam> lines;
};

struct FamilyFit {
  std::map<long long, LineParam> members;  // progression index -> line
  double score = 0.0;
  int missing = 0;
};

FamilyFit fit_family(const std::vector<LineParam>& lines, double period, double tol,
                     double penalty) {
  FamilyFit best;
  bool have = false;
  for (const LineParam& anchor : lines) {
    FamilyFit fit;
    for (const LineParam& l : lines) {
      const double steps = (l.rho - anchor.rho) / period;
      const long long k = std::llround(steps);
      if (std::abs(l.rho - anchor.rho - static_cast<double>(k) * period) > tol) continue;
      auto it = fit.members.find(k);
      if (it == fit.members.end() || l.rating > it->second.rating) fit.members[k] = l;
    }
    double sum = 0.0;
    for (const auto& [k, l] : fit.members) sum += l.rating;
    const long long span = fit.members.rbegin()->first - fit.members.begin()->first + 1;
    fit.missing = static_cast<int>(span - static_cast<long long>(fit.members.size()));
    fit.score = sum - penalty * fit.missing;
    if (!have || fit.score > best.score) {
      best = std::move(fit);
      have = true;
    }
  }
  return best;
}

// Least-squares period and per-family phases for rho = phase_f + k period.
double refit_period(const std::vector<const FamilyFit*>& fams, double period) {
  double num = 0.0;
  double den = 0.0;
  for (const FamilyFit* f : fams) {
    if (f->members.size() < 2) continue;
    double mk = 0.0, mr = 0.0;
    for (const auto& [k, l] : f->members) {
      mk += static_cast<double>(k);
      mr += l.rho;
    }
    mk /= static_cast<double>(f->members.size());
    mr /= static_cast<double>(f->members.size());
    for (const auto& [k, l] : f->members) {
      num += (static_cast<double>(k) - mk) * (l.rho - mr);
      den += (static_cast<double>(k) - mk) * (static_cast<double>(k) - mk);
    }
  }
  return den > 0.0 ? num / den : period;
}

std::vector<LineParam> complete_family(const FamilyFit& f, double period) {
  double theta = 0.0, weight = 0.0, phase = 0.0;
  for (const auto& [k, l] : f.members) {
    theta += l.theta;
    weight += 1.0;
    phase += l.rho - static_cast<double>(k) * period;
  }
  theta /= weight;
  phase /= weight;
  std::vector<LineParam> out;
  const long long k0 = f.members.begin()->first;
  const long long k1 = f.members.rbegin()->first;
  for (long long k = k0; k <= k1; ++k) {
    auto it = f.members.find(k);
    if (it != f.members.end()) {
      out.push_back(it->second);
    } else {
      out.push_back({theta, phase + static_cast<double>(k) * period, 0.0, true});
    }
  }
  std::sort(out.begin(), out.end(),
            [](const LineParam& a, const LineParam& b) { return a.rho < b.rho; });
  return out;
}

double family_mean_theta(const std::vector<LineParam>& lines) {
  double s = 0.0;
  int n = 0;
  for (const LineParam& l : lines) {
    if (l.inserted) continue;
    s += l.theta;
    ++n;
  }
  if (n == 0) {
    for (const LineParam& l : lines) s += l.theta;
    n = static_cast<int>(lines.size());
  }
  return n ? s / n : 0.0;
}

double ncc_at(const GrayImage& img, const GrayImage& tpl, int cx, int cy) {
  const int arm = tpl.width() / 2;
  double st = 0, si = 0, stt = 0, sii = 0, sti = 0;
  int n = 0;
  for (int v = 0; v < tpl.height(); ++v) {
    const int y = cy + v - arm;
    if (y < 0 || y >= img.height()) continue;
    for (int u = 0; u < tpl.width(); ++u) {
      const int x = cx + u - arm;
      if (x < 0 || x >= img.width()) continue;
      const double t = tpl.at(u, v);
      const double i = img.at(x, y);
      st += t;
      si += i;
      stt += t * t;
      sii += i * i;
      sti += t * i;
      ++n;
    }
  }
  if (n < 2) return 0.0;
  const double vt = stt - st * st / n;
  const double vi = sii - si * si / n;
  if (vt <= 1e-9 || vi <= 1e-9) return 0.0;
  return (sti - st * si / n) / std::sqrt(vt * vi);
}

Point clamp_to_window(const Point& p, const Point& coarse, double window) {
  const double dx = p.x - coarse.x;
  const double dy = p.y - coarse.y;
  const double d = std::hypot(dx, dy);
  if (d <= window) return p;
  return {coarse.x + dx * window / d, coarse.y + dy * window / d};
}

Refined refine_template(const GrayImage& img, const Point& coarse, double angle,
                        const RefineParams& params) {
  const GrayImage tpl = cross_template(params.template_arm, params.template_stroke, angle);
  const int w = params.window;
  const int cx = static_cast<int>(std::lround(coarse.x));
  const int cy = static_cast<int>(std::lround(coarse.y));
  const int side = 2 * w + 1;
  std::vector<double> score(static_cast<std::size_t>(side) * side, 0.0);
  double best = -2.0;
  int bx = 0, by = 0;
  for (int dy = -w; dy <= w; ++dy) {
    for (int dx = -w; dx <= w; ++dx) {
      const double s = ncc_at(img, tpl, cx + dx, cy + dy);
      score[static_cast<std::size_t>(dy + w) * side + (dx + w)] = s;
      if (s > best) {
        best = s;
        bx = dx;
        by = dy;
      }
    }
  }
  if (best < params.min_ncc) return {coarse, std::max(best, 0.0), true};
  auto at = [&](int dx, int dy) { return score[static_cast<std::size_t>(dy + w) * side + (dx + w)]; };
  double ox = 0.0, oy = 0.0;
  if (bx > -w && bx < w) ox = parabolic_offset(at(bx - 1, by), best, at(bx + 1, by));
  if (by > -w && by < w) oy = parabolic_offset(at(bx, by - 1), best, at(bx, by + 1));
  const Point p{cx + bx + ox, cy + by + oy};
  return {clamp_to_window(p, coarse, w), best, false};
}

Refined refine_closing(const GrayImage& img, const Point& coarse, double angle,
                       const RefineParams& params) {
  const int w = params.window;
  const int margin = w + params.cross_length;
  const int cx = static_cast<int>(std::lround(coarse.x));
  const int cy = static_cast<int>(std::lround(coarse.y));
  const int x0 = std::max(0, cx - margin);
  const int y0 = std::max(0, cy - margin);
  const int x1 = std::min(img.width() - 1, cx + margin);
  const int y1 = std::min(img.height() - 1, cy + margin);
  if (x1 < x0 || y1 < y0) return {coarse, 0.0, true};
  GrayImage sub(x1 - x0 + 1, y1 - y0 + 1);
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) sub.at(x - x0, y - y0) = img.at(x, y);
  }
  const double deg = angle * 180.0 / kPi;
  const GrayImage closed =
      morph::close(sub, morph::StructuringElement::rotated_cross(params.cross_length, deg));
  int lo = 256, hi = -1;
  for (int y = std::max(y0, cy - w); y <= std::min(y1, cy + w); ++y) {
    for (int x = std::max(x0, cx - w); x <= std::min(x1, cx + w); ++x) {
      const int v = closed.at(x - x0, y - y0);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (hi < 0) return {coarse, 0.0, true};
  const double contrast = hi - lo;
  if (contrast < params.contrast_min) return {coarse, contrast, true};
  double sx = 0, sy = 0;
  int n = 0;
  for (int y = std::max(y0, cy - w); y <= std::min(y1, cy + w); ++y) {
    for (int x = std::max(x0, cx - w); x <= std::min(x1, cx + w); ++x) {
      if (closed.at(x - x0, y - y0) == lo) {
        sx += x;
        sy += y;
        ++n;
      }
    }
  }
  return {clamp_to_window({sx / n, sy / n}, coarse, w), contrast, false};
}

}  // namespace

std::vector<double> Accumulator::column(int t) const {
  return {values.begin() + static_cast<std::ptrdiff_t>(t) * rho_bins,
          values.begin() + static_cast<std::ptrdiff_t>(t + 1) * rho_bins};
}

double Accumulator::total() const { return std::accumulate(values.begin(), values.end(), 0.0); }

Accumulator hough_transform(const BinaryMask& mask, double theta_step_deg, double rho_step) {
  if (!(theta_step_deg > 0.0) || !(rho_step > 0.0)) {
    throw PreconditionError("hough_transform: steps must be positive");
  }
  std::vector<std::pair<int, int>> pts;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (mask.test(x, y)) pts.emplace_back(x, y);
    }
  }
  if (pts.empty()) throw PreconditionError("hough_transform: empty mask");
  const Box box = bounding_box(mask);

  Accumulator acc;
  const int n_theta = std::max(1, static_cast<int>(std::lround(180.0 / theta_step_deg)));
  for (int t = 0; t < n_theta; ++t) acc.thetas.push_back(deg2rad(t * theta_step_deg));
  const double reach = std::hypot(mask.width(), mask.height());
  const int half = static_cast<int>(std::ceil(reach / rho_step));
  acc.rho_step = rho_step;
  acc.rho_min = -half * rho_step;
  acc.rho_bins = 2 * half + 1;
  acc.values.assign(static_cast<std::size_t>(n_theta) * acc.rho_bins, 0.0);
  acc.extent_width = box.width();
  acc.extent_height = box.height();

  std::vector<std::uint32_t> row(static_cast<std::size_t>(acc.rho_bins));
  for (int t = 0; t < n_theta; ++t) {
    std::fill(row.begin(), row.end(), 0u);
    const double c = std::cos(acc.thetas[static_cast<std::size_t>(t)]) / rho_step;
    const double s = std::sin(acc.thetas[static_cast<std::size_t>(t)]) / rho_step;
    for (const auto& [x, y] : pts) {
      const long r = std::lround(x * c + y * s) + half;
      ++row[static_cast<std::size_t>(r)];
    }
    for (int r = 0; r < acc.rho_bins; ++r) acc.at(t, r) = row[static_cast<std::size_t>(r)];
  }
  return acc;
}

Accumulator radon_transform(const GrayImage& img, const std::vector<double>& angles_deg) {
  if (angles_deg.empty()) throw PreconditionError("radon_transform: no angles");
  Accumulator acc;
  for (double a : angles_deg) acc.thetas.push_back(deg2rad(a));
  const int half = static_cast<int>(std::ceil(std::hypot(img.width(), img.height()))) + 1;
  acc.rho_min = -half;
  acc.rho_step = 1.0;
  acc.rho_bins = 2 * half + 2;
  acc.values.assign(acc.thetas.size() * static_cast<std::size_t>(acc.rho_bins), 0.0);
  acc.extent_width = img.width();
  acc.extent_height = img.height();
  for (int t = 0; t < acc.theta_bins(); ++t) {
    const double c = std::cos(acc.thetas[static_cast<std::size_t>(t)]);
    const double s = std::sin(acc.thetas[static_cast<std::size_t>(t)]);
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x) {
        const double v = img.at(x, y);
        if (v == 0.0) continue;
        const double pos = x * c + y * s + half;
        const int i = static_cast<int>(std::floor(pos));
        const double f = pos - i;
        acc.at(t, i) += v * (1.0 - f);
        acc.at(t, i + 1) += v * f;
      }
    }
  }
  return acc;
}

std::vector<LineParam> accumulator_peaks(const Accumulator& acc, const GridSelectParams& params) {
  double global = 0.0;
  for (double v : acc.values) global = std::max(global, v);
  if (global <= 0.0) return {};
  double floor = params.peak_floor * global;
  if (acc.extent_width > 0) {
    floor = std::max(floor, params.min_votes_fraction *
                                std::min(acc.extent_width, acc.extent_height));
  }
  struct Cand {
    double value;
    std::size_t index;
  };
  std::vector<Cand> cands;
  const int nt = acc.theta_bins();
  for (int t = 0; t < nt; ++t) {
    for (int r = 0; r < acc.rho_bins; ++r) {
      const double v = acc.at(t, r);
      if (v < floor || v <= 0.0) continue;
      bool peak = true;
      for (int dt = -1; dt <= 1 && peak; ++dt) {
        for (int dr = -1; dr <= 1; ++dr) {
          if (dt == 0 && dr == 0) continue;
          const int tt = t + dt;
          const int rr = r + dr;
          if (tt < 0 || tt >= nt || rr < 0 || rr >= acc.rho_bins) continue;
          const double u = acc.at(tt, rr);
          const bool earlier = dt < 0 || (dt == 0 && dr < 0);
          if (u > v || (earlier && u == v)) {
            peak = false;
            break;
          }
        }
      }
      if (peak) cands.push_back({v, static_cast<std::size_t>(t) * acc.rho_bins + r});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    return a.value != b.value ? a.value > b.value : a.index < b.index;
  });
  std::vector<LineParam> out;
  const double nms_theta = deg2rad(params.nms_theta_deg);
  for (const Cand& c : cands) {
    const int t = static_cast<int>(c.index / static_cast<std::size_t>(acc.rho_bins));
    const int r = static_cast<int>(c.index % static_cast<std::size_t>(acc.rho_bins));
    const LineParam l{acc.thetas[static_cast<std::size_t>(t)], acc.rho_of(r), c.value, false};
    bool keep = true;
    for (const LineParam& o : out) {
      const LineParam a = align(l, o.theta);
      if (std::abs(a.theta - o.theta) <= nms_theta && std::abs(a.rho - o.rho) <= params.nms_rho) {
        keep = false;
        break;
      }
    }
    if (keep) out.push_back(l);
  }
  return out;
}

GridModel select_grid(const Accumulator& acc, const GridSelectParams& params) {
  GridModel none;
  const std::vector<LineParam> peaks = accumulator_peaks(acc, params);
  if (static_cast<int>(peaks.size()) < params.expected_min_lines) {
    none.diagnostic = "no grid: " + std::to_string(peaks.size()) + " line peaks found";
    return none;
  }
  double penalty = params.missing_penalty;
  if (penalty < 0.0) {
    penalty = 0.0;
    for (const LineParam& p : peaks) penalty += p.rating;
    penalty /= static_cast<double>(peaks.size());
  }

  const double tol = deg2rad(params.angle_tol_deg);
  std::vector<Cluster> clusters;
  for (const LineParam& p : peaks) {
    Cluster* home = nullptr;
    for (Cluster& c : clusters) {
      if (angle_distance(p.theta, c.theta) <= tol) {
        home = &c;
        break;
      }
    }
    if (!home) {
      clusters.push_back({p.theta, 0.0, {}});
      home = &clusters.back();
    }
    const LineParam a = align(p, home->theta);
    home->lines.push_back(a);
    home->theta = (home->theta * home->weight + a.theta * a.rating) / (home->weight + a.rating);
    home->weight += a.rating;
  }

  GridModel best;
  best.diagnostic = "no grid: no perpendicular line families";
  bool have = false;
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    for (std::size_t j = i + 1; j < clusters.size(); ++j) {
      const double d = angle_distance(clusters[i].theta, clusters[j].theta);
      if (std::abs(d - kPi / 2) > 2 * tol) continue;
      const Cluster* ca = &clusters[i];
      const Cluster* cb = &clusters[j];
      double angle = normalize_pi(ca->theta);
      if (angle >= kPi / 2) {
        std::swap(ca, cb);
        angle = normalize_pi(ca->theta);
        if (angle >= kPi / 2) angle -= kPi / 2;
      }
      std::vector<LineParam> la, lb;
      for (const LineParam& l : ca->lines) la.push_back(align(l, angle));
      for (const LineParam& l : cb->lines) lb.push_back(align(l, angle + kPi / 2));

      std::vector<double> periods;
      for (const auto* fam : {&la, &lb}) {
        for (std::size_t p = 0; p < fam->size(); ++p) {
          for (std::size_t q = p + 1; q < fam->size(); ++q) {
            const double dd = std::abs((*fam)[q].rho - (*fam)[p].rho);
            if (dd >= params.min_period) periods.push_back(dd);
          }
        }
      }
      std::sort(periods.begin(), periods.end());
      std::vector<double> unique;
      for (double p : periods) {
        if (unique.empty() || p - unique.back() > 0.5) unique.push_back(p);
      }
      for (double period : unique) {
        const FamilyFit fa = fit_family(la, period, params.spacing_tol, penalty);
        const FamilyFit fb = fit_family(lb, period, params.spacing_tol, penalty);
        const int observed = static_cast<int>(fa.members.size() + fb.members.size());
        if (fa.members.empty() || fb.members.empty()) continue;
        if (observed < params.expected_min_lines) continue;
        const double score = fa.score + fb.score;
        if (have && score <= best.rating) continue;
        const double refined = refit_period({&fa, &fb}, period);
        GridModel m;
        m.found = true;
        m.period = refined;
        m.family_a = complete_family(fa, refined);
        m.family_b = complete_family(fb, refined);
        m.angle = angle;
        m.rating = score;
        best = std::move(m);
        have = true;
      }
    }
  }
  return best;
}

std::optional<LineParam> fit_line(const PointList& points) {
  if (points.size() < 2) return std::nullopt;
  double mx = 0, my = 0;
  for (const Point& p : points) {
    mx += p.x;
    my += p.y;
  }
  mx /= static_cast<double>(points.size());
  my /= static_cast<double>(points.size());
  double sxx = 0, syy = 0, sxy = 0;
  for (const Point& p : points) {
    sxx += (p.x - mx) * (p.x - mx);
    syy += (p.y - my) * (p.y - my);
    sxy += (p.x - mx) * (p.y - my);
  }
  if (sxx + syy <= 1e-12) return std::nullopt;
  // Direction of largest spread; the normal is perpendicular to it.
  const double dir = 0.5 * std::atan2(2 * sxy, sxx - syy);
  LineParam l;
  l.theta = normalize_pi(dir + kPi / 2);
  l.rho = mx * std::cos(l.theta) + my * std::sin(l.theta);
  l.rating = static_cast<double>(points.size());
  return l;
}

GridModel refine_lines(const BinaryMask& mask, const GridModel& grid, double band) {
  if (!grid.found) return grid;
  std::vector<std::pair<int, int>> pts;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (mask.test(x, y)) pts.emplace_back(x, y);
    }
  }
  GridModel out = grid;
  const double max_turn = deg2rad(1.0);
  auto refine_family = [&](std::vector<LineParam>& fam) {
    for (LineParam& l : fam) {
      if (l.inserted) continue;
      LineParam cur = l;
      for (double b : {band, std::max(1.5, band / 2)}) {
        PointList near;
        const double c = std::cos(cur.theta);
        const double s = std::sin(cur.theta);
        for (const auto& [x, y] : pts) {
          if (std::abs(x * c + y * s - cur.rho) <= b) near.push_back({double(x), double(y)});
        }
        if (near.size() < 10) break;
        auto fitted = fit_line(near);
        if (!fitted) break;
        LineParam f = align(*fitted, l.theta);
        if (std::abs(f.theta - l.theta) > max_turn) break;
        f.rating = l.rating;
        cur = f;
      }
      l = cur;
    }
    // Re-place inserted lines on the progression of the refined ones.
    const double theta = family_mean_theta(fam);
    double mk = 0, mr = 0;
    int n = 0;
    for (std::size_t k = 0; k < fam.size(); ++k) {
      if (fam[k].inserted) continue;
      mk += static_cast<double>(k);
      mr += fam[k].rho;
      ++n;
    }
    if (n == 0) return;
    mk /= n;
    mr /= n;
    double num = 0, den = 0;
    for (std::size_t k = 0; k < fam.size(); ++k) {
      if (fam[k].inserted) continue;
      num += (static_cast<double>(k) - mk) * (fam[k].rho - mr);
      den += (static_cast<double>(k) - mk) * (static_cast<double>(k) - mk);
    }
    const double step = den > 0 ? num / den : out.period;
    for (std::size_t k = 0; k < fam.size(); ++k) {
      if (!fam[k].inserted) continue;
      fam[k].theta = theta;
      fam[k].rho = mr + (static_cast<double>(k) - mk) * step;
    }
  };
  refine_family(out.family_a);
  refine_family(out.family_b);
  const double ta = family_mean_theta(out.family_a);
  const double tb = family_mean_theta(out.family_b) - kPi / 2;
  out.angle = 0.5 * (ta + tb);
  return out;
}

std::optional<Point> intersect(const LineParam& l1, const LineParam& l2) {
  const double c1 = std::cos(l1.theta), s1 = std::sin(l1.theta);
  const double c2 = std::cos(l2.theta), s2 = std::sin(l2.theta);
  const double det = c1 * s2 - s1 * c2;
  if (std::abs(det) < 1e-9) return std::nullopt;
  return Point{(l1.rho * s2 - l2.rho * s1) / det, (c1 * l2.rho - c2 * l1.rho) / det};
}

std::vector<GridPoint> grid_points(const GridModel& grid, const Box& bounds) {
  std::vector<GridPoint> out;
  for (std::size_t a = 0; a < grid.family_a.size(); ++a) {
    for (std::size_t b = 0; b < grid.family_b.size(); ++b) {
      const auto p = intersect(grid.family_a[a], grid.family_b[b]);
      if (!p || !bounds.contains(p->x, p->y)) continue;
      out.push_back({*p, static_cast<int>(a), static_cast<int>(b)});
    }
  }
  return out;
}

PointList line_intersections(const GridModel& grid, const Box& bounds) {
  PointList out;
  for (const GridPoint& g : grid_points(grid, bounds)) out.push_back(g.point);
  return out;
}

int longest_run(const BinaryMask& mask, double angle_deg) {
  const int w = mask.width();
  const int h = mask.height();
  const double a = deg2rad(angle_deg);
  const double c = std::cos(a);
  const double s = std::sin(a);
  int best = 0;
  if (std::abs(c) >= std::abs(s)) {
    const double slope = s / c;
    const int lo = static_cast<int>(std::floor(std::min(0.0, -slope * (w - 1)))) - 1;
    const int hi = static_cast<int>(std::ceil(std::max(0.0, -slope * (w - 1)))) + h;
    for (int b = lo; b <= hi; ++b) {
      int run = 0;
      for (int x = 0; x < w; ++x) {
        const int y = static_cast<int>(std::lround(b + slope * x));
        const bool on = y >= -1 && y <= h && ((y >= 0 && y < h && mask.test(x, y)) ||
                                              (y - 1 >= 0 && y - 1 < h && mask.test(x, y - 1)) ||
                                              (y + 1 >= 0 && y + 1 < h && mask.test(x, y + 1)));
        run = on ? run + 1 : 0;
        best = std::max(best, run);
      }
    }
  } else {
    const double slope = c / s;
    const int lo = static_cast<int>(std::floor(std::min(0.0, -slope * (h - 1)))) - 1;
    const int hi = static_cast<int>(std::ceil(std::max(0.0, -slope * (h - 1)))) + w;
    for (int b = lo; b <= hi; ++b) {
      int run = 0;
      for (int y = 0; y < h; ++y) {
        const int x = static_cast<int>(std::lround(b + slope * y));
        const bool on = x >= -1 && x <= w && ((x >= 0 && x < w && mask.test(x, y)) ||
                                              (x - 1 >= 0 && x - 1 < w && mask.test(x - 1, y)) ||
                                              (x + 1 >= 0 && x + 1 < w && mask.test(x + 1, y)));
        run = on ? run + 1 : 0;
        best = std::max(best, run);
      }
    }
  }
  return best;
}

BinaryMask directional_lines(const GrayImage& img, int line_length, double angle_deg,
                             int tophat_size) {
  const GrayImage closed = morph::directional_close(img, line_length, angle_deg);
  const GrayImage residue =
      morph::top_hat(closed, morph::StructuringElement::square(tophat_size), morph::Polarity::Black);
  const thresh::Histogram256 hist = thresh::Histogram256::of(residue);
  int occupied = 0;
  for (auto b : hist.bins) occupied += b > 0;
  if (occupied < 2) return BinaryMask(img.width(), img.height());
  return thresh::binarize(residue, thresh::otsu_threshold(hist),
                          thresh::Polarity::BrightForeground);
}

DirectionResult best_direction(const GrayImage& img, double angle_min, double angle_max,
                               double angle_step, int line_length, int tophat_size) {
  if (!(angle_step > 0.0) || angle_max < angle_min) {
    throw PreconditionError("best_direction: invalid angle range");
  }
  DirectionResult best;
  best.angle_deg = angle_min;
  const int steps = static_cast<int>(std::floor((angle_max - angle_min) / angle_step + 1e-9));
  for (int k = 0; k <= steps; ++k) {
    const double a = angle_min + k * angle_step;
    const int run = longest_run(directional_lines(img, line_length, a, tophat_size), a);
    if (run > best.longest_run) {
      best.longest_run = run;
      best.angle_deg = a;
    }
  }
  best.low_confidence = best.longest_run <= line_length;
  return best;
}

double grid_period(const std::vector<double>& profile, double min_period, double near_max) {
  const std::size_t n = profile.size();
  if (min_period < 1.0) min_period = 1.0;
  if (static_cast<double>(n) < 2.0 * min_period + 2.0) {
    throw PreconditionError("grid_period: profile too short");
  }
  const double mean = std::accumulate(profile.begin(), profile.end(), 0.0) / static_cast<double>(n);
  double var = 0.0;
  for (double v : profile) var += (v - mean) * (v - mean);
  if (var <= 1e-12 * (1.0 + mean * mean) * static_cast<double>(n)) {
    throw PreconditionError("grid_period: constant profile has no period");
  }
  const std::size_t kmin = static_cast<std::size_t>(std::ceil(min_period));
  const std::size_t kmax = n / 2;
  std::vector<double> r(kmax + 2, 0.0);
  for (std::size_t k = kmin - 1; k <= kmax + 1 && k < n; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i + k < n; ++i) s += (profile[i] - mean) * (profile[i + k] - mean);
    r[k] = s / static_cast<double>(n - k);
  }
  std::vector<std::size_t> maxima;
  double top = 0.0;
  for (std::size_t k = kmin; k <= kmax && k + 1 < r.size(); ++k) {
    if (r[k] >= r[k - 1] && r[k] > r[k + 1] && r[k] > 0.0) {
      maxima.push_back(k);
      top = std::max(top, r[k]);
    }
  }
  if (maxima.empty()) throw PreconditionError("grid_period: no periodicity found");
  for (std::size_t k : maxima) {
    if (r[k] >= near_max * top) {
      return static_cast<double>(k) + parabolic_offset(r[k - 1], r[k], r[k + 1]);
    }
  }
  return static_cast<double>(maxima.front());
}

std::vector<double> profile_peaks(const std::vector<double>& profile, double min_separation,
                                  double floor_fraction) {
  std::vector<double> out;
  if (profile.size() < 3) return out;
  const double top = *std::max_element(profile.begin(), profile.end());
  if (top <= 0.0) return out;
  std::vector<std::size_t> cands;
  for (std::size_t i = 1; i + 1 < profile.size(); ++i) {
    if (profile[i] >= profile[i - 1] && profile[i] > profile[i + 1] &&
        profile[i] >= floor_fraction * top) {
      cands.push_back(i);
    }
  }
  std::stable_sort(cands.begin(), cands.end(),
                   [&](std::size_t a, std::size_t b) { return profile[a] > profile[b]; });
  std::vector<std::size_t> kept;
  for (std::size_t c : cands) {
    bool ok = true;
    for (std::size_t k : kept) {
      if (std::abs(static_cast<double>(c) - static_cast<double>(k)) < min_separation) {
        ok = false;
        break;
      }
    }
    if (ok) kept.push_back(c);
  }
  for (std::size_t k : kept) {
    out.push_back(static_cast<double>(k) + parabolic_offset(profile[k - 1], profile[k], profile[k + 1]));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> complete_grid(const std::vector<double>& detected, double period, double lo,
                                  double hi) {
  if (detected.empty()) throw PreconditionError("complete_grid: no detected lines");
  if (!(period > 0.0)) throw PreconditionError("complete_grid: period must be positive");
  const double ref = detected.front();
  std::vector<double> offsets;
  for (double d : detected) offsets.push_back(d - ref - period * std::round((d - ref) / period));
  std::sort(offsets.begin(), offsets.end());
  const std::size_t m = offsets.size();
  const double median = m % 2 ? offsets[m / 2] : 0.5 * (offsets[m / 2 - 1] + offsets[m / 2]);
  const double phase = ref + median;
  std::vector<double> out;
  const long long k0 = static_cast<long long>(std::ceil((lo - phase) / period - 1e-9));
  const long long k1 = static_cast<long long>(std::floor((hi - phase) / period + 1e-9));
  for (long long k = k0; k <= k1; ++k) out.push_back(phase + static_cast<double>(k) * period);
  return out;
}

GrayImage cross_template(int arm, double stroke, double angle_rad) {
  const int side = 2 * arm + 1;
  GrayImage tpl(side, side, 255);
  const double c = std::cos(angle_rad);
  const double s = std::sin(angle_rad);
  for (int v = 0; v < side; ++v) {
    for (int u = 0; u < side; ++u) {
      const double dx = u - arm;
      const double dy = v - arm;
      const double along1 = dx * c + dy * s;
      const double across1 = -dx * s + dy * c;
      double cover = 0.0;
      if (std::abs(along1) <= arm + 0.5) {
        cover = std::max(cover, std::clamp(stroke / 2 + 0.5 - std::abs(across1), 0.0, 1.0));
      }
      if (std::abs(across1) <= arm + 0.5) {
        cover = std::max(cover, std::clamp(stroke / 2 + 0.5 - std::abs(along1), 0.0, 1.0));
      }
      tpl.at(u, v) = static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - cover)));
    }
  }
  return tpl;
}

Refined refine_intersection(const GrayImage& img, const Point& coarse, double angle_rad,
                            RefineMethod method, const RefineParams& params) {
  if (params.window < 1) throw PreconditionError("refine_intersection: window must be >= 1");
  if (!std::isfinite(coarse.x) || !std::isfinite(coarse.y)) {
    throw PreconditionError("refine_intersection: coarse point is not finite");
  }
  return method == RefineMethod::Template ? refine_template(img, coarse, angle_rad, params)
                                          : refine_closing(img, coarse, angle_rad, params);
}

namespace {

// Line fits per index, with indices that lack support interpolated from the
// nearest supported indices on both sides.
std::map<int, LineParam> index_lines(const std::map<int, PointList>& support, int lo, int hi) {
  std::map<int, LineParam> fitted;
  for (const auto& [i, pts] : support) {
    if (pts.size() < 2) continue;
    if (const auto l = fit_line(pts)) fitted[i] = *l;
  }
  std::map<int, LineParam> out = fitted;
  for (int i = lo; i <= hi; ++i) {
    if (fitted.count(i)) continue;
    const auto next = fitted.upper_bound(i);
    if (next == fitted.begin() || next == fitted.end()) continue;
    const auto prev = std::prev(next);
    LineParam l0 = prev->second, l1 = next->second;
    if (std::cos(l1.theta - l0.theta) < 0) {
      l1.theta += std::numbers::pi;
      l1.rho = -l1.rho;
    }
    const double t = static_cast<double>(i - prev->first) / (next->first - prev->first);
    LineParam l;
    l.theta = l0.theta + t * (l1.theta - l0.theta);
    l.rho = l0.rho + t * (l1.rho - l0.rho);
    l.inserted = true;
    out[i] = l;
  }
  return out;
}

}  // namespace

InferResult infer_missing(const std::vector<Slot>& slots) {
  std::map<int, PointList> by_a, by_b;
  int a_lo = 0, a_hi = -1, b_lo = 0, b_hi = -1;
  for (const Slot& s : slots) {
    if (a_hi < a_lo) a_lo = a_hi = s.a, b_lo = b_hi = s.b;
    a_lo = std::min(a_lo, s.a);
    a_hi = std::max(a_hi, s.a);
    b_lo = std::min(b_lo, s.b);
    b_hi = std::max(b_hi, s.b);
    if (!s.confident) continue;
    by_a[s.a].push_back(s.point);
    by_b[s.b].push_back(s.point);
  }
  const auto lines_a = index_lines(by_a, a_lo, a_hi);
  const auto lines_b = index_lines(by_b, b_lo, b_hi);
  InferResult out;
  out.filled.assign(slots.size(), false);
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const Slot& s = slots[i];
    out.points.push_back(s.point);
    if (s.confident) continue;
    const auto ia = lines_a.find(s.a);
    const auto ib = lines_b.find(s.b);
    const auto p = (ia != lines_a.end() && ib != lines_b.end()) ? intersect(ia->second, ib->second)
                                                                : std::nullopt;
    if (!p) {
      out.unfilled.push_back(i);
      continue;
    }
    out.points.back() = *p;
    out.filled[i] = true;
  }
  return out;
}

}  // namespace mapseg::lines
