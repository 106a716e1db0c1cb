#include "mapseg/morph.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>

namespace mapseg::morph {
namespace {

constexpr double kPi = 3.14159265358979323846;

struct Run {
  int dy;
  int start;  // dx of the first pixel
  int length;
};

std::vector<Run> decompose(const StructuringElement& se) {
  std::vector<Offset> sorted = se.offsets();
  std::sort(sorted.begin(), sorted.end(), [](const Offset& a, const Offset& b) {
    return a.dy != b.dy ? a.dy < b.dy : a.dx < b.dx;
  });
  std::vector<Run> runs;
  for (const Offset& o : sorted) {
    if (!runs.empty() && runs.back().dy == o.dy &&
        runs.back().start + runs.back().length == o.dx) {
      ++runs.back().length;
    } else {
      runs.push_back({o.dy, o.dx, 1});
    }
  }
  return runs;
}

// Sliding minimum over windows of `len` samples of one row (van Herk /
// Gil-Werman). Out-of-row samples are 255. Entry s + len - 1 holds the
// minimum of row[s .. s+len-1] for s in [-(len-1), width-1].
void window_min(std::span<const std::uint8_t> row, int len, std::vector<std::uint8_t>& out,
                std::vector<std::uint8_t>& fwd, std::vector<std::uint8_t>& bwd) {
  const int w = static_cast<int>(row.size());
  const int n = w + 2 * (len - 1);
  const int padded = ((n + len - 1) / len) * len;
  fwd.assign(static_cast<std::size_t>(padded), 255);
  bwd.assign(static_cast<std::size_t>(padded), 255);
  for (int i = 0; i < w; ++i) fwd[static_cast<std::size_t>(i + len - 1)] = row[i];
  bwd = fwd;
  for (int i = 0; i < padded; ++i) {
    if (i % len != 0) fwd[i] = std::min(fwd[i], fwd[i - 1]);
  }
  for (int i = padded - 2; i >= 0; --i) {
    if ((i + 1) % len != 0) bwd[i] = std::min(bwd[i], bwd[i + 1]);
  }
  const int count = w + len - 1;
  out.resize(static_cast<std::size_t>(count));
  for (int s = 0; s < count; ++s) {
    const int e = s + len - 1;
    out[s] = std::min(bwd[s], fwd[e]);
  }
}

GrayImage erode_impl(const GrayImage& img, const StructuringElement& se) {
  const int w = img.width();
  const int h = img.height();
  const std::vector<Run> runs = decompose(se);

  std::map<int, std::vector<std::vector<std::uint8_t>>> tables;
  std::vector<std::uint8_t> fwd, bwd;
  for (const Run& r : runs) {
    if (r.length == 1 || tables.contains(r.length)) continue;
    auto& rows = tables[r.length];
    rows.resize(static_cast<std::size_t>(h));
    for (int y = 0; y < h; ++y) window_min(img.row(y), r.length, rows[y], fwd, bwd);
  }

  GrayImage out(w, h, 255);
  for (int y = 0; y < h; ++y) {
    std::uint8_t* dst = &out.at(0, y);
    for (const Run& r : runs) {
      const int sy = y + r.dy;
      if (sy < 0 || sy >= h) continue;
      if (r.length == 1) {
        const std::uint8_t* src = &img.at(0, sy);
        const int x0 = std::max(0, -r.start);
        const int x1 = std::min(w, w - r.start);
        for (int x = x0; x < x1; ++x) dst[x] = std::min(dst[x], src[x + r.start]);
        continue;
      }
      const auto& table = tables.at(r.length)[static_cast<std::size_t>(sy)];
      // window starting at s = x + start is valid for s in [-(len-1), w-1]
      const int x0 = std::max(0, -(r.length - 1) - r.start);
      const int x1 = std::min(w, w - r.start);
      for (int x = x0; x < x1; ++x) {
        dst[x] = std::min(dst[x], table[static_cast<std::size_t>(x + r.start + r.length - 1)]);
      }
    }
  }
  return out;
}

void require_same(const GrayImage& a, const GrayImage& b, const char* what) {
  require_same_size(a, b, what);
}

template <typename Fn>
void for_neighbors(int x, int y, int w, int h, Connectivity conn, Fn&& fn) {
  static constexpr std::array<Offset, 8> k8 = {
      Offset{-1, -1}, {0, -1}, {1, -1}, {-1, 0}, {1, 0}, {-1, 1}, {0, 1}, {1, 1}};
  static constexpr std::array<Offset, 4> k4 = {Offset{0, -1}, {-1, 0}, {1, 0}, {0, 1}};
  auto visit = [&](const auto& list) {
    for (const Offset& o : list) {
      const int nx = x + o.dx;
      const int ny = y + o.dy;
      if (nx >= 0 && ny >= 0 && nx < w && ny < h) fn(nx, ny);
    }
  };
  if (conn == Connectivity::Four) {
    visit(k4);
  } else {
    visit(k8);
  }
}

// Half-neighbourhoods for raster (prior) and anti-raster (posterior) scans.
std::vector<Offset> prior_offsets(Connectivity conn) {
  if (conn == Connectivity::Four) return {{0, -1}, {-1, 0}};
  return {{-1, -1}, {0, -1}, {1, -1}, {-1, 0}};
}
std::vector<Offset> posterior_offsets(Connectivity conn) {
  if (conn == Connectivity::Four) return {{1, 0}, {0, 1}};
  return {{1, 0}, {-1, 1}, {0, 1}, {1, 1}};
}

GrayImage reconstruct_by_dilation(const GrayImage& marker, const GrayImage& mask,
                                  Connectivity conn) {
  const int w = mask.width();
  const int h = mask.height();
  GrayImage j = marker;
  const auto prior = prior_offsets(conn);
  const auto posterior = posterior_offsets(conn);

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::uint8_t v = j.at(x, y);
      for (const Offset& o : prior) {
        const int nx = x + o.dx, ny = y + o.dy;
        if (nx >= 0 && ny >= 0 && nx < w && ny < h) v = std::max(v, j.at(nx, ny));
      }
      j.at(x, y) = std::min(v, mask.at(x, y));
    }
  }

  std::deque<std::size_t> fifo;
  for (int y = h - 1; y >= 0; --y) {
    for (int x = w - 1; x >= 0; --x) {
      std::uint8_t v = j.at(x, y);
      for (const Offset& o : posterior) {
        const int nx = x + o.dx, ny = y + o.dy;
        if (nx >= 0 && ny >= 0 && nx < w && ny < h) v = std::max(v, j.at(nx, ny));
      }
      v = std::min(v, mask.at(x, y));
      j.at(x, y) = v;
      for (const Offset& o : posterior) {
        const int nx = x + o.dx, ny = y + o.dy;
        if (nx >= 0 && ny >= 0 && nx < w && ny < h && j.at(nx, ny) < v &&
            j.at(nx, ny) < mask.at(nx, ny)) {
          fifo.push_back(j.index(x, y));
          break;
        }
      }
    }
  }

  while (!fifo.empty()) {
    const std::size_t p = fifo.front();
    fifo.pop_front();
    const int px = static_cast<int>(p % static_cast<std::size_t>(w));
    const int py = static_cast<int>(p / static_cast<std::size_t>(w));
    const std::uint8_t vp = j[p];
    for_neighbors(px, py, w, h, conn, [&](int nx, int ny) {
      const std::size_t q = j.index(nx, ny);
      if (j[q] < vp && j[q] != mask[q]) {
        j[q] = std::min(vp, mask[q]);
        fifo.push_back(q);
      }
    });
  }
  return j;
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) std::swap(a, b);
    parent[a] = b;
  }
};

// Relabels union-find roots 1..k in raster discovery order.
LabelImage relabel(UnionFind& uf, int w, int h, const std::vector<bool>* include = nullptr) {
  LabelImage out(w, h, 0);
  std::vector<std::int32_t> root_label(static_cast<std::size_t>(w) * h, 0);
  std::int32_t next = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (include && !(*include)[i]) continue;
    const std::size_t r = uf.find(i);
    if (root_label[r] == 0) root_label[r] = ++next;
    out[i] = root_label[r];
  }
  return out;
}

}  // namespace

StructuringElement::StructuringElement(std::vector<Offset> offsets, std::string name)
    : offsets_(std::move(offsets)), name_(std::move(name)) {
  std::sort(offsets_.begin(), offsets_.end());
  offsets_.erase(std::unique(offsets_.begin(), offsets_.end()), offsets_.end());
  if (!std::binary_search(offsets_.begin(), offsets_.end(), Offset{0, 0})) {
    offsets_.insert(std::lower_bound(offsets_.begin(), offsets_.end(), Offset{0, 0}),
                    Offset{0, 0});
  }
}

StructuringElement StructuringElement::square(int n) {
  if (n < 1) throw PreconditionError("square SE side must be >= 1");
  std::vector<Offset> o;
  const int lo = -(n / 2);
  const int hi = lo + n - 1;
  for (int dy = lo; dy <= hi; ++dy)
    for (int dx = lo; dx <= hi; ++dx) o.push_back({dx, dy});
  return {std::move(o), "square(" + std::to_string(n) + ")"};
}

StructuringElement StructuringElement::disk(int r) {
  if (r < 0) throw PreconditionError("disk SE radius must be >= 0");
  std::vector<Offset> o;
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx)
      if (dx * dx + dy * dy <= r * r) o.push_back({dx, dy});
  return {std::move(o), "disk(" + std::to_string(r) + ")"};
}

StructuringElement StructuringElement::cross(int arm) {
  if (arm < 0) throw PreconditionError("cross SE arm must be >= 0");
  std::vector<Offset> o;
  for (int d = -arm; d <= arm; ++d) {
    o.push_back({d, 0});
    o.push_back({0, d});
  }
  return {std::move(o), "cross(" + std::to_string(arm) + ")"};
}

StructuringElement StructuringElement::line(int length, double angle_deg) {
  if (length < 1) throw PreconditionError("line SE length must be >= 1");
  const double t = angle_deg * kPi / 180.0;
  const double c = std::cos(t);
  const double s = std::sin(t);
  const bool x_major = std::abs(c) >= std::abs(s);
  const double major = x_major ? std::abs(c) : std::abs(s);
  const int n = std::max(1, static_cast<int>(std::lround(length * major)));
  const int lo = -(n / 2);
  std::vector<Offset> o;
  for (int k = lo; k < lo + n; ++k) {
    if (x_major) {
      o.push_back({k, static_cast<int>(std::lround(k * s / c))});
    } else {
      o.push_back({static_cast<int>(std::lround(k * c / s)), k});
    }
  }
  char name[64];
  std::snprintf(name, sizeof name, "line(%d,%.2f)", length, angle_deg);
  return {std::move(o), name};
}

StructuringElement StructuringElement::rotated_cross(int length, double angle_deg) {
  std::vector<Offset> o = line(length, angle_deg).offsets();
  const auto& b = line(length, angle_deg + 90.0).offsets();
  o.insert(o.end(), b.begin(), b.end());
  char name[64];
  std::snprintf(name, sizeof name, "rotated_cross(%d,%.2f)", length, angle_deg);
  return {std::move(o), name};
}

StructuringElement StructuringElement::from_offsets(std::vector<Offset> offsets,
                                                    std::string name) {
  return {std::move(offsets), std::move(name)};
}

StructuringElement StructuringElement::reflect() const {
  std::vector<Offset> o;
  o.reserve(offsets_.size());
  for (const Offset& off : offsets_) o.push_back({-off.dx, -off.dy});
  return {std::move(o), name_ + "'"};
}

GrayImage erode(const GrayImage& img, const StructuringElement& se) {
  return erode_impl(img, se);
}

GrayImage dilate(const GrayImage& img, const StructuringElement& se) {
  return invert(erode_impl(invert(img), se.reflect()));
}

GrayImage open(const GrayImage& img, const StructuringElement& se) {
  return dilate(erode(img, se), se);
}

GrayImage close(const GrayImage& img, const StructuringElement& se) {
  return erode(dilate(img, se), se);
}

GrayImage se_filter(const GrayImage& img, const StructuringElement& se, FilterMode mode) {
  switch (mode) {
    case FilterMode::Erode: return erode(img, se);
    case FilterMode::Dilate: return dilate(img, se);
    case FilterMode::Open: return open(img, se);
    case FilterMode::Close: return close(img, se);
  }
  return img;
}

BinaryMask erode(const BinaryMask& mask, const StructuringElement& se) {
  return BinaryMask::from_gray(erode(mask.gray(), se));
}
BinaryMask dilate(const BinaryMask& mask, const StructuringElement& se) {
  return BinaryMask::from_gray(dilate(mask.gray(), se));
}
BinaryMask open(const BinaryMask& mask, const StructuringElement& se) {
  return BinaryMask::from_gray(open(mask.gray(), se));
}
BinaryMask close(const BinaryMask& mask, const StructuringElement& se) {
  return BinaryMask::from_gray(close(mask.gray(), se));
}

GrayImage top_hat(const GrayImage& img, const StructuringElement& se, Polarity polarity) {
  GrayImage out(img.width(), img.height());
  if (polarity == Polarity::White) {
    const GrayImage o = open(img, se);
    for (std::size_t i = 0; i < img.size(); ++i)
      out[i] = static_cast<std::uint8_t>(std::max(0, img[i] - o[i]));
  } else {
    const GrayImage c = close(img, se);
    for (std::size_t i = 0; i < img.size(); ++i)
      out[i] = static_cast<std::uint8_t>(std::max(0, c[i] - img[i]));
  }
  return out;
}

GrayImage gradient(const GrayImage& img, const StructuringElement& se) {
  const GrayImage d = dilate(img, se);
  const GrayImage e = erode(img, se);
  GrayImage out(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i) out[i] = static_cast<std::uint8_t>(d[i] - e[i]);
  return out;
}

GrayImage geodesic_reconstruct(const GrayImage& marker, const GrayImage& mask,
                               ReconstructDirection direction, Connectivity conn) {
  require_same(marker, mask, "geodesic_reconstruct");
  if (direction == ReconstructDirection::ByDilation) {
    for (std::size_t i = 0; i < mask.size(); ++i) {
      if (marker[i] > mask[i]) {
        throw PreconditionError("reconstruction by dilation needs marker <= mask");
      }
    }
    return reconstruct_by_dilation(marker, mask, conn);
  }
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (marker[i] < mask[i]) {
      throw PreconditionError("reconstruction by erosion needs marker >= mask");
    }
  }
  return invert(reconstruct_by_dilation(invert(marker), invert(mask), conn));
}

BinaryMask geodesic_reconstruct(const BinaryMask& marker, const BinaryMask& mask,
                                Connectivity conn) {
  return BinaryMask::from_gray(geodesic_reconstruct((marker & mask).gray(), mask.gray(),
                                                    ReconstructDirection::ByDilation, conn));
}

GrayImage fill_holes(const GrayImage& img) {
  GrayImage marker(img.width(), img.height(), 255);
  const int w = img.width();
  const int h = img.height();
  for (int x = 0; x < w; ++x) {
    marker.at(x, 0) = img.at(x, 0);
    marker.at(x, h - 1) = img.at(x, h - 1);
  }
  for (int y = 0; y < h; ++y) {
    marker.at(0, y) = img.at(0, y);
    marker.at(w - 1, y) = img.at(w - 1, y);
  }
  return geodesic_reconstruct(marker, img, ReconstructDirection::ByErosion, Connectivity::Four);
}

BinaryMask fill_holes(const BinaryMask& mask) {
  return BinaryMask::from_gray(fill_holes(mask.gray()));
}

GrayImage area_filter(const GrayImage& img, long long area, AreaMode mode) {
  if (area < 1) throw PreconditionError("area_filter: area must be >= 1");
  if (area == 1) return img;
  // Closing is the dual of opening on the inverted image.
  const GrayImage f = mode == AreaMode::Opening ? img : invert(img);
  const int w = f.width();
  const int h = f.height();
  const std::size_t n = f.size();

  // Pixels by decreasing value, ties by index (counting sort).
  std::array<std::size_t, 257> start{};
  for (std::size_t i = 0; i < n; ++i) ++start[255 - f[i] + 1];
  for (int v = 1; v <= 256; ++v) start[v] += start[v - 1];
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[start[255 - f[i]]++] = i;

  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> parent(n, kUnset);
  std::vector<long long> size(n, 0);
  auto find = [&](std::size_t i) {
    std::size_t r = i;
    while (parent[r] != r) r = parent[r];
    while (parent[i] != r) {
      const std::size_t next = parent[i];
      parent[i] = r;
      i = next;
    }
    return r;
  };

  for (const std::size_t p : order) {
    parent[p] = p;
    size[p] = 1;
    const int px = static_cast<int>(p % static_cast<std::size_t>(w));
    const int py = static_cast<int>(p / static_cast<std::size_t>(w));
    for_neighbors(px, py, w, h, Connectivity::Eight, [&](int nx, int ny) {
      const std::size_t q = f.index(nx, ny);
      if (parent[q] == kUnset) return;
      const std::size_t r = find(q);
      if (r == p) return;
      if (f[r] == f[p] || size[r] < area) {
        parent[r] = p;
        size[p] += size[r];
      } else {
        size[p] = area;
      }
    });
  }

  GrayImage out(w, h);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const std::size_t p = *it;
    out[p] = parent[p] == p ? f[p] : out[parent[p]];
  }
  return mode == AreaMode::Opening ? out : invert(out);
}

MarkerSpec regional_minima(const GrayImage& img) {
  const int w = img.width();
  const int h = img.height();
  MarkerSpec spec{LabelImage(w, h, 0), 0};
  std::vector<std::int32_t> zone(img.size(), 0);
  std::vector<std::size_t> members;
  std::deque<std::size_t> queue;
  std::int32_t zones = 0;
  for (std::size_t seed = 0; seed < img.size(); ++seed) {
    if (zone[seed] != 0) continue;
    const std::uint8_t v = img[seed];
    zone[seed] = ++zones;
    members.clear();
    queue.push_back(seed);
    bool is_min = true;
    while (!queue.empty()) {
      const std::size_t p = queue.front();
      queue.pop_front();
      members.push_back(p);
      const int px = static_cast<int>(p % static_cast<std::size_t>(w));
      const int py = static_cast<int>(p / static_cast<std::size_t>(w));
      for_neighbors(px, py, w, h, Connectivity::Eight, [&](int nx, int ny) {
        const std::size_t q = img.index(nx, ny);
        if (img[q] < v) is_min = false;
        if (img[q] == v && zone[q] == 0) {
          zone[q] = zones;
          queue.push_back(q);
        }
      });
    }
    if (is_min) {
      ++spec.count;
      for (const std::size_t p : members) spec.labels[p] = spec.count;
    }
  }
  return spec;
}

MarkerSpec minima_by_dynamics(const GrayImage& img, int h) {
  if (h < 1) throw PreconditionError("minima_by_dynamics: h must be >= 1");
  // Integer levels: dynamic >= h is the same as dynamic > h - 1, which is
  // what the (h-1)-minima transform keeps.
  GrayImage raised(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i)
    raised[i] = static_cast<std::uint8_t>(std::min(255, img[i] + h - 1));
  const GrayImage hmin = geodesic_reconstruct(raised, img, ReconstructDirection::ByErosion);
  return regional_minima(hmin);
}

LabelImage watershed(const GrayImage& relief, const MarkerSpec& markers) {
  require_same_size(relief, markers.labels, "watershed");
  const int w = relief.width();
  const int h = relief.height();
  LabelImage labels = markers.labels;

  std::array<std::deque<std::size_t>, 256> buckets;
  int current = 256;
  bool any = false;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0) throw PreconditionError("watershed: negative marker label");
    if (labels[i] == 0) continue;
    any = true;
    buckets[relief[i]].push_back(i);
    current = std::min<int>(current, relief[i]);
  }
  if (!any) throw PreconditionError("watershed: empty marker set");

  while (current < 256) {
    auto& bucket = buckets[static_cast<std::size_t>(current)];
    if (bucket.empty()) {
      ++current;
      continue;
    }
    const std::size_t p = bucket.front();
    bucket.pop_front();
    const int px = static_cast<int>(p % static_cast<std::size_t>(w));
    const int py = static_cast<int>(p / static_cast<std::size_t>(w));
    for_neighbors(px, py, w, h, Connectivity::Four, [&](int nx, int ny) {
      const std::size_t q = labels.index(nx, ny);
      if (labels[q] != 0) return;
      labels[q] = labels[p];
      buckets[relief[q]].push_back(q);
      current = std::min<int>(current, relief[q]);
    });
  }
  return labels;
}

LabelImage quasi_flat_zones(const GrayImage& img, int slope) {
  if (slope < 0) throw PreconditionError("quasi_flat_zones: slope must be >= 0");
  const int w = img.width();
  const int h = img.height();
  UnionFind uf(img.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t p = img.index(x, y);
      if (x + 1 < w && std::abs(img[p] - img[p + 1]) <= slope) uf.unite(p, p + 1);
      if (y + 1 < h) {
        const std::size_t q = img.index(x, y + 1);
        if (std::abs(img[p] - img[q]) <= slope) uf.unite(p, q);
      }
    }
  }
  return relabel(uf, w, h);
}

Raster<long long> squared_distance_transform(const BinaryMask& mask) {
  if (!mask.any()) throw PreconditionError("distance_transform: mask has no foreground pixel");
  const int w = mask.width();
  const int h = mask.height();
  const long long inf = w + h;

  // Column pass: distance to the nearest foreground pixel in the column.
  Raster<long long> g(w, h, 0);
  for (int x = 0; x < w; ++x) {
    g.at(x, 0) = mask.test(x, 0) ? 0 : inf;
    for (int y = 1; y < h; ++y) g.at(x, y) = mask.test(x, y) ? 0 : g.at(x, y - 1) + 1;
    for (int y = h - 2; y >= 0; --y) {
      if (g.at(x, y + 1) < g.at(x, y)) g.at(x, y) = g.at(x, y + 1) + 1;
    }
  }

  // Row pass: lower envelope of parabolas (x - i)^2 + g(i)^2.
  Raster<long long> out(w, h, 0);
  std::vector<int> s(static_cast<std::size_t>(w)), t(static_cast<std::size_t>(w));
  for (int y = 0; y < h; ++y) {
    auto gi = [&](int i) { return g.at(i, y); };
    auto f = [&](long long x, int i) { return (x - i) * (x - i) + gi(i) * gi(i); };
    auto sep = [&](int i, int u) {
      const long long num = 1LL * u * u - 1LL * i * i + gi(u) * gi(u) - gi(i) * gi(i);
      const long long den = 2LL * (u - i);
      long long q = num / den;
      if ((num % den != 0) && ((num < 0) != (den < 0))) --q;
      return q;
    };
    int q = 0;
    s[0] = 0;
    t[0] = 0;
    for (int u = 1; u < w; ++u) {
      while (q >= 0 && f(t[q], s[q]) > f(t[q], u)) --q;
      if (q < 0) {
        q = 0;
        s[0] = u;
      } else {
        const long long wv = 1 + sep(s[q], u);
        if (wv < w) {
          ++q;
          s[q] = u;
          t[q] = static_cast<int>(wv);
        }
      }
    }
    for (int u = w - 1; u >= 0; --u) {
      out.at(u, y) = f(u, s[q]);
      if (u == t[q]) --q;
    }
  }
  return out;
}

RealImage distance_transform(const BinaryMask& mask) {
  const Raster<long long> sq = squared_distance_transform(mask);
  RealImage out(mask.width(), mask.height());
  for (std::size_t i = 0; i < sq.size(); ++i) out[i] = std::sqrt(static_cast<double>(sq[i]));
  return out;
}

GrayImage directional_close(const GrayImage& img, int length, double angle_deg) {
  if (length < 1) throw PreconditionError("directional_close: length must be >= 1");
  return close(img, StructuringElement::line(length, angle_deg));
}

GrayImage block_min(const GrayImage& img, int factor) {
  if (factor < 1) throw PreconditionError("block_min: factor must be >= 1");
  const int w = (img.width() + factor - 1) / factor;
  const int h = (img.height() + factor - 1) / factor;
  GrayImage out(w, h, 255);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      auto& v = out.at(x / factor, y / factor);
      v = std::min(v, img.at(x, y));
    }
  }
  return out;
}

}  // namespace mapseg::morph
