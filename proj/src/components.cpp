#include "mapseg/components.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>

namespace mapseg::components {

LabelImage label_components(const BinaryMask& mask, Connectivity conn) {
  const int w = mask.width();
  const int h = mask.height();
  LabelImage labels(w, h, 0);
  std::int32_t next = 0;
  std::deque<std::size_t> queue;
  for (std::size_t seed = 0; seed < mask.size(); ++seed) {
    if (!mask.test(seed) || labels[seed] != 0) continue;
    labels[seed] = ++next;
    queue.push_back(seed);
    while (!queue.empty()) {
      const std::size_t p = queue.front();
      queue.pop_front();
      const int px = static_cast<int>(p % static_cast<std::size_t>(w));
      const int py = static_cast<int>(p / static_cast<std::size_t>(w));
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if ((dx == 0 && dy == 0) || (conn == Connectivity::Four && dx != 0 && dy != 0)) continue;
          const int nx = px + dx;
          const int ny = py + dy;
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          const std::size_t q = labels.index(nx, ny);
          if (mask.test(q) && labels[q] == 0) {
            labels[q] = next;
            queue.push_back(q);
          }
        }
      }
    }
  }
  return labels;
}

std::int32_t max_label(const LabelImage& labels) {
  std::int32_t m = 0;
  for (const std::int32_t v : labels.pixels()) m = std::max(m, v);
  return m;
}

std::vector<ComponentStats> component_stats(const LabelImage& labels,
                                            const BinaryMask* reference) {
  if (reference) require_same_size(labels, *reference, "component_stats");
  std::unordered_map<std::int32_t, std::size_t> slot;
  std::vector<ComponentStats> stats;
  std::vector<long long> inside;
  for (int y = 0; y < labels.height(); ++y) {
    for (int x = 0; x < labels.width(); ++x) {
      const std::int32_t l = labels.at(x, y);
      if (l <= 0) continue;
      auto [it, fresh] = slot.try_emplace(l, stats.size());
      if (fresh) {
        stats.push_back({l, 0, Box{x, y, x, y}, 0.0, std::nullopt});
        inside.push_back(0);
      }
      ComponentStats& s = stats[it->second];
      ++s.area;
      s.bbox.xmin = std::min(s.bbox.xmin, x);
      s.bbox.ymin = std::min(s.bbox.ymin, y);
      s.bbox.xmax = std::max(s.bbox.xmax, x);
      s.bbox.ymax = std::max(s.bbox.ymax, y);
      if (reference && reference->test(x, y)) ++inside[it->second];
    }
  }
  for (std::size_t i = 0; i < stats.size(); ++i) {
    stats[i].fill_ratio =
        static_cast<double>(stats[i].area) / static_cast<double>(stats[i].bbox.area());
    if (reference) {
      stats[i].overlap = static_cast<double>(inside[i]) / static_cast<double>(stats[i].area);
    }
  }
  std::sort(stats.begin(), stats.end(),
            [](const ComponentStats& a, const ComponentStats& b) { return a.label < b.label; });
  return stats;
}

BinaryMask filter_components(const LabelImage& labels, const Predicate& keep,
                             const BinaryMask* reference) {
  std::unordered_map<std::int32_t, bool> accepted;
  for (const ComponentStats& s : component_stats(labels, reference)) {
    accepted[s.label] = keep(s);
  }
  BinaryMask out(labels.width(), labels.height());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] > 0 && accepted[labels[i]]) out.set(i);
  }
  return out;
}

BinaryMask remove_small(const BinaryMask& mask, long long min_area, Connectivity conn) {
  if (min_area < 1) throw PreconditionError("remove_small: min_area must be >= 1");
  return filter_components(label_components(mask, conn),
                           [min_area](const ComponentStats& s) { return s.area >= min_area; });
}

LabelImage compact_labels(const LabelImage& labels) {
  std::unordered_map<std::int32_t, std::int32_t> remap;
  LabelImage out(labels.width(), labels.height(), 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] <= 0) continue;
    auto [it, fresh] = remap.try_emplace(labels[i], static_cast<std::int32_t>(remap.size() + 1));
    out[i] = it->second;
  }
  return out;
}

BinaryMask foreground(const LabelImage& labels) {
  BinaryMask out(labels.width(), labels.height());
  for (std::size_t i = 0; i < labels.size(); ++i) out.set(i, labels[i] > 0);
  return out;
}

}  // namespace mapseg::components
