#include "mapseg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <unordered_map>

namespace mapseg::metrics {
namespace {

void finish_scores(PQReport& r) {
  r.fp = r.num_pred - r.tp();
  r.fn = r.num_gt - r.tp();
  if (r.num_pred == 0 && r.num_gt == 0) {
    r.sq = r.rq = r.pq = 1.0;
    return;
  }
  double iou_sum = 0.0;
  for (const MatchedPair& p : r.tp_pairs) iou_sum += p.iou();
  r.sq = r.tp_pairs.empty() ? 0.0 : iou_sum / static_cast<double>(r.tp());
  r.rq = static_cast<double>(r.tp()) /
         (static_cast<double>(r.tp()) + 0.5 * static_cast<double>(r.fp) +
          0.5 * static_cast<double>(r.fn));
  r.pq = r.sq * r.rq;
}

std::vector<double> directed_distances(const BinaryMask& from_boundary,
                                       const BinaryMask& to_boundary) {
  const RealImage dist = morph::distance_transform(to_boundary);
  std::vector<double> out;
  for (std::size_t i = 0; i < from_boundary.size(); ++i) {
    if (from_boundary.test(i)) out.push_back(dist[i]);
  }
  return out;
}

double sq_dist(const Point& a, const Point& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

// Index of the nearest point of `set` to `p` (ties: lowest index), or -1.
long long nearest(const Point& p, const PointList& set) {
  long long best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < set.size(); ++i) {
    const double d = sq_dist(p, set[i]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<long long>(i);
    }
  }
  return best;
}

struct Candidate {
  std::size_t gt;
  std::size_t pred;
  double distance;
};

// Gt points whose nearest prediction satisfies the matching rule, with the
// distance to that prediction; independent of the distance threshold.
std::vector<Candidate> candidates(const PointList& pred, const PointList& gt,
                                  PointMatching mode) {
  std::vector<Candidate> out;
  if (pred.empty()) return out;
  for (std::size_t g = 0; g < gt.size(); ++g) {
    const long long p = nearest(gt[g], pred);
    if (mode == PointMatching::MutualNearest &&
        nearest(pred[static_cast<std::size_t>(p)], gt) != static_cast<long long>(g)) {
      continue;
    }
    out.push_back({g, static_cast<std::size_t>(p),
                   std::sqrt(sq_dist(gt[g], pred[static_cast<std::size_t>(p)]))});
  }
  return out;
}

PointMatch count_at(const std::vector<Candidate>& cands, std::size_t num_pred,
                    std::size_t num_gt, double threshold) {
  PointMatch m;
  std::vector<char> used(num_pred, 0);
  long long distinct = 0;
  for (const Candidate& c : cands) {
    if (!(c.distance < threshold)) continue;
    ++m.tp;
    if (!used[c.pred]) {
      used[c.pred] = 1;
      ++distinct;
    }
  }
  m.fp = static_cast<long long>(num_pred) - distinct;
  m.fn = static_cast<long long>(num_gt) - m.tp;
  return m;
}

}  // namespace

double iou(const BinaryMask& a, const BinaryMask& b) {
  require_same_size(a, b, "iou");
  long long inter = 0;
  long long uni = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    inter += a.test(i) && b.test(i);
    uni += a.test(i) || b.test(i);
  }
  if (uni == 0) throw PreconditionError("iou: both sets are empty");
  return static_cast<double>(inter) / static_cast<double>(uni);
}

PQReport match_instances(const LabelImage& pred, const LabelImage& gt) {
  require_same_size(pred, gt, "match_instances");
  std::map<std::int32_t, long long> pred_area;
  std::map<std::int32_t, long long> gt_area;
  std::unordered_map<std::uint64_t, long long> overlap;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const std::int32_t p = pred[i];
    const std::int32_t g = gt[i];
    if (p > 0) ++pred_area[p];
    if (g > 0) ++gt_area[g];
    if (p > 0 && g > 0) {
      ++overlap[(static_cast<std::uint64_t>(static_cast<std::uint32_t>(p)) << 32) |
                static_cast<std::uint32_t>(g)];
    }
  }

  PQReport report;
  report.num_pred = static_cast<long long>(pred_area.size());
  report.num_gt = static_cast<long long>(gt_area.size());
  for (const auto& [key, inter] : overlap) {
    const auto p = static_cast<std::int32_t>(key >> 32);
    const auto g = static_cast<std::int32_t>(key & 0xffffffffu);
    const long long uni = pred_area[p] + gt_area[g] - inter;
    // IoU > 1/2 exactly; at most one partner per instance can satisfy it.
    if (2 * inter > uni) report.tp_pairs.push_back({p, g, inter, uni});
  }
  std::sort(report.tp_pairs.begin(), report.tp_pairs.end(),
            [](const MatchedPair& a, const MatchedPair& b) { return a.gt < b.gt; });
  finish_scores(report);
  return report;
}

namespace {

void fill_curve(PQReport& report) {
  report.fscore_curve.clear();
  for (int k = 50; k <= 100; ++k) {
    long long tp = 0;
    for (const MatchedPair& p : report.tp_pairs) {
      if (100 * p.intersection > k * p.union_area) ++tp;
    }
    const long long fp = report.num_pred - tp;
    const long long fn = report.num_gt - tp;
    const long long den = 2 * tp + fp + fn;
    const double f = den == 0 ? 1.0 : static_cast<double>(2 * tp) / static_cast<double>(den);
    report.fscore_curve.push_back({k / 100.0, f});
  }
}

}  // namespace

PQReport coco_pq(const LabelImage& pred, const LabelImage& gt) {
  PQReport report = match_instances(pred, gt);
  fill_curve(report);
  return report;
}

PQReport pool_pq(const std::vector<PQReport>& reports) {
  PQReport out;
  for (const PQReport& r : reports) {
    out.tp_pairs.insert(out.tp_pairs.end(), r.tp_pairs.begin(), r.tp_pairs.end());
    out.num_pred += r.num_pred;
    out.num_gt += r.num_gt;
  }
  finish_scores(out);
  fill_curve(out);
  return out;
}

PQReport coco_pq(const BinaryMask& pred, const BinaryMask& gt, morph::Connectivity conn) {
  require_same_size(pred, gt, "coco_pq");
  return coco_pq(components::label_components(pred, conn),
                 components::label_components(gt, conn));
}

BinaryMask boundary(const BinaryMask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  BinaryMask out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask.test(x, y)) continue;
      const bool edge = x == 0 || y == 0 || x == w - 1 || y == h - 1 || !mask.test(x - 1, y) ||
                        !mask.test(x + 1, y) || !mask.test(x, y - 1) || !mask.test(x, y + 1);
      if (edge) out.set(x, y);
    }
  }
  return out;
}

double percentile_nearest_rank(std::vector<double> values, double p) {
  if (values.empty()) throw PreconditionError("percentile of an empty set");
  if (!(p > 0.0 && p <= 100.0)) throw PreconditionError("percentile must be in (0, 100]");
  std::sort(values.begin(), values.end());
  const auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * values.size()));
  return values[std::max<std::size_t>(rank, 1) - 1];
}

Hausdorff95Result hausdorff95(const BinaryMask& a, const BinaryMask& b, HausdorffVariant variant) {
  require_same_size(a, b, "hausdorff95");
  if (!a.any() || !b.any()) throw PreconditionError("hausdorff95: empty mask");
  const BinaryMask ba = boundary(a);
  const BinaryMask bb = boundary(b);
  std::vector<double> ab = directed_distances(ba, bb);
  std::vector<double> ba_d = directed_distances(bb, ba);
  Hausdorff95Result r;
  r.a_to_b = percentile_nearest_rank(ab, 95.0);
  r.b_to_a = percentile_nearest_rank(ba_d, 95.0);
  if (variant == HausdorffVariant::MaxOfDirected) {
    r.value = std::max(r.a_to_b, r.b_to_a);
  } else {
    ab.insert(ab.end(), ba_d.begin(), ba_d.end());
    r.value = percentile_nearest_rank(std::move(ab), 95.0);
  }
  return r;
}

double mean_hausdorff95(const std::vector<double>& values) {
  if (values.empty()) throw PreconditionError("mean_hausdorff95: no values");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

PointMatch match_points(const PointList& pred, const PointList& gt, double threshold,
                        PointMatching mode) {
  if (threshold < 0) throw PreconditionError("match_points: threshold must be >= 0");
  return count_at(candidates(pred, gt, mode), pred.size(), gt.size(), threshold);
}

double fbeta(double precision, double recall, double beta) {
  const double b2 = beta * beta;
  const double den = b2 * precision + recall;
  if (den <= 0.0) return 0.0;
  return (1.0 + b2) * precision * recall / den;
}

DetectionCurve detection_score(const PointList& pred, const PointList& gt,
                               const DetectionParams& params) {
  if (gt.empty()) throw PreconditionError("detection_score: empty ground truth");
  if (!(params.step > 0.0) || !(params.max_threshold > 0.0)) {
    throw PreconditionError("detection_score: step and max_threshold must be positive");
  }
  DetectionCurve curve;
  curve.beta = params.beta;
  curve.max_threshold = params.max_threshold;
  const std::vector<Candidate> cands = candidates(pred, gt, params.matching);
  const auto samples = static_cast<int>(std::lround(params.max_threshold / params.step));
  for (int k = 0; k <= samples; ++k) {
    const double t = k * params.step;
    const PointMatch m = count_at(cands, pred.size(), gt.size(), t);
    const double precision =
        pred.empty() ? (m.fp > 0 ? 0.0 : 1.0)
                     : static_cast<double>(pred.size() - static_cast<std::size_t>(m.fp)) /
                           static_cast<double>(pred.size());
    const double recall = static_cast<double>(m.tp) / static_cast<double>(gt.size());
    curve.fbeta.push_back({t, fbeta(std::min(1.0, precision), recall, params.beta)});
  }
  double area = 0.0;
  for (std::size_t i = 1; i < curve.fbeta.size(); ++i) {
    area += 0.5 * (curve.fbeta[i].value + curve.fbeta[i - 1].value) *
            (curve.fbeta[i].threshold - curve.fbeta[i - 1].threshold);
  }
  curve.auc = area / params.max_threshold;
  return curve;
}

double aggregate_detection(const std::vector<DetectionCurve>& curves) {
  if (curves.empty()) throw PreconditionError("aggregate_detection: no curves");
  double sum = 0.0;
  for (const DetectionCurve& c : curves) sum += c.auc;
  return sum / static_cast<double>(curves.size());
}

}  // namespace mapseg::metrics
