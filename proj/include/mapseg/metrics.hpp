#pragma once

#include <vector>

#include "mapseg/components.hpp"
#include "mapseg/raster.hpp"

namespace mapseg::metrics {

struct CurveSample {
  double threshold = 0.0;
  double value = 0.0;
};

using Curve = std::vector<CurveSample>;

/// |a & b| / |a | b|. Throws PreconditionError when both are empty.
double iou(const BinaryMask& a, const BinaryMask& b);

struct MatchedPair {
  std::int32_t pred = 0;
  std::int32_t gt = 0;
  long long intersection = 0;
  long long union_area = 0;
  double iou() const { return static_cast<double>(intersection) / union_area; }
};

/// Panoptic-quality report for single-class instance segmentation.
/// Invariants: pq = sq * rq, every pair has IoU > 0.5.
struct PQReport {
  std::vector<MatchedPair> tp_pairs;  // sorted by gt label
  long long num_pred = 0;
  long long num_gt = 0;
  long long fp = 0;
  long long fn = 0;
  double sq = 0.0;
  double rq = 0.0;
  double pq = 0.0;
  /// F-score at IoU thresholds 0.50, 0.51, ..., 1.00; a pair counts at
  /// threshold t when its IoU is strictly above t.
  Curve fscore_curve;

  long long tp() const { return static_cast<long long>(tp_pairs.size()); }
};

/// Pairs every (pred, gt) instance couple with IoU > 0.5. Such pairs are
/// necessarily one-to-one. Fills counts and SQ/RQ/PQ; no curve.
PQReport match_instances(const LabelImage& pred, const LabelImage& gt);

/// Full report including the F-score vs IoU curve. When neither side has
/// an instance the result is a perfect score.
PQReport coco_pq(const LabelImage& pred, const LabelImage& gt);
/// Dataset-level report: matched pairs and instance counts summed over
/// images, then scored as one set. Pair order follows the input order.
PQReport pool_pq(const std::vector<PQReport>& reports);
PQReport coco_pq(const BinaryMask& pred, const BinaryMask& gt,
                 morph::Connectivity conn = morph::Connectivity::Eight);

enum class HausdorffVariant {
  MaxOfDirected,  // max(P95(A->B), P95(B->A))
  Pooled,         // P95 over the union of both directed distance sets
};

struct Hausdorff95Result {
  double value = 0.0;
  double a_to_b = 0.0;
  double b_to_a = 0.0;
};

/// Foreground pixels with a 4-neighbour in the background; pixels on the
/// image edge count as boundary.
BinaryMask boundary(const BinaryMask& mask);

/// Nearest-rank percentile (p in (0,100]) of unsorted values.
double percentile_nearest_rank(std::vector<double> values, double p);

/// 95th-percentile boundary Hausdorff distance. Throws PreconditionError on
/// an empty mask.
Hausdorff95Result hausdorff95(const BinaryMask& a, const BinaryMask& b,
                              HausdorffVariant variant = HausdorffVariant::MaxOfDirected);

/// Arithmetic mean. Throws PreconditionError on an empty set.
double mean_hausdorff95(const std::vector<double>& values);

enum class PointMatching {
  MutualNearest,  // gt and pred must be each other's nearest point
  GtNearest,      // only the gt -> nearest pred relation is checked
};

struct PointMatch {
  long long tp = 0;
  long long fp = 0;
  long long fn = 0;
};

/// A gt point is matched when its nearest prediction (ties: lowest index)
/// lies strictly closer than `threshold` and, for MutualNearest, that
/// prediction's nearest gt point is this one.
PointMatch match_points(const PointList& pred, const PointList& gt, double threshold,
                        PointMatching mode = PointMatching::MutualNearest);

struct DetectionCurve {
  double beta = 0.5;
  double max_threshold = 50.0;
  Curve fbeta;  // value per distance threshold
  double auc = 0.0;  // trapezoidal area / max_threshold
};

struct DetectionParams {
  double beta = 0.5;
  double max_threshold = 50.0;
  double step = 0.5;
  PointMatching matching = PointMatching::MutualNearest;
};

/// F-beta vs distance threshold curve and its normalized area. Throws
/// PreconditionError when gt is empty.
DetectionCurve detection_score(const PointList& pred, const PointList& gt,
                               const DetectionParams& params = {});

/// Mean of per-image AUCs. Throws PreconditionError on an empty set.
double aggregate_detection(const std::vector<DetectionCurve>& curves);

/// F-beta from precision and recall; 0 when both are 0.
double fbeta(double precision, double recall, double beta);

}  // namespace mapseg::metrics
