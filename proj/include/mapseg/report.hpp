#pragma once

#include <string>
#include <vector>

#include "mapseg/metrics.hpp"

// Serialized score reports. The key sets are stable; docs/formats.md lists
// them with their meaning.
namespace mapseg::report {

struct T1Item {
  std::string name;
  metrics::PQReport pq;
};

struct T2Item {
  std::string name;
  metrics::Hausdorff95Result hd;
};

struct T3Item {
  std::string name;
  metrics::DetectionCurve curve;
  long long num_pred = 0;
  long long num_gt = 0;
};

/// Aggregate PQ over the pooled matches of every image.
std::string t1_json(const std::vector<T1Item>& items, bool per_image);
/// Aggregate hd95 is the mean of per-image values.
std::string t2_json(const std::vector<T2Item>& items, bool per_image,
                    metrics::HausdorffVariant variant);
/// Aggregate auc is the mean of per-image areas.
std::string t3_json(const std::vector<T3Item>& items, bool per_image,
                    const metrics::DetectionParams& params);

/// Pointwise mean of curves sampled at identical thresholds.
metrics::Curve mean_curve(const std::vector<metrics::Curve>& curves);

/// "threshold,value" header, one sample per line.
std::string curve_csv(const metrics::Curve& curve);
/// Accepts the output of curve_csv; the header is optional.
metrics::Curve parse_curve_csv(const std::string& text);

struct PlotStyle {
  std::string title;
  std::string x_label = "threshold";
  std::string y_label = "value";
};

/// Standalone SVG line plot; y spans [0, 1], x spans the sample range.
std::string curve_svg(const metrics::Curve& curve, const PlotStyle& style = {});

}  // namespace mapseg::report
