#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "mapseg/morph.hpp"
#include "mapseg/raster.hpp"

namespace mapseg::components {

using morph::Connectivity;

struct ComponentStats {
  std::int32_t label = 0;
  long long area = 0;
  Box bbox;
  double fill_ratio = 0.0;        // area / bbox area
  std::optional<double> overlap;  // fraction of the area inside the reference mask
};

/// Foreground components labeled 1..k in raster-scan discovery order.
LabelImage label_components(const BinaryMask& mask, Connectivity conn = Connectivity::Eight);

/// Largest label present (k for label_components output).
std::int32_t max_label(const LabelImage& labels);

/// One record per positive label, ordered by label.
std::vector<ComponentStats> component_stats(const LabelImage& labels,
                                            const BinaryMask* reference = nullptr);

using Predicate = std::function<bool(const ComponentStats&)>;

/// Foreground = union of the components accepted by `keep`.
BinaryMask filter_components(const LabelImage& labels, const Predicate& keep,
                             const BinaryMask* reference = nullptr);

/// Drops components with fewer than min_area pixels.
BinaryMask remove_small(const BinaryMask& mask, long long min_area,
                        Connectivity conn = Connectivity::Eight);

/// Renumbers positive labels to 1..k in raster discovery order.
LabelImage compact_labels(const LabelImage& labels);

/// Foreground of a label image (label > 0).
BinaryMask foreground(const LabelImage& labels);

}  // namespace mapseg::components
