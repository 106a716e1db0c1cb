#pragma once

#include <cstdint>

#include "mapseg/raster.hpp"

namespace mapseg::synth {

/// Geometry and degradations of a generated map sheet. Lengths in px.
struct SheetSpec {
  int width = 1024;
  int height = 1024;
  int margin = 48;          // bare paper outside the outer frame
  int frame_count = 2;      // 1 = inner frame only
  int outer_stroke = 8;
  int inner_stroke = 2;
  int frame_gap = 14;       // paper between outer and inner frame
  bool margin_text = true;  // speck "title" in the top margin

  int legend_count = 2;     // corner boxes touching the inner frame (top-right, bottom-left, ...)
  int legend_width = 130;
  int legend_height = 60;

  int blocks = 20;
  int block_min = 36;
  int block_max = 88;
  int block_stroke = 2;
  int block_gap = 12;         // min paper between two blocks
  int block_clearance = 30;   // min distance to the inner frame and legends
  int crossing_clearance = 25;  // min distance from a block to a graticule crossing
  double l_shape_fraction = 0.25;
  long long min_street_area = 12000;  // open paper kept in each graticule cell
  bool hatching = false;

  bool graticule = true;
  double grid_angle_deg = 3.0;
  double grid_period = 150.0;
  double grid_stroke = 2.0;
  double grid_phase = 0.0;  // fraction of a period; 0 puts a crossing at the sheet centre
  int grid_lines = 5;       // per family; 0 fills the content area
  double dash_on = 0.0;     // 0 = solid
  double dash_off = 0.0;

  bool river = false;
  double river_width = 30.0;

  double speck_density = 0.0;  // specks per pixel
  double break_probability = 0.0;
  double noise_sigma = 0.0;

  std::uint64_t seed = 1;
};

struct SheetTruth {
  BinaryMask content;
  LabelImage blocks;
  PointList intersections;
};

struct Sheet {
  RgbImage image;
  SheetTruth truth;
};

/// Renders a sheet and its exact ground truth. Deterministic in the seed.
/// Throws PreconditionError when the layout cannot be satisfied.
Sheet generate(const SheetSpec& spec);

/// Stroke breaks, specks and intensity noise scaled by `level` in [0, 1].
/// Level 0 returns the input unchanged.
RgbImage corrupt(const RgbImage& img, double level, std::uint64_t seed = 1);

}  // namespace mapseg::synth
