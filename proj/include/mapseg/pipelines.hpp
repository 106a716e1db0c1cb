#pragma once

#include <string>
#include <vector>

#include "mapseg/lines.hpp"
#include "mapseg/raster.hpp"
#include "mapseg/thresh.hpp"

namespace mapseg::pipelines {

/// Building-block extraction, fully morphological method.
struct Task1Config {
  long long area_close = 1000;
  int dynamics_h = 2;
  long long min_area = 2000;
  long long max_area = 1000000;
  double min_fill_ratio = 0.3;
  double river_overlap = 0.6;
  int river_subsample = 4;
  int river_open_radius = 15;   // at the subsampled scale
  int river_close_radius = 60;  // at the subsampled scale
  double river_max_fill = 0.35;
  long long river_min_area = 50000;  // full-resolution px
};

/// Map-content extraction.
struct Task2Config {
  int qfz_slope = 2;
  int margin_min_level = 180;
  int margin_min_sides = 3;
  int margin_smooth = 0;  // box-mean radius applied before the zone search; 0 = off
  int tophat_size = 31;
  double center_fraction = 0.5;  // R is W * f by H * f
  int line_close = 0;            // axis-aligned closing bridging stroke breaks; 0 = off
  int marker_gap = 10;           // erosion keeping the inner marker off the frame
  double legend_min_fill = 0.97;
  double legend_border = 0.02;   // fraction of the area size
  double legend_min_area = 0.002;  // fraction of the area
  int legend_dilate = 3;
};

/// Recursive Otsu binarization followed by small-component removal.
struct BinarizeConfig {
  thresh::RecursiveOtsuParams otsu;
  long long min_area = 20;
};

struct Task3UwbConfig {
  double theta_step_deg = 0.25;
  double rho_step = 1.0;
  int content_erosion = 5;
  int line_max_width = 10;  // wider ink (fills, blobs) is dropped before the Hough; 0 = off
  double refine_band = 3.0;
  lines::GridSelectParams grid;
  lines::RefineParams refine;
};

struct Task3CmmConfig {
  int subsample = 10;
  int pre_erosion = 10;
  double angle_min = 0.0;
  double angle_max = 30.0;
  double angle_step = 1.0;
  int line_length = 20;     // directional closings, subsampled px
  int tophat_size = 7;      // subsampled px
  double min_period = 4.0;  // subsampled px
  double peak_floor = 0.3;
  int cross_length = 20;
  int contrast_min = 10;
  int refine_window = 10;
  double frame_open = 0.4;      // opening length as a fraction of the side
  double frame_coverage = 0.6;  // fraction of the side a frame row/column must cover
  double frame_band = 0.15;     // frames are searched this close to each side
  bool shared_period = true;    // a family period near 2x or 3x the other is divided down
  int min_confirmed = 4;        // refined crossings needed to accept a grid
};

struct PipelineConfig {
  Task1Config task1;
  Task2Config task2;
  BinarizeConfig binarize;
  Task3UwbConfig task3_uwb;
  Task3CmmConfig task3_cmm;

  /// Values for 1024-px synthetic sheets (about a tenth of a scanned sheet).
  static PipelineConfig desk();
};

/// Human-readable notes on degraded runs ("no grid", fallbacks, ...).
using Diagnostics = std::vector<std::string>;

BinaryMask task1_blocks_cmm2(const RgbImage& img, const BinaryMask& content,
                             const PipelineConfig& cfg, Diagnostics* diag = nullptr);

/// Wide water bodies: large opening then larger closing at a reduced scale,
/// Otsu, elongated components only. Same size as `gray`.
BinaryMask river_mask(const GrayImage& gray, const Task1Config& cfg);

BinaryMask task2_content_cmm(const RgbImage& img, const PipelineConfig& cfg,
                             Diagnostics* diag = nullptr);

BinaryMask task2_binarize_uwb(const RgbImage& img, const PipelineConfig& cfg);

PointList task3_graticule_uwb(const RgbImage& img, const BinaryMask& content,
                              const PipelineConfig& cfg, Diagnostics* diag = nullptr);

PointList task3_graticule_cmm(const RgbImage& img, const PipelineConfig& cfg,
                              Diagnostics* diag = nullptr);

/// Interior of the innermost long axis-aligned frame lines, found on a dark
/// mask by long horizontal and vertical openings. Falls back to the whole
/// image on sides without a frame.
Box detect_frame(const GrayImage& img, const Task3CmmConfig& cfg);

}  // namespace mapseg::pipelines
