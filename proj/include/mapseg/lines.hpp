#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mapseg/raster.hpp"

namespace mapseg::lines {

/// Line in normal form x cos(theta) + y sin(theta) = rho.
struct LineParam {
  double theta = 0.0;  // radians
  double rho = 0.0;    // px
  double rating = 0.0;
  bool inserted = false;  // added to complete a progression, not observed
};

/// theta/rho accumulator shared by the Hough and Radon transforms. Row t
/// holds angle theta(t); column r holds rho_min + r * rho_step.
struct Accumulator {
  std::vector<double> thetas;  // radians, one per row
  double rho_min = 0.0;
  double rho_step = 1.0;
  int rho_bins = 0;
  std::vector<double> values;
  /// Size of the bounding box of the voting pixels (Hough only).
  int extent_width = 0;
  int extent_height = 0;

  int theta_bins() const { return static_cast<int>(thetas.size()); }
  double& at(int t, int r) { return values[static_cast<std::size_t>(t) * rho_bins + r]; }
  double at(int t, int r) const { return values[static_cast<std::size_t>(t) * rho_bins + r]; }
  double rho_of(int r) const { return rho_min + r * rho_step; }
  std::vector<double> column(int t) const;
  double total() const;
};

/// Every foreground pixel votes once per theta bin (theta = k * theta_step
/// over [0, pi)) into its nearest rho bin. Throws PreconditionError on an
/// empty mask or non-positive steps.
Accumulator hough_transform(const BinaryMask& mask, double theta_step_deg = 0.25,
                            double rho_step = 1.0);

/// Projection sums along lines; angles are the normal directions in
/// degrees. Each pixel's mass is split linearly between the two nearest
/// 1-px rho bins, so every row sums to the image mass.
Accumulator radon_transform(const GrayImage& img, const std::vector<double>& angles_deg);

struct GridSelectParams {
  int expected_min_lines = 4;
  double angle_tol_deg = 1.0;     // angular cluster width and perpendicularity slack
  double spacing_tol = 3.0;       // px deviation allowed from the progression
  double peak_floor = 0.3;        // fraction of the global maximum
  double min_votes_fraction = 0.25;  // of the smaller voting extent
  double min_period = 20.0;       // px
  double nms_rho = 8.0;           // px
  double nms_theta_deg = 1.0;
  /// Penalty per inserted line; negative means the mean member rating.
  double missing_penalty = -1.0;
};

/// Two perpendicular families of equally spaced lines. Family A has normal
/// angle `angle` in [0, pi/2); family B has angle + pi/2. Lines of a family
/// are sorted by rho and expressed near the family angle.
struct GridModel {
  bool found = false;
  double angle = 0.0;
  double period = 0.0;
  std::vector<LineParam> family_a;
  std::vector<LineParam> family_b;
  double rating = 0.0;
  std::string diagnostic;
};

std::vector<LineParam> accumulator_peaks(const Accumulator& acc, const GridSelectParams& params);

/// Peak extraction, angular clustering, perpendicular pairing, common
/// period progression fit, insertion of missing members. Returns a model
/// with found == false and a diagnostic when nothing admissible exists.
GridModel select_grid(const Accumulator& acc, const GridSelectParams& params = {});

/// Re-fits each observed line by total least squares on the foreground
/// pixels within `band` px of it; inserted lines are re-placed on the
/// refined progression.
GridModel refine_lines(const BinaryMask& mask, const GridModel& grid, double band = 3.0);

struct GridPoint {
  Point point;
  int a = 0;  // index into family_a
  int b = 0;  // index into family_b
};

/// Intersection of two normal-form lines; nullopt when nearly parallel.
std::optional<Point> intersect(const LineParam& l1, const LineParam& l2);

/// All A x B intersections inside `bounds` (inclusive pixel box).
std::vector<GridPoint> grid_points(const GridModel& grid, const Box& bounds);
PointList line_intersections(const GridModel& grid, const Box& bounds);

struct DirectionResult {
  double angle_deg = 0.0;
  int longest_run = 0;
  bool low_confidence = true;
};

/// Longest run of foreground pixels along digital lines at angle_deg
/// (direction of travel; 0 = +x, 90 = +y). A pixel counts when it or a
/// neighbour across the direction of travel is foreground.
int longest_run(const BinaryMask& mask, double angle_deg);

/// Dark line structure emphasised along angle_deg: black top-hat of the
/// directional closing, binarized with Otsu (bright residue). Empty when
/// the residue is constant.
BinaryMask directional_lines(const GrayImage& img, int line_length, double angle_deg,
                             int tophat_size);

/// Sweeps line directions and returns the one giving the longest run
/// (ties: smallest angle).
DirectionResult best_direction(const GrayImage& img, double angle_min = 0.0,
                               double angle_max = 30.0, double angle_step = 1.0,
                               int line_length = 20, int tophat_size = 7);

/// Period of a 1-D profile from its unbiased, mean-removed autocorrelation
/// over lags [min_period, n/2]: the smallest-lag local maximum reaching
/// `near_max` of the best one, refined by parabolic interpolation. Throws
/// PreconditionError when the profile is too short or constant.
double grid_period(const std::vector<double>& profile, double min_period = 4.0,
                   double near_max = 0.9);

/// Local maxima of a profile at least `min_separation` apart and above
/// floor_fraction * max, strongest first, returned sorted by position with
/// parabolic sub-bin refinement.
std::vector<double> profile_peaks(const std::vector<double>& profile, double min_separation,
                                  double floor_fraction = 0.3);

/// Snaps detected positions onto the progression phase + k * period with
/// the median phase, then lists every member inside [lo, hi].
std::vector<double> complete_grid(const std::vector<double>& detected, double period,
                                  double lo, double hi);

enum class RefineMethod { Template, Closing };

struct RefineParams {
  int window = 10;          // search radius in px
  int template_arm = 20;    // template arms reach this far from the centre (41 px span)
  double template_stroke = 3.0;
  double min_ncc = 0.3;
  int cross_length = 20;    // closing method
  int contrast_min = 10;
};

struct Refined {
  Point point;
  double confidence = 0.0;
  bool low_confidence = false;
};

/// Locates a grid crossing near `coarse`. Template: peak normalized cross
/// correlation with a dark rotated cross. Closing: argmin of the closing by
/// a rotated cross inside the window, confidence = closing contrast. On low
/// confidence the coarse point is returned. The result never moves farther
/// than `window` from the coarse point.
Refined refine_intersection(const GrayImage& img, const Point& coarse, double angle_rad,
                            RefineMethod method, const RefineParams& params = {});

/// Dark cross template (255 background) of the given half span and stroke,
/// anti-aliased, rotated by angle_rad.
GrayImage cross_template(int arm, double stroke, double angle_rad);

struct Slot {
  Point point;
  int a = 0;
  int b = 0;
  bool confident = true;
};

struct InferResult {
  PointList points;          // one per slot, same order
  std::vector<bool> filled;  // low-confidence slots that were inferred
  std::vector<std::size_t> unfilled;  // low-confidence slots left as they were
};

/// For each low-confidence slot, fits lines through the confident points
/// sharing its `a` index and its `b` index (at least two each) and returns
/// their intersection. An index without support is interpolated between the
/// nearest supported indices on either side, never extrapolated. Confident
/// slots pass through unchanged.
InferResult infer_missing(const std::vector<Slot>& slots);

/// Total-least-squares line through points; nullopt for fewer than two
/// distinct points.
std::optional<LineParam> fit_line(const PointList& points);

}  // namespace mapseg::lines
