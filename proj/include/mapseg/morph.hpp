#pragma once

#include <string>
#include <vector>

#include "mapseg/raster.hpp"

namespace mapseg::morph {

struct Offset {
  int dx = 0;
  int dy = 0;
  friend auto operator<=>(const Offset&, const Offset&) = default;
};

enum class Connectivity { Four = 4, Eight = 8 };

/// Flat structuring element: a set of pixel offsets that always contains
/// the origin.
class StructuringElement {
 public:
  /// Side n (odd sizes are centered; even sizes extend one more pixel
  /// towards negative offsets).
  static StructuringElement square(int n);
  /// Euclidean disk of radius r.
  static StructuringElement disk(int r);
  /// Horizontal and vertical arms of `arm` pixels each side of the origin.
  static StructuringElement cross(int arm);
  /// Bresenham digitization of a centered segment of `length` pixels at
  /// `angle_deg` (0 = along +x, 90 = along +y, image rows growing down).
  static StructuringElement line(int length, double angle_deg);
  /// Union of two centered lines, at `angle_deg` and `angle_deg + 90`.
  static StructuringElement rotated_cross(int length, double angle_deg);
  /// Arbitrary offsets; the origin is added when missing.
  static StructuringElement from_offsets(std::vector<Offset> offsets, std::string name = "custom");

  const std::vector<Offset>& offsets() const { return offsets_; }
  const std::string& name() const { return name_; }
  std::size_t size() const { return offsets_.size(); }
  StructuringElement reflect() const;

 private:
  StructuringElement(std::vector<Offset> offsets, std::string name);
  std::vector<Offset> offsets_;
  std::string name_;
};

enum class FilterMode { Erode, Dilate, Open, Close };
enum class Polarity { White, Black };
enum class ReconstructDirection { ByDilation, ByErosion };
enum class AreaMode { Opening, Closing };

/// Seed labels for the watershed: >= 1 on seeds, 0 elsewhere.
struct MarkerSpec {
  LabelImage labels;
  int count = 0;
};

/// Flat morphology. erode(x) = min over b of f(x + b), dilate(x) = max over
/// b of f(x - b). Pixels outside the image are neutral (255 for erosion,
/// 0 for dilation).
GrayImage se_filter(const GrayImage& img, const StructuringElement& se, FilterMode mode);
GrayImage erode(const GrayImage& img, const StructuringElement& se);
GrayImage dilate(const GrayImage& img, const StructuringElement& se);
GrayImage open(const GrayImage& img, const StructuringElement& se);
GrayImage close(const GrayImage& img, const StructuringElement& se);
BinaryMask erode(const BinaryMask& mask, const StructuringElement& se);
BinaryMask dilate(const BinaryMask& mask, const StructuringElement& se);
BinaryMask open(const BinaryMask& mask, const StructuringElement& se);
BinaryMask close(const BinaryMask& mask, const StructuringElement& se);

/// White: img - open(img). Black: close(img) - img.
GrayImage top_hat(const GrayImage& img, const StructuringElement& se, Polarity polarity);

/// dilate - erode.
GrayImage gradient(const GrayImage& img, const StructuringElement& se);

/// Geodesic reconstruction to stability. Throws PreconditionError when the
/// marker is not below (by dilation) or above (by erosion) the mask.
GrayImage geodesic_reconstruct(const GrayImage& marker, const GrayImage& mask,
                               ReconstructDirection direction,
                               Connectivity conn = Connectivity::Eight);
BinaryMask geodesic_reconstruct(const BinaryMask& marker, const BinaryMask& mask,
                                Connectivity conn = Connectivity::Eight);

/// Fills background regions that cannot reach the image border through
/// 4-connected background paths.
BinaryMask fill_holes(const BinaryMask& mask);
/// Gray-level hole filling: reconstruction by erosion from the border
/// values, 4-connected.
GrayImage fill_holes(const GrayImage& img);

/// Area opening removes bright components, area closing dark components,
/// of fewer than `area` pixels (8-connected level sets).
GrayImage area_filter(const GrayImage& img, long long area, AreaMode mode);

/// Regional minima whose dynamic is at least h, labeled 1..k in raster
/// discovery order (8-connected). Computed as the regional minima of the
/// reconstruction by erosion of img + (h - 1) over img.
MarkerSpec minima_by_dynamics(const GrayImage& img, int h);
/// Regional minima of `img`, 8-connected, labeled in discovery order.
MarkerSpec regional_minima(const GrayImage& img);

/// Marker-driven flooding (4-connected). Pixels are labeled when pushed;
/// ties in relief are served first-in first-out. Throws PreconditionError
/// when no marker is present.
LabelImage watershed(const GrayImage& relief, const MarkerSpec& markers);

/// Components of the graph linking 4-neighbours whose intensities differ by
/// at most `slope`, labeled in raster discovery order.
LabelImage quasi_flat_zones(const GrayImage& img, int slope);

/// Exact Euclidean distance from each pixel to the nearest foreground pixel.
/// Throws PreconditionError on an empty mask.
RealImage distance_transform(const BinaryMask& mask);
/// Squared distances as exact integers.
Raster<long long> squared_distance_transform(const BinaryMask& mask);

/// Closing with line(length, angle_deg).
GrayImage directional_close(const GrayImage& img, int length, double angle_deg);

/// Per-block minimum over factor x factor tiles; partial tiles at the right
/// and bottom edges use their available pixels.
GrayImage block_min(const GrayImage& img, int factor);

}  // namespace mapseg::morph
