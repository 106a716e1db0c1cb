#pragma once

#include <array>
#include <cstdint>

#include "mapseg/raster.hpp"

namespace mapseg::thresh {

struct Histogram256 {
  std::array<std::uint64_t, 256> bins{};

  static Histogram256 of(const GrayImage& img);
  /// Only pixels where `where` is foreground.
  static Histogram256 of(const GrayImage& img, const BinaryMask& where);

  std::uint64_t total() const;
};

/// Otsu threshold t: class 0 holds the values <= t. Maximizes the
/// between-class variance with exact integer arithmetic; ties go to the
/// smallest t. A histogram with a single occupied bin returns that bin.
/// Throws PreconditionError on an empty histogram.
int otsu_threshold(const Histogram256& hist);

enum class Polarity { DarkForeground, BrightForeground };

/// DarkForeground: value <= t is foreground. BrightForeground: value > t.
BinaryMask binarize(const GrayImage& img, int t, Polarity polarity);

struct RecursiveOtsuParams {
  int max_depth = 3;
  int delta_stop = 5;
  double max_ink_fraction = 0.4;
};

struct RecursiveOtsuResult {
  BinaryMask ink;
  std::vector<int> thresholds;  // one per accepted round
};

/// Round 1 is plain Otsu (ink = dark class). Each later round re-runs Otsu
/// on the histogram of the remaining non-ink pixels and adds the pixels
/// below the new threshold. Stops at max_depth, when the threshold moves by
/// at most delta_stop, or when the ink fraction would exceed
/// max_ink_fraction. A constant image yields an empty mask.
RecursiveOtsuResult recursive_otsu_detailed(const GrayImage& img,
                                            const RecursiveOtsuParams& params);
BinaryMask recursive_otsu(const GrayImage& img, const RecursiveOtsuParams& params);

}  // namespace mapseg::thresh
