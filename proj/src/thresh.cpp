#include "mapseg/thresh.hpp"

#include <cstdlib>
#include <numeric>

namespace mapseg::thresh {
namespace {

using u128 = unsigned __int128;

// Between-class variance up to the constant factor 1/N^2:
//   (N*S0 - n0*S)^2 / (n0*n1)
struct Score {
  u128 num = 0;
  u128 den = 1;
};

// a.num/a.den > b.num/b.den, exact.
bool greater(const Score& a, const Score& b) {
  const u128 qa = a.num / a.den;
  const u128 qb = b.num / b.den;
  if (qa != qb) return qa > qb;
  return (a.num % a.den) * b.den > (b.num % b.den) * a.den;
}

int single_bin(const Histogram256& hist) {
  int occupied = -1;
  for (int v = 0; v < 256; ++v) {
    if (hist.bins[v] == 0) continue;
    if (occupied >= 0) return -1;
    occupied = v;
  }
  return occupied;
}

}  // namespace

Histogram256 Histogram256::of(const GrayImage& img) {
  Histogram256 h;
  for (const std::uint8_t v : img.pixels()) ++h.bins[v];
  return h;
}

Histogram256 Histogram256::of(const GrayImage& img, const BinaryMask& where) {
  require_same_size(img, where, "histogram");
  Histogram256 h;
  for (std::size_t i = 0; i < img.size(); ++i) {
    if (where.test(i)) ++h.bins[img[i]];
  }
  return h;
}

std::uint64_t Histogram256::total() const {
  return std::accumulate(bins.begin(), bins.end(), std::uint64_t{0});
}

int otsu_threshold(const Histogram256& hist) {
  const std::uint64_t n = hist.total();
  if (n == 0) throw PreconditionError("otsu_threshold: empty histogram");
  if (const int only = single_bin(hist); only >= 0) return only;

  std::uint64_t sum = 0;
  for (int v = 0; v < 256; ++v) sum += hist.bins[v] * static_cast<std::uint64_t>(v);

  int best_t = -1;
  Score best;
  std::uint64_t n0 = 0;
  std::uint64_t s0 = 0;
  for (int t = 0; t < 255; ++t) {
    n0 += hist.bins[t];
    s0 += hist.bins[t] * static_cast<std::uint64_t>(t);
    const std::uint64_t n1 = n - n0;
    if (n0 == 0 || n1 == 0) continue;
    const __int128 diff = static_cast<__int128>(n) * s0 - static_cast<__int128>(n0) * sum;
    const u128 mag = static_cast<u128>(diff < 0 ? -diff : diff);
    const Score score{mag * mag, static_cast<u128>(n0) * n1};
    if (best_t < 0 || greater(score, best)) {
      best = score;
      best_t = t;
    }
  }
  return best_t;
}

BinaryMask binarize(const GrayImage& img, int t, Polarity polarity) {
  BinaryMask out(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i) {
    out.set(i, polarity == Polarity::DarkForeground ? img[i] <= t : img[i] > t);
  }
  return out;
}

RecursiveOtsuResult recursive_otsu_detailed(const GrayImage& img,
                                            const RecursiveOtsuParams& params) {
  if (params.max_depth < 1) throw PreconditionError("recursive_otsu: max_depth must be >= 1");
  RecursiveOtsuResult result{BinaryMask(img.width(), img.height()), {}};
  Histogram256 hist = Histogram256::of(img);
  if (single_bin(hist) >= 0) return result;

  int t = otsu_threshold(hist);
  result.ink = binarize(img, t, Polarity::DarkForeground);
  result.thresholds.push_back(t);
  std::size_t ink_count = result.ink.count();
  const double total = static_cast<double>(img.size());

  for (int depth = 2; depth <= params.max_depth; ++depth) {
    const BinaryMask rest = result.ink.complement();
    const Histogram256 rest_hist = Histogram256::of(img, rest);
    if (rest_hist.total() == 0 || single_bin(rest_hist) >= 0) break;
    const int next = otsu_threshold(rest_hist);
    if (std::abs(next - t) <= params.delta_stop) break;
    std::size_t added = 0;
    for (int v = 0; v <= next; ++v) added += rest_hist.bins[v];
    if (static_cast<double>(ink_count + added) / total > params.max_ink_fraction) break;
    for (std::size_t i = 0; i < img.size(); ++i) {
      if (!result.ink.test(i) && img[i] <= next) result.ink.set(i);
    }
    ink_count += added;
    t = next;
    result.thresholds.push_back(t);
  }
  return result;
}

BinaryMask recursive_otsu(const GrayImage& img, const RecursiveOtsuParams& params) {
  return recursive_otsu_detailed(img, params).ink;
}

}  // namespace mapseg::thresh
