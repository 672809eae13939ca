#pragma once

#include "tacrot/types.hpp"

#include <cstdint>
#include <vector>

namespace tacrot {

/// Per-pixel maximum over R, G, B of the absolute intensity difference.
std::vector<std::uint8_t> max_channel_abs_diff(const IntensityFrame& a,
                                               const IntensityFrame& b);

/// Per-pixel max(R, G, B) of a single frame (the HSV value channel).
std::vector<std::uint8_t> value_channel(const IntensityFrame& frame);

Mask threshold_mask(const std::vector<std::uint8_t>& img, int width, int height,
                    int threshold);

// 3x3 square structuring element, 8-neighborhood.
Mask erode3(const Mask& m);
Mask dilate3(const Mask& m);
Mask morph_open(const Mask& m);
Mask morph_close(const Mask& m);

/// Keeps only the largest 8-connected component; empty input stays empty.
Mask largest_component(const Mask& m);

/// Separable box filter of odd size `k` (borders clamped).
std::vector<std::uint8_t> box_filter(const std::vector<std::uint8_t>& img,
                                     int width, int height, int k);

/// Centroid and second-order central moments of the set pixels.
struct MomentStats {
  size_t area = 0;
  double cx = 0.0, cy = 0.0;
  double mu20 = 0.0, mu02 = 0.0, mu11 = 0.0;
};
MomentStats mask_moments(const Mask& m);

/// Moments of the set pixels weighted by `w` (mask layout, one byte per
/// pixel): weighted centroid plus weight-normalized central second moments.
/// Soft component edges then contribute fractionally, which recovers the
/// principal axis with sub-pixel accuracy on small blobs.
struct WeightedMoments {
  double weight = 0.0;
  double cx = 0.0, cy = 0.0;
  double mu20 = 0.0, mu02 = 0.0, mu11 = 0.0;  // per unit weight
};
WeightedMoments weighted_moments(const Mask& m,
                                 const std::vector<std::uint8_t>& w);

}  // namespace tacrot
