#pragma once

#include "irloc/image.hpp"

namespace irloc {

struct ClaheParams {
  std::uint32_t tiles_x = 8;
  std::uint32_t tiles_y = 8;
  /// Histogram clip threshold as a multiple of the uniform bin height
  /// (tile_pixels / 256). Must be >= 1.
  double clip_limit = 3.0;
};

/// Contrast-limited adaptive histogram equalization.
///
/// Per tile, the 256-bin histogram is clipped at clip_limit * tile_pixels/256
/// and the clipped excess is redistributed in a single pass, proportionally
/// to each bin's remaining headroom below the threshold (so clip_limit = 1
/// yields an exactly uniform histogram and therefore the identity mapping).
/// The per-tile mapping is the scaled CDF, map(v) = round(256*cdf(v)/T) - 1
/// clamped to [0,255] with half-up rounding. Output pixels bilinearly blend
/// the four surrounding tile mappings; border pixels clamp tile coordinates.
GrayImage clahe(const GrayImage& img, const ClaheParams& params);

}  // namespace irloc
