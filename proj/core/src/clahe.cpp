#include "irloc/clahe.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace irloc {

namespace {

inline std::uint8_t round_half_up_u8(double v) {
  const double r = std::floor(v + 0.5);
  return static_cast<std::uint8_t>(std::clamp(r, 0.0, 255.0));
}

using TileLut = std::array<std::uint8_t, 256>;

TileLut build_tile_lut(const double hist_in[256], double tile_pixels, double clip_limit) {
  double hist[256];
  std::copy(hist_in, hist_in + 256, hist);

  const double threshold = clip_limit * tile_pixels / 256.0;
  double excess = 0.0;
  double headroom_total = 0.0;
  for (int i = 0; i < 256; ++i) {
    if (hist[i] > threshold) {
      excess += hist[i] - threshold;
      hist[i] = threshold;
    }
    headroom_total += threshold - hist[i];
  }
  if (excess > 0.0 && headroom_total > 0.0) {
    // One redistribution pass filling each bin proportionally to its headroom;
    // headroom_total >= excess holds whenever clip_limit >= 1, so no bin
    // exceeds the threshold afterwards.
    const double ratio = excess / headroom_total;
    for (int i = 0; i < 256; ++i) hist[i] += ratio * (threshold - hist[i]);
  }

  TileLut lut;
  double cdf = 0.0;
  for (int i = 0; i < 256; ++i) {
    cdf += hist[i];
    lut[i] = round_half_up_u8(256.0 * cdf / tile_pixels - 1.0);
  }
  return lut;
}

}  // namespace

GrayImage clahe(const GrayImage& img, const ClaheParams& params) {
  if (img.pixels.size() != static_cast<std::size_t>(img.width) * img.height)
    throw InvalidArgument("clahe: image pixel buffer does not match dimensions");
  if (params.tiles_x == 0 || params.tiles_y == 0)
    throw InvalidArgument("clahe: tile grid must be at least 1x1");
  if (!(params.clip_limit >= 1.0) || !std::isfinite(params.clip_limit))
    throw InvalidArgument("clahe: clip_limit must be finite and >= 1.0");
  if (img.width < params.tiles_x || img.height < params.tiles_y)
    throw InvalidArgument("clahe: image smaller than tile grid (" +
                          std::to_string(img.width) + "x" + std::to_string(img.height) +
                          " vs " + std::to_string(params.tiles_x) + "x" +
                          std::to_string(params.tiles_y) + " tiles)");

  const std::uint32_t tx_count = params.tiles_x;
  const std::uint32_t ty_count = params.tiles_y;

  // Pixel x belongs to tile floor(x * tiles_x / width); tile sizes differ by
  // at most one pixel when the grid does not divide the image evenly.
  std::vector<double> hists(static_cast<std::size_t>(tx_count) * ty_count * 256, 0.0);
  std::vector<double> tile_pixels(static_cast<std::size_t>(tx_count) * ty_count, 0.0);
  for (std::uint32_t y = 0; y < img.height; ++y) {
    const std::uint32_t ty = static_cast<std::uint32_t>(
        (static_cast<std::uint64_t>(y) * ty_count) / img.height);
    for (std::uint32_t x = 0; x < img.width; ++x) {
      const std::uint32_t tx = static_cast<std::uint32_t>(
          (static_cast<std::uint64_t>(x) * tx_count) / img.width);
      const std::size_t tile = static_cast<std::size_t>(ty) * tx_count + tx;
      hists[tile * 256 + img.at(x, y)] += 1.0;
      tile_pixels[tile] += 1.0;
    }
  }

  std::vector<TileLut> luts(static_cast<std::size_t>(tx_count) * ty_count);
  for (std::size_t t = 0; t < luts.size(); ++t)
    luts[t] = build_tile_lut(&hists[t * 256], tile_pixels[t], params.clip_limit);

  GrayImage out = make_image(img.width, img.height);
  const double tile_w = static_cast<double>(img.width) / tx_count;
  const double tile_h = static_cast<double>(img.height) / ty_count;
  const auto lut_at = [&](std::uint32_t tx, std::uint32_t ty) -> const TileLut& {
    return luts[static_cast<std::size_t>(ty) * tx_count + tx];
  };

  for (std::uint32_t y = 0; y < img.height; ++y) {
    const double gy = (y + 0.5) / tile_h - 0.5;
    const double fy_floor = std::floor(gy);
    const double fy = gy - fy_floor;
    const std::int64_t ty0s = static_cast<std::int64_t>(fy_floor);
    const std::uint32_t ty0 = static_cast<std::uint32_t>(
        std::clamp<std::int64_t>(ty0s, 0, ty_count - 1));
    const std::uint32_t ty1 = static_cast<std::uint32_t>(
        std::clamp<std::int64_t>(ty0s + 1, 0, ty_count - 1));
    for (std::uint32_t x = 0; x < img.width; ++x) {
      const double gx = (x + 0.5) / tile_w - 0.5;
      const double fx_floor = std::floor(gx);
      const double fx = gx - fx_floor;
      const std::int64_t tx0s = static_cast<std::int64_t>(fx_floor);
      const std::uint32_t tx0 = static_cast<std::uint32_t>(
          std::clamp<std::int64_t>(tx0s, 0, tx_count - 1));
      const std::uint32_t tx1 = static_cast<std::uint32_t>(
          std::clamp<std::int64_t>(tx0s + 1, 0, tx_count - 1));

      const std::uint8_t v = img.at(x, y);
      const double top = (1.0 - fx) * lut_at(tx0, ty0)[v] + fx * lut_at(tx1, ty0)[v];
      const double bot = (1.0 - fx) * lut_at(tx0, ty1)[v] + fx * lut_at(tx1, ty1)[v];
      out.at(x, y) = round_half_up_u8((1.0 - fy) * top + fy * bot);
    }
  }
  return out;
}

}  // namespace irloc
