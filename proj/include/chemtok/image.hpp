#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Dense>

namespace chemtok {

using Plane = Eigen::MatrixXf;

/// Planar float image with values in [0,1]; each plane is height x width.
struct Image {
  std::vector<Plane> planes;

  Image() = default;
  Image(int width, int height, int channels, float fill = 0.0f);

  int width() const { return planes.empty() ? 0 : static_cast<int>(planes[0].cols()); }
  int height() const { return planes.empty() ? 0 : static_cast<int>(planes[0].rows()); }
  int channels() const { return static_cast<int>(planes.size()); }
};

/// Interleaved 8-bit RGB raster.
struct Rgb8Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;

  Rgb8Image() = default;
  Rgb8Image(int w, int h, std::uint8_t r = 0, std::uint8_t g = 0, std::uint8_t b = 0);

  std::uint8_t* pixel(int x, int y) { return rgb.data() + 3 * (static_cast<std::size_t>(y) * width + x); }
  const std::uint8_t* pixel(int x, int y) const {
    return rgb.data() + 3 * (static_cast<std::size_t>(y) * width + x);
  }
  bool operator==(const Rgb8Image&) const = default;
};

Image to_float(const Rgb8Image& img);
Rgb8Image to_rgb8(const Image& img);

/// Bilinear resize with half-pixel centers (edge samples clamped).
Image resize_bilinear(const Image& img, int width, int height);

/// PNG (.png) or binary PPM (.ppm). Channel count is normalized to RGB.
Rgb8Image read_image(const std::filesystem::path& path);
void write_image(const Rgb8Image& img, const std::filesystem::path& path);
/// Single-channel 8-bit PNG/PGM, one byte per pixel.
void write_gray(const std::vector<std::uint8_t>& gray, int width, int height,
                const std::filesystem::path& path);

}  // namespace chemtok
