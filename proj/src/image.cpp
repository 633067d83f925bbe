#include "chemtok/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>

#include "chemtok/errors.hpp"

namespace chemtok {

Image::Image(int width, int height, int channels, float fill) {
  planes.assign(channels, Plane::Constant(height, width, fill));
}

Rgb8Image::Rgb8Image(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b)
    : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3) {
  for (std::size_t i = 0; i < rgb.size(); i += 3) {
    rgb[i] = r;
    rgb[i + 1] = g;
    rgb[i + 2] = b;
  }
}

Image to_float(const Rgb8Image& img) {
  Image out(img.width, img.height, 3);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const auto* p = img.pixel(x, y);
      for (int c = 0; c < 3; ++c) out.planes[c](y, x) = p[c] / 255.0f;
    }
  }
  return out;
}

Rgb8Image to_rgb8(const Image& img) {
  Rgb8Image out(img.width(), img.height());
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      auto* p = out.pixel(x, y);
      for (int c = 0; c < 3; ++c) {
        const float v = img.planes[std::min(c, img.channels() - 1)](y, x);
        p[c] = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
      }
    }
  }
  return out;
}

namespace {

struct Tap {
  int lo;
  int hi;
  float frac;
};

std::vector<Tap> make_taps(int src, int dst) {
  std::vector<Tap> taps(dst);
  const double scale = static_cast<double>(src) / dst;
  for (int i = 0; i < dst; ++i) {
    double s = (i + 0.5) * scale - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(src - 1));
    const int lo = static_cast<int>(std::floor(s));
    const int hi = std::min(lo + 1, src - 1);
    taps[i] = {lo, hi, static_cast<float>(s - lo)};
  }
  return taps;
}

}  // namespace

Image resize_bilinear(const Image& img, int width, int height) {
  if (width < 1 || height < 1) throw ConfigError("resize target must be positive");
  if (width == img.width() && height == img.height()) return img;
  const auto tx = make_taps(img.width(), width);
  const auto ty = make_taps(img.height(), height);
  Image out(width, height, img.channels());
  for (int c = 0; c < img.channels(); ++c) {
    const Plane& src = img.planes[c];
    Plane& dst = out.planes[c];
    for (int y = 0; y < height; ++y) {
      const Tap& v = ty[y];
      for (int x = 0; x < width; ++x) {
        const Tap& h = tx[x];
        const float top = src(v.lo, h.lo) + h.frac * (src(v.lo, h.hi) - src(v.lo, h.lo));
        const float bot = src(v.hi, h.lo) + h.frac * (src(v.hi, h.hi) - src(v.hi, h.lo));
        dst(y, x) = top + v.frac * (bot - top);
      }
    }
  }
  return out;
}

namespace {

bool has_ext(const std::filesystem::path& p, const char* ext) {
  auto e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
  return e == ext;
}

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& p, const char* mode) {
  FilePtr f(std::fopen(p.c_str(), mode));
  if (!f) throw IoError("cannot open " + p.string());
  return f;
}

Rgb8Image read_png(const std::filesystem::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw IoError("cannot read PNG " + path.string() + ": " + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  Rgb8Image out(static_cast<int>(image.width), static_cast<int>(image.height));
  if (!png_image_finish_read(&image, nullptr, out.rgb.data(), 0, nullptr)) {
    png_image_free(&image);
    throw IoError("cannot decode PNG " + path.string() + ": " + image.message);
  }
  return out;
}

void write_png(const std::uint8_t* data, int width, int height, int channels,
               const std::filesystem::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.c_str(), 0, data, 0, nullptr)) {
    throw IoError("cannot write PNG " + path.string() + ": " + image.message);
  }
}

int read_pnm_int(std::FILE* f) {
  int c = std::fgetc(f);
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = std::fgetc(f);
    } else if (!std::isspace(c)) {
      break;
    }
    c = std::fgetc(f);
  }
  int v = 0;
  bool any = false;
  while (c != EOF && std::isdigit(c)) {
    v = v * 10 + (c - '0');
    any = true;
    c = std::fgetc(f);
  }
  if (!any) throw IoError("malformed PNM header");
  return v;
}

Rgb8Image read_pnm(const std::filesystem::path& path) {
  auto f = open_file(path, "rb");
  char magic[2];
  if (std::fread(magic, 1, 2, f.get()) != 2 || magic[0] != 'P' || (magic[1] != '6' && magic[1] != '5')) {
    throw IoError("not a binary PPM/PGM: " + path.string());
  }
  const int channels = magic[1] == '6' ? 3 : 1;
  const int w = read_pnm_int(f.get());
  const int h = read_pnm_int(f.get());
  const int maxval = read_pnm_int(f.get());
  if (w < 1 || h < 1 || maxval != 255) throw IoError("unsupported PNM geometry: " + path.string());
  std::vector<std::uint8_t> raw(static_cast<std::size_t>(w) * h * channels);
  if (std::fread(raw.data(), 1, raw.size(), f.get()) != raw.size()) {
    throw IoError("truncated PNM: " + path.string());
  }
  Rgb8Image out(w, h);
  for (std::size_t i = 0; i < static_cast<std::size_t>(w) * h; ++i) {
    for (int c = 0; c < 3; ++c) out.rgb[3 * i + c] = raw[channels * i + (channels == 3 ? c : 0)];
  }
  return out;
}

void write_pnm(const std::uint8_t* data, int width, int height, int channels,
               const std::filesystem::path& path) {
  auto f = open_file(path, "wb");
  std::fprintf(f.get(), "P%d\n%d %d\n255\n", channels == 3 ? 6 : 5, width, height);
  const std::size_t n = static_cast<std::size_t>(width) * height * channels;
  if (std::fwrite(data, 1, n, f.get()) != n) throw IoError("short write: " + path.string());
}

}  // namespace

Rgb8Image read_image(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IoError("no such file: " + path.string());
  if (has_ext(path, ".png")) return read_png(path);
  if (has_ext(path, ".ppm") || has_ext(path, ".pgm") || has_ext(path, ".pnm")) return read_pnm(path);
  throw IoError("unsupported image format: " + path.string());
}

void write_image(const Rgb8Image& img, const std::filesystem::path& path) {
  if (has_ext(path, ".png")) {
    write_png(img.rgb.data(), img.width, img.height, 3, path);
  } else if (has_ext(path, ".ppm")) {
    write_pnm(img.rgb.data(), img.width, img.height, 3, path);
  } else {
    throw IoError("unsupported image format: " + path.string());
  }
}

void write_gray(const std::vector<std::uint8_t>& gray, int width, int height,
                const std::filesystem::path& path) {
  if (gray.size() != static_cast<std::size_t>(width) * height) throw IoError("mask size mismatch");
  if (has_ext(path, ".png")) {
    write_png(gray.data(), width, height, 1, path);
  } else if (has_ext(path, ".pgm")) {
    write_pnm(gray.data(), width, height, 1, path);
  } else {
    throw IoError("unsupported mask format: " + path.string());
  }
}

}  // namespace chemtok
