#include "chemtok/tiling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "chemtok/errors.hpp"

namespace chemtok {

TilingPlan plan_tiles(int width, int height, int max_tiles, int tile_side) {
  if (width < 1 || height < 1) throw ConfigError("image dimensions must be positive");
  if (max_tiles < 1) throw ConfigError("max_tiles must be >= 1");
  if (tile_side < 1) throw ConfigError("tile_side must be >= 1");

  struct Grid {
    int rows;
    int cols;
  };
  std::vector<Grid> grids;
  for (int r = 1; r <= max_tiles; ++r) {
    for (int c = 1; r * c <= max_tiles; ++c) grids.push_back({r, c});
  }
  std::stable_sort(grids.begin(), grids.end(), [](const Grid& a, const Grid& b) {
    const int aa = a.rows * a.cols;
    const int ba = b.rows * b.cols;
    return aa != ba ? aa < ba : a.rows < b.rows;
  });

  const double aspect = static_cast<double>(width) / height;
  const double area = static_cast<double>(width) * height;
  const double tile_area = static_cast<double>(tile_side) * tile_side;
  Grid best{1, 1};
  double best_diff = std::abs(aspect - 1.0);
  for (const Grid& g : grids) {
    const double diff = std::abs(aspect - static_cast<double>(g.cols) / g.rows);
    if (diff < best_diff) {
      best = g;
      best_diff = diff;
    } else if (diff == best_diff && g.rows * g.cols > best.rows * best.cols &&
               area > 0.5 * tile_area * g.rows * g.cols) {
      best = g;
    }
  }

  TilingPlan plan;
  plan.grid_rows = best.rows;
  plan.grid_cols = best.cols;
  plan.tile_side = tile_side;
  plan.include_thumbnail = best.rows * best.cols > 1;
  const double sx = static_cast<double>(width) / best.cols;
  const double sy = static_cast<double>(height) / best.rows;
  for (int r = 0; r < best.rows; ++r) {
    for (int c = 0; c < best.cols; ++c) {
      const int x0 = static_cast<int>(std::lround(c * sx));
      const int y0 = static_cast<int>(std::lround(r * sy));
      const int x1 = static_cast<int>(std::lround((c + 1) * sx));
      const int y1 = static_cast<int>(std::lround((r + 1) * sy));
      plan.tile_boxes.push_back({x0, y0, x1 - x0, y1 - y0});
    }
  }
  if (plan.include_thumbnail) plan.tile_boxes.push_back({0, 0, width, height});
  return plan;
}

std::vector<Image> extract_tiles(const Image& image, const TilingPlan& plan) {
  const int side = plan.tile_side;
  const Image resized = resize_bilinear(image, side * plan.grid_cols, side * plan.grid_rows);
  std::vector<Image> tiles;
  tiles.reserve(plan.total_tiles());
  for (int r = 0; r < plan.grid_rows; ++r) {
    for (int c = 0; c < plan.grid_cols; ++c) {
      Image tile;
      for (const Plane& p : resized.planes) tile.planes.emplace_back(p.block(r * side, c * side, side, side));
      tiles.push_back(std::move(tile));
    }
  }
  if (plan.include_thumbnail) tiles.push_back(resize_bilinear(image, side, side));
  return tiles;
}

TokenSet pixel_shuffle(const TokenSet& tokens, int factor) {
  if (factor < 1) throw ShapeError("pixel_shuffle factor must be >= 1");
  const Eigen::Index first = tokens.first_patch();
  const Eigen::Index n = tokens.patch_count();
  // Only the untouched grid (every token one patch, in patch order) is accepted.
  bool grid = n == tokens.original_patches && tokens.discarded.empty();
  for (Eigen::Index i = 0; grid && i < n; ++i) {
    const auto& o = tokens.origins[first + i];
    grid = tokens.sizes(first + i) == 1 && o.size() == 1 && o[0] == i;
  }
  if (!grid) throw ShapeError("pixel_shuffle requires an unreduced token grid");
  const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
  if (static_cast<Eigen::Index>(side) * side != n) throw ShapeError("token count is not a perfect square");
  if (side % factor != 0) throw ShapeError("grid side not divisible by shuffle factor");

  const int out_side = side / factor;
  const Eigen::Index width = tokens.features.cols();
  TokenSet out;
  out.has_cls = false;
  out.original_patches = tokens.original_patches;
  out.features.resize(static_cast<Eigen::Index>(out_side) * out_side, width * factor * factor);
  out.sizes = SizeVector::Constant(out.features.rows(), factor * factor);
  out.origins.resize(out.features.rows());
  for (int r = 0; r < out_side; ++r) {
    for (int c = 0; c < out_side; ++c) {
      const Eigen::Index row = static_cast<Eigen::Index>(r) * out_side + c;
      Eigen::Index slot = 0;
      for (int dr = 0; dr < factor; ++dr) {
        for (int dc = 0; dc < factor; ++dc) {
          const int src = (r * factor + dr) * side + (c * factor + dc);
          out.features.block(row, slot * width, 1, width) = tokens.features.row(first + src);
          out.origins[row].push_back(src);
          ++slot;
        }
      }
      std::sort(out.origins[row].begin(), out.origins[row].end());
    }
  }
  return out;
}

}  // namespace chemtok
