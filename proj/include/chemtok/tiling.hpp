#pragma once

#include <vector>

#include "chemtok/image.hpp"
#include "chemtok/tokens.hpp"

namespace chemtok {

struct TileBox {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;
};

/// Dynamic-resolution split: a rows x cols grid of square tiles over the
/// resized image, plus a whole-image thumbnail whenever the grid has more
/// than one cell. `tile_boxes` are in source-image pixel coordinates and
/// list the grid row-major, then the thumbnail.
struct TilingPlan {
  int grid_rows = 1;
  int grid_cols = 1;
  int tile_side = 448;
  bool include_thumbnail = false;
  std::vector<TileBox> tile_boxes;

  int grid_tiles() const { return grid_rows * grid_cols; }
  int total_tiles() const { return grid_tiles() + (include_thumbnail ? 1 : 0); }
};

/// Picks the grid whose cols/rows ratio is closest to width/height among
/// all grids with 1 <= rows*cols <= max_tiles. Candidates are visited in
/// ascending area, then ascending rows; an equally close candidate only
/// replaces the current pick when the image area exceeds half of the
/// candidate's tiled area.
TilingPlan plan_tiles(int width, int height, int max_tiles, int tile_side = 448);

/// Tiles in plan order, each tile_side x tile_side.
std::vector<Image> extract_tiles(const Image& image, const TilingPlan& plan);

/// Space-to-depth over an unreduced square token grid. Each factor x factor
/// block becomes one token whose features are the block's rows concatenated
/// in row-major order (block row outer, block column inner). The CLS token,
/// if present, is dropped.
TokenSet pixel_shuffle(const TokenSet& tokens, int factor);

}  // namespace chemtok
