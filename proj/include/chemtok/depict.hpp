#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "chemtok/image.hpp"
#include "chemtok/molecule.hpp"
#include "chemtok/smiles.hpp"

namespace chemtok {

using Coords = std::vector<Eigen::Vector2d>;

inline constexpr int kMaxLayoutAtoms = 64;

/// Unit-bond-length 2D coordinates for a connected molecule.
///
/// Atoms are placed breadth-first from the lowest canonical rank. A ring
/// system is placed as soon as one of its atoms is reached: the first ring
/// as a regular polygon, fused rings as polygons sharing the placed edge.
/// Other unplaced neighbours are spread evenly over the widest free angular
/// gap around their placed neighbour, except that a lone continuation of a
/// chain turns by 60 degrees (120 degree bond angle), alternating sides.
/// A final fixed-iteration pass pushes apart non-bonded atoms closer than
/// 0.6. Throws UnsupportedInput for more than 64 heavy atoms or a
/// disconnected graph.
Coords layout_2d(const Molecule& mol);

using Rgb = std::array<std::uint8_t, 3>;

struct DepictStyle {
  double stroke_width = 2.5;  // px
  double font_scale = 1.0;
  Rgb background{255, 255, 255};
  Rgb line{0, 0, 0};
  int canvas_side = 448;  // px; reactions use it as the canvas height
};

/// Stroke width in [1,4] px, font scale in [0.8,1.2] and one of four
/// palettes, all drawn from `seed`.
DepictStyle random_style(std::uint64_t seed, int canvas_side = 448);

struct Box {
  double x0 = 0;
  double y0 = 0;
  double x1 = 0;
  double y1 = 0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
};

struct Placement {
  enum class Kind { molecule, plus, arrow };
  Kind kind;
  Box box;  // extent of every primitive drawn for the item, strokes included
};

struct Depiction {
  Rgb8Image image;
  std::vector<std::uint8_t> mask;  // 1 where the pixel differs from the background
  DepictStyle style;
  std::vector<Placement> placements;

  int width() const { return image.width; }
  int height() const { return image.height; }
  std::size_t painted_pixels() const;
  double coverage() const;
  /// Integer pixel bounds [x0, x1) x [y0, y1) of the mask, if any.
  std::optional<std::array<int, 4>> mask_bounds() const;
  int count(Placement::Kind kind) const;
};

/// Fraction of canvas side left empty on each edge.
inline constexpr double kDepictMargin = 0.10;

/// Square canvas. The layout is rotated by an angle drawn from `seed`, then
/// scaled to fit inside the margins with the bond length capped at a
/// quarter of the canvas. Disconnected inputs are laid out side by side.
Depiction render(const Molecule& mol, const DepictStyle& style, std::uint64_t seed);

/// Reaction layout constants, in units of the canvas height.
struct ReactionGeometry {
  static constexpr double bond_length = 1.0 / 8.0;  // molecule bond length
  static constexpr double agent_scale = 0.5;        // agents above the arrow
  static constexpr double gap = 0.05;               // between neighbouring items
  static constexpr double plus_size = 0.08;
  static constexpr double min_arrow = 0.30;
};

/// Horizontal strip: reactants joined by '+', an arrow with the agents drawn
/// above it at half scale, then products joined by '+'. The canvas is
/// canvas_side tall and as wide as the items need plus the margin.
Depiction render_reaction(const ReactionRecord& rxn, const DepictStyle& style, std::uint64_t seed);

}  // namespace chemtok
