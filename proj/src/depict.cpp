#include "chemtok/depict.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>

#include "chemtok/errors.hpp"

namespace chemtok {

using Vec2 = Eigen::Vector2d;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kMinSeparation = 0.6;
constexpr double kBridgeBow = 0.25;
constexpr int kRepulsionIterations = 50;

double angle_of(const Vec2& v) { return std::atan2(v.y(), v.x()); }
Vec2 unit(double theta) { return {std::cos(theta), std::sin(theta)}; }

double wrap_pi(double a) {
  while (a <= -kPi) a += 2 * kPi;
  while (a > kPi) a -= 2 * kPi;
  return a;
}

/// Shortest cycle through every ring bond, each listed once in cycle order.
std::vector<std::vector<int>> smallest_rings(const Molecule& mol) {
  std::set<std::vector<int>> seen;
  std::vector<std::vector<int>> rings;
  for (int bi = 0; bi < mol.num_bonds(); ++bi) {
    const Bond& b = mol.bonds[bi];
    if (!b.in_ring) continue;
    std::vector<int> parent(mol.num_atoms(), -2);
    std::deque<int> q{b.begin};
    parent[b.begin] = -1;
    while (!q.empty() && parent[b.end] == -2) {
      const int a = q.front();
      q.pop_front();
      for (int bj : mol.incident(a)) {
        if (bj == bi) continue;
        const int o = mol.bonds[bj].other(a);
        if (parent[o] != -2) continue;
        parent[o] = a;
        q.push_back(o);
      }
    }
    if (parent[b.end] == -2) continue;
    std::vector<int> cycle;
    for (int a = b.end; a != -1; a = parent[a]) cycle.push_back(a);
    std::vector<int> key = cycle;
    std::sort(key.begin(), key.end());
    if (seen.insert(key).second) rings.push_back(std::move(cycle));
  }
  std::stable_sort(rings.begin(), rings.end(),
                   [](const auto& x, const auto& y) { return x.size() < y.size(); });
  return rings;
}

class LayoutBuilder {
 public:
  explicit LayoutBuilder(const Molecule& mol)
      : mol_(mol),
        pos_(mol.num_atoms(), Vec2::Zero()),
        placed_(mol.num_atoms(), 0),
        turn_(mol.num_atoms(), 1),
        ranks_(canonical_ranks(mol)),
        rings_(smallest_rings(mol)) {
    // Ring systems: rings that share an atom.
    std::vector<int> parent(rings_.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    std::map<int, int> first_ring_of_atom;
    for (std::size_t r = 0; r < rings_.size(); ++r) {
      for (int a : rings_[r]) {
        const auto [it, inserted] = first_ring_of_atom.emplace(a, static_cast<int>(r));
        if (!inserted) parent[find(static_cast<int>(r))] = find(it->second);
      }
    }
    std::map<int, int> system_index;
    system_of_.assign(mol.num_atoms(), -1);
    for (std::size_t r = 0; r < rings_.size(); ++r) {
      const int root = find(static_cast<int>(r));
      const auto [it, inserted] = system_index.emplace(root, static_cast<int>(systems_.size()));
      if (inserted) systems_.emplace_back();
      systems_[it->second].push_back(static_cast<int>(r));
      for (int a : rings_[r]) system_of_[a] = it->second;
    }
  }

  Coords run() {
    const int n = mol_.num_atoms();
    if (n == 0) return {};
    const int root = static_cast<int>(std::min_element(ranks_.begin(), ranks_.end()) - ranks_.begin());
    std::deque<int> queue;
    place(root, Vec2::Zero());
    if (system_of_[root] >= 0) {
      enqueue(queue, place_system(system_of_[root], root, Vec2(1, 0)));
    }
    queue.push_front(root);

    while (!queue.empty()) {
      const int a = queue.front();
      queue.pop_front();
      std::vector<int> todo;
      std::vector<double> dirs;
      for (int bi : mol_.incident(a)) {
        const int o = mol_.bonds[bi].other(a);
        if (placed_[o]) {
          dirs.push_back(angle_of(pos_[o] - pos_[a]));
        } else {
          todo.push_back(o);
        }
      }
      if (todo.empty()) continue;
      std::sort(todo.begin(), todo.end(), [&](int x, int y) { return ranks_[x] < ranks_[y]; });
      const std::vector<double> angles = child_angles(a, dirs, static_cast<int>(todo.size()));
      for (std::size_t i = 0; i < todo.size(); ++i) {
        const int x = todo[i];
        if (placed_[x]) continue;
        place(x, pos_[a] + unit(angles[i]));
        turn_[x] = dirs.size() == 1 && todo.size() == 1 ? -turn_[a] : 1;
        std::vector<int> fresh{x};
        if (system_of_[x] >= 0) {
          auto more = place_system(system_of_[x], x, unit(angles[i]));
          fresh.insert(fresh.end(), more.begin(), more.end());
        }
        enqueue(queue, fresh);
      }
    }
    repel();
    return pos_;
  }

 private:
  void place(int a, const Vec2& p) {
    pos_[a] = p;
    placed_[a] = 1;
  }

  void enqueue(std::deque<int>& q, std::vector<int> atoms) {
    std::sort(atoms.begin(), atoms.end(), [&](int x, int y) { return ranks_[x] < ranks_[y]; });
    for (int a : atoms) q.push_back(a);
  }

  std::vector<double> child_angles(int a, std::vector<double> dirs, int k) const {
    std::vector<double> out;
    if (dirs.empty()) {
      if (k == 2) return {0.0, 2 * kPi / 3};
      for (int i = 0; i < k; ++i) out.push_back(2 * kPi * i / k);
      return out;
    }
    if (dirs.size() == 1 && k == 1) return {dirs[0] + turn_[a] * 2 * kPi / 3};
    std::sort(dirs.begin(), dirs.end());
    double best_start = dirs.back();
    double best_gap = dirs.front() + 2 * kPi - dirs.back();
    for (std::size_t i = 1; i < dirs.size(); ++i) {
      if (dirs[i] - dirs[i - 1] > best_gap) {
        best_gap = dirs[i] - dirs[i - 1];
        best_start = dirs[i - 1];
      }
    }
    for (int i = 0; i < k; ++i) out.push_back(best_start + best_gap * (i + 1) / (k + 1));
    return out;
  }

  /// Regular polygon through `anchor`, centred along `outward` from it.
  std::vector<int> polygon_from_anchor(const std::vector<int>& ring, int anchor, Vec2 outward) {
    const int m = static_cast<int>(ring.size());
    if (outward.norm() < 1e-9) outward = Vec2(1, 0);
    outward.normalize();
    const double radius = 1.0 / (2.0 * std::sin(kPi / m));
    const Vec2 center = pos_[anchor] + outward * radius;
    const int at = static_cast<int>(std::find(ring.begin(), ring.end(), anchor) - ring.begin());
    std::vector<int> cyc(m);
    const bool reverse = ranks_[ring[(at + m - 1) % m]] < ranks_[ring[(at + 1) % m]];
    for (int k = 0; k < m; ++k) cyc[k] = ring[(at + (reverse ? m - k : k)) % m];
    const double theta0 = angle_of(pos_[anchor] - center);
    std::vector<int> fresh;
    for (int k = 1; k < m; ++k) {
      if (placed_[cyc[k]]) continue;
      place(cyc[k], center + radius * unit(theta0 + 2 * kPi * k / m));
      fresh.push_back(cyc[k]);
    }
    return fresh;
  }

  Vec2 centroid_excluding(int system, const std::vector<int>& exclude) const {
    Vec2 sum = Vec2::Zero();
    int count = 0;
    for (int a = 0; a < mol_.num_atoms(); ++a) {
      if (!placed_[a] || system_of_[a] != system) continue;
      if (std::find(exclude.begin(), exclude.end(), a) != exclude.end()) continue;
      sum += pos_[a];
      ++count;
    }
    return count ? Vec2(sum / count) : Vec2(Vec2::Constant(std::nan("")));
  }

  std::vector<int> fuse(const std::vector<int>& ring, int system) {
    const int m = static_cast<int>(ring.size());
    int start = 0;
    while (!(placed_[ring[start]] && !placed_[ring[(start + m - 1) % m]])) ++start;
    std::vector<int> cyc(m);
    for (int k = 0; k < m; ++k) cyc[k] = ring[(start + k) % m];
    int run = 0;
    while (run < m && placed_[cyc[run]]) ++run;

    if (run == 1) {
      const int a = cyc[0];
      Vec2 away = Vec2::Zero();
      for (int bi : mol_.incident(a)) {
        const int o = mol_.bonds[bi].other(a);
        if (placed_[o]) away += pos_[a] - pos_[o];
      }
      return polygon_from_anchor(ring, a, away);
    }

    const int p = cyc[run - 2];
    const int q = cyc[run - 1];
    const Vec2 ref = centroid_excluding(system, {p, q});
    const Vec2 mid = (pos_[p] + pos_[q]) / 2;
    const Vec2 edge = pos_[q] - pos_[p];
    Vec2 normal(-edge.y(), edge.x());
    normal.normalize();
    std::vector<int> fresh;
    if (run == 2) {
      const double apothem = 1.0 / (2.0 * std::tan(kPi / m));
      Vec2 center = mid + normal * apothem;
      if (!ref.hasNaN() && (mid - normal * apothem - ref).norm() > (center - ref).norm()) {
        center = mid - normal * apothem;
      }
      const double radius = 1.0 / (2.0 * std::sin(kPi / m));
      const double tq = angle_of(pos_[q] - center);
      const double step = wrap_pi(tq - angle_of(pos_[p] - center));
      for (int k = 2; k < m; ++k) {
        place(cyc[k], center + radius * unit(tq + step * (k - 1)));
        fresh.push_back(cyc[k]);
      }
      return fresh;
    }
    // Bridged: spread the remaining atoms between the run's ends, bowed outward.
    const int first = cyc[0];
    const Vec2 a = pos_[q];
    const Vec2 b = pos_[first];
    Vec2 bow(-(b - a).y(), (b - a).x());
    if (bow.norm() > 1e-9) bow.normalize();
    if (!ref.hasNaN() && ((a + b) / 2 + bow - ref).norm() < ((a + b) / 2 - bow - ref).norm()) bow = -bow;
    const int rest = m - run;
    for (int k = 0; k < rest; ++k) {
      const double t = static_cast<double>(k + 1) / (rest + 1);
      place(cyc[run + k], a + t * (b - a) + bow * kBridgeBow);
      fresh.push_back(cyc[run + k]);
    }
    return fresh;
  }

  std::vector<int> place_system(int system, int anchor, const Vec2& outward) {
    std::vector<int> fresh;
    const auto& members = systems_[system];
    for (int r : members) {
      const auto& ring = rings_[r];
      if (std::find(ring.begin(), ring.end(), anchor) == ring.end()) continue;
      fresh = polygon_from_anchor(ring, anchor, outward);
      break;
    }
    bool progress = true;
    while (progress) {
      progress = false;
      for (int r : members) {
        const auto& ring = rings_[r];
        const int placed = static_cast<int>(std::count_if(ring.begin(), ring.end(), [&](int a) { return placed_[a]; }));
        if (placed == static_cast<int>(ring.size()) || placed == 0) continue;
        auto more = fuse(ring, system);
        fresh.insert(fresh.end(), more.begin(), more.end());
        progress = true;
        break;
      }
    }
    return fresh;
  }

  void repel() {
    const int n = mol_.num_atoms();
    for (int it = 0; it < kRepulsionIterations; ++it) {
      bool moved = false;
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
          if (mol_.bond_between(i, j)) continue;
          Vec2 d = pos_[j] - pos_[i];
          const double dist = d.norm();
          if (dist >= kMinSeparation) continue;
          d = dist < 1e-9 ? unit(static_cast<double>(i + j)) : Vec2(d / dist);
          const double shift = (kMinSeparation - dist) / 2;
          pos_[i] -= d * shift;
          pos_[j] += d * shift;
          moved = true;
        }
      }
      if (!moved) break;
    }
  }

  const Molecule& mol_;
  Coords pos_;
  std::vector<char> placed_;
  std::vector<int> turn_;
  std::vector<int> ranks_;
  std::vector<std::vector<int>> rings_;
  std::vector<std::vector<int>> systems_;
  std::vector<int> system_of_;
};

}  // namespace

Coords layout_2d(const Molecule& mol) {
  int heavy = 0;
  for (const Atom& a : mol.atoms) heavy += a.atomic_number != 1;
  if (heavy > kMaxLayoutAtoms) {
    throw UnsupportedInput("layout supports at most " + std::to_string(kMaxLayoutAtoms) + " heavy atoms, got " +
                           std::to_string(heavy));
  }
  if (mol.num_atoms() > 0 && mol.num_components() != 1) {
    throw UnsupportedInput("layout needs a connected molecule");
  }
  return LayoutBuilder(mol).run();
}

// ---------------------------------------------------------------------------
// Drawing

namespace {

struct Stroke {
  Vec2 a;
  Vec2 b;
};

/// Geometry of one drawable item: a set of round-capped segments.
struct Item {
  std::vector<Stroke> strokes;
  double width = 1.0;

  void line(const Vec2& a, const Vec2& b) { strokes.push_back({a, b}); }
  void polyline(const std::vector<Vec2>& pts) {
    for (std::size_t i = 1; i < pts.size(); ++i) line(pts[i - 1], pts[i]);
  }
  void circle(const Vec2& c, double r) {
    const int segments = std::max(12, static_cast<int>(r * 0.8));
    std::vector<Vec2> pts;
    for (int i = 0; i <= segments; ++i) pts.push_back(c + r * unit(2 * kPi * i / segments));
    polyline(pts);
  }
  void translate(const Vec2& d) {
    for (Stroke& s : strokes) {
      s.a += d;
      s.b += d;
    }
  }
  /// Pixel-space extent including half the stroke width plus the
  /// anti-aliasing fringe.
  Box bounds() const {
    Box box{1e300, 1e300, -1e300, -1e300};
    const double r = width / 2 + 0.5;
    for (const Stroke& s : strokes) {
      box.x0 = std::min({box.x0, s.a.x() - r, s.b.x() - r});
      box.y0 = std::min({box.y0, s.a.y() - r, s.b.y() - r});
      box.x1 = std::max({box.x1, s.a.x() + r, s.b.x() + r});
      box.y1 = std::max({box.y1, s.a.y() + r, s.b.y() + r});
    }
    return box;
  }
};

class Painter {
 public:
  Painter(int w, int h) : w_(w), h_(h), alpha_(static_cast<std::size_t>(w) * h, 0.0f) {}

  void draw(const Item& item) {
    const double half = item.width / 2;
    for (const Stroke& s : item.strokes) segment(s.a, s.b, half);
  }

  Depiction finish(const DepictStyle& style) const {
    Depiction d;
    d.style = style;
    d.image = Rgb8Image(w_, h_, style.background[0], style.background[1], style.background[2]);
    d.mask.assign(alpha_.size(), 0);
    for (std::size_t i = 0; i < alpha_.size(); ++i) {
      const float a = alpha_[i];
      if (a <= 0.0f) continue;
      for (int c = 0; c < 3; ++c) {
        const double v = style.background[c] + (style.line[c] - style.background[c]) * static_cast<double>(a);
        d.image.rgb[3 * i + c] = static_cast<std::uint8_t>(std::lround(v));
        // Faint edges that round back to the background are not marked.
        if (d.image.rgb[3 * i + c] != style.background[c]) d.mask[i] = 1;
      }
    }
    return d;
  }

 private:
  void segment(const Vec2& a, const Vec2& b, double half) {
    const double reach = half + 0.5;
    const int x0 = std::max(0, static_cast<int>(std::floor(std::min(a.x(), b.x()) - reach)));
    const int x1 = std::min(w_ - 1, static_cast<int>(std::ceil(std::max(a.x(), b.x()) + reach)));
    const int y0 = std::max(0, static_cast<int>(std::floor(std::min(a.y(), b.y()) - reach)));
    const int y1 = std::min(h_ - 1, static_cast<int>(std::ceil(std::max(a.y(), b.y()) + reach)));
    const Vec2 ab = b - a;
    const double len2 = ab.squaredNorm();
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const Vec2 p(x + 0.5, y + 0.5);
        const double t = len2 > 0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
        const double dist = (p - (a + t * ab)).norm();
        const float cover = static_cast<float>(std::clamp(half + 0.5 - dist, 0.0, 1.0));
        float& dst = alpha_[static_cast<std::size_t>(y) * w_ + x];
        dst = std::max(dst, cover);
      }
    }
  }

  int w_;
  int h_;
  std::vector<float> alpha_;
};

// Stroke font on a cell 0.6 wide and 1.0 tall, y pointing down.
using Glyph = std::vector<std::vector<Vec2>>;

const Glyph& glyph(char c) {
  static const std::map<char, Glyph> font = {
      {'B', {{{0, 0}, {0, 1}},
             {{0, 0}, {0.4, 0}, {0.55, 0.12}, {0.55, 0.38}, {0.4, 0.5}, {0, 0.5}},
             {{0, 0.5}, {0.45, 0.5}, {0.6, 0.62}, {0.6, 0.88}, {0.45, 1}, {0, 1}}}},
      {'C', {{{0.6, 0.15}, {0.45, 0}, {0.15, 0}, {0, 0.2}, {0, 0.8}, {0.15, 1}, {0.45, 1}, {0.6, 0.85}}}},
      {'F', {{{0.6, 0}, {0, 0}, {0, 1}}, {{0, 0.5}, {0.45, 0.5}}}},
      {'H', {{{0, 0}, {0, 1}}, {{0.6, 0}, {0.6, 1}}, {{0, 0.5}, {0.6, 0.5}}}},
      {'I', {{{0.1, 0}, {0.5, 0}}, {{0.3, 0}, {0.3, 1}}, {{0.1, 1}, {0.5, 1}}}},
      {'N', {{{0, 1}, {0, 0}, {0.6, 1}, {0.6, 0}}}},
      {'O', {{{0.15, 0}, {0.45, 0}, {0.6, 0.2}, {0.6, 0.8}, {0.45, 1}, {0.15, 1}, {0, 0.8}, {0, 0.2}, {0.15, 0}}}},
      {'P', {{{0, 1}, {0, 0}, {0.45, 0}, {0.6, 0.15}, {0.6, 0.35}, {0.45, 0.5}, {0, 0.5}}}},
      {'S',
       {{{0.6, 0.1}, {0.45, 0}, {0.15, 0}, {0, 0.15}, {0, 0.35}, {0.15, 0.5}, {0.45, 0.5}, {0.6, 0.65}, {0.6, 0.85},
         {0.45, 1}, {0.15, 1}, {0, 0.9}}}},
      {'l', {{{0.3, 0}, {0.3, 1}}}},
      {'r', {{{0.1, 0.4}, {0.1, 1}}, {{0.1, 0.6}, {0.3, 0.4}, {0.55, 0.4}}}},
      {'e', {{{0, 0.7}, {0.6, 0.7}, {0.55, 0.5}, {0.3, 0.4}, {0.05, 0.5}, {0, 0.75}, {0.1, 0.95}, {0.35, 1}, {0.6, 0.9}}}},
      {'2', {{{0, 0.15}, {0.15, 0}, {0.45, 0}, {0.6, 0.15}, {0.6, 0.35}, {0, 1}, {0.6, 1}}}},
      {'3',
       {{{0, 0.1}, {0.15, 0}, {0.45, 0}, {0.6, 0.15}, {0.6, 0.35}, {0.45, 0.5}, {0.2, 0.5}},
        {{0.45, 0.5}, {0.6, 0.65}, {0.6, 0.85}, {0.45, 1}, {0.15, 1}, {0, 0.9}}}},
      {'4', {{{0.45, 1}, {0.45, 0}, {0, 0.7}, {0.6, 0.7}}}},
      {'+', {{{0.3, 0.2}, {0.3, 0.8}}, {{0, 0.5}, {0.6, 0.5}}}},
      {'-', {{{0.1, 0.5}, {0.5, 0.5}}}},
  };
  static const Glyph box = {{{0, 0}, {0.6, 0}, {0.6, 1}, {0, 1}, {0, 0}}};
  const auto it = font.find(c);
  return it == font.end() ? box : it->second;
}

/// Draws `text` with its first character centred on `at`.
void draw_text(Item& item, const std::string& text, const Vec2& at, double height) {
  const double advance = 0.75 * height;
  Vec2 origin = at - Vec2(0.3 * height, 0.5 * height);
  for (char c : text) {
    for (const auto& line : glyph(c)) {
      std::vector<Vec2> pts;
      for (const Vec2& p : line) pts.push_back(origin + p * height);
      item.polyline(pts);
    }
    origin.x() += advance;
  }
}

std::string atom_label(const Molecule& mol, int a) {
  const Atom& at = mol.atoms[a];
  const bool show = at.atomic_number != 6 || at.formal_charge != 0 || at.isotope || mol.degree(a) == 0;
  if (!show) return {};
  std::string s = at.symbol;
  if (at.hydrogens > 0) {
    s += 'H';
    if (at.hydrogens > 1) s += std::to_string(at.hydrogens);
  }
  if (at.formal_charge > 0) s += std::string(std::min(at.formal_charge, 3), '+');
  if (at.formal_charge < 0) s += std::string(std::min(-at.formal_charge, 3), '-');
  return s;
}

/// Strokes of a molecule whose atom coordinates are already in pixels.
Item molecule_item(const Molecule& mol, const Coords& px, double bond_px, const DepictStyle& style) {
  Item item;
  item.width = style.stroke_width;
  const double text_h = 0.45 * bond_px * style.font_scale;
  std::vector<std::string> labels(mol.num_atoms());
  for (int a = 0; a < mol.num_atoms(); ++a) labels[a] = atom_label(mol, a);

  for (const Bond& b : mol.bonds) {
    Vec2 p = px[b.begin];
    Vec2 q = px[b.end];
    const Vec2 dir = (q - p).normalized();
    if (!labels[b.begin].empty()) p += dir * 0.6 * text_h;
    if (!labels[b.end].empty()) q -= dir * 0.6 * text_h;
    const Vec2 normal(-dir.y(), dir.x());
    if (b.aromatic || b.order == 1) {
      item.line(p, q);
    } else if (b.order == 2) {
      const double off = 0.09 * bond_px;
      item.line(p + normal * off, q + normal * off);
      item.line(p - normal * off, q - normal * off);
    } else {
      const double off = 0.12 * bond_px;
      item.line(p, q);
      item.line(p + normal * off, q + normal * off);
      item.line(p - normal * off, q - normal * off);
    }
  }
  for (const auto& ring : smallest_rings(mol)) {
    bool aromatic = true;
    for (std::size_t i = 0; i < ring.size() && aromatic; ++i) {
      const auto bi = mol.bond_between(ring[i], ring[(i + 1) % ring.size()]);
      aromatic = bi && mol.bonds[*bi].aromatic;
    }
    if (!aromatic) continue;
    Vec2 c = Vec2::Zero();
    for (int a : ring) c += px[a];
    c /= static_cast<double>(ring.size());
    const double inradius = bond_px / (2.0 * std::tan(kPi / ring.size()));
    item.circle(c, 0.55 * inradius);
  }
  for (int a = 0; a < mol.num_atoms(); ++a) {
    if (!labels[a].empty()) draw_text(item, labels[a], px[a], text_h);
  }
  return item;
}

/// Connected components laid out left to right, rotated by `theta`, in
/// bond-length units with y pointing down.
Coords layout_components(const Molecule& mol, double theta, std::vector<Molecule>& parts_out,
                         std::vector<int>& atom_map) {
  parts_out = mol.split_components();
  const Eigen::Rotation2Dd rot(theta);
  Coords all;
  atom_map.clear();
  double cursor = 0.0;
  for (const Molecule& part : parts_out) {
    Coords c = layout_2d(part);
    double xmin = 1e300, xmax = -1e300;
    for (Vec2& p : c) {
      p = rot * p;
      p.y() = -p.y();
      xmin = std::min(xmin, p.x());
      xmax = std::max(xmax, p.x());
    }
    for (Vec2& p : c) p.x() += cursor - xmin;
    cursor += (xmax - xmin) + 1.5;
    all.insert(all.end(), c.begin(), c.end());
  }
  return all;
}

/// Single graph holding the components in the same order as `layout_components`.
Molecule joined(const std::vector<Molecule>& parts) {
  Molecule out;
  for (const Molecule& p : parts) {
    const int base = out.num_atoms();
    out.atoms.insert(out.atoms.end(), p.atoms.begin(), p.atoms.end());
    for (Bond b : p.bonds) {
      b.begin += base;
      b.end += base;
      out.bonds.push_back(b);
    }
  }
  out.finalize();
  return out;
}

struct Extent {
  double x0, y0, x1, y1;
};

Extent extent_of(const Coords& c) {
  Extent e{1e300, 1e300, -1e300, -1e300};
  for (const Vec2& p : c) {
    e.x0 = std::min(e.x0, p.x());
    e.y0 = std::min(e.y0, p.y());
    e.x1 = std::max(e.x1, p.x());
    e.y1 = std::max(e.y1, p.y());
  }
  return e;
}

double draw_angle(std::mt19937_64& rng) { return 2 * kPi * (static_cast<double>(rng() >> 11) * 0x1.0p-53); }

/// Molecule strokes scaled to `bond_px`, centred on the origin.
Item scaled_molecule(const Molecule& mol, double theta, double bond_px, const DepictStyle& style) {
  std::vector<Molecule> parts;
  std::vector<int> map;
  Coords c = layout_components(mol, theta, parts, map);
  const Molecule flat = joined(parts);
  const Extent e = extent_of(c);
  const Vec2 mid((e.x0 + e.x1) / 2, (e.y0 + e.y1) / 2);
  for (Vec2& p : c) p = (p - mid) * bond_px;
  return molecule_item(flat, c, bond_px, style);
}

}  // namespace

std::size_t Depiction::painted_pixels() const {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

double Depiction::coverage() const {
  return mask.empty() ? 0.0 : static_cast<double>(painted_pixels()) / mask.size();
}

std::optional<std::array<int, 4>> Depiction::mask_bounds() const {
  int x0 = width(), y0 = height(), x1 = -1, y1 = -1;
  for (int y = 0; y < height(); ++y) {
    for (int x = 0; x < width(); ++x) {
      if (!mask[static_cast<std::size_t>(y) * width() + x]) continue;
      x0 = std::min(x0, x);
      y0 = std::min(y0, y);
      x1 = std::max(x1, x);
      y1 = std::max(y1, y);
    }
  }
  if (x1 < 0) return std::nullopt;
  return std::array<int, 4>{x0, y0, x1 + 1, y1 + 1};
}

int Depiction::count(Placement::Kind kind) const {
  return static_cast<int>(
      std::count_if(placements.begin(), placements.end(), [&](const Placement& p) { return p.kind == kind; }));
}

DepictStyle random_style(std::uint64_t seed, int canvas_side) {
  static constexpr std::array<std::pair<Rgb, Rgb>, 4> kPalettes{{
      {{255, 255, 255}, {0, 0, 0}},
      {{255, 255, 255}, {20, 40, 140}},
      {{245, 245, 240}, {40, 40, 40}},
      {{255, 252, 235}, {120, 20, 20}},
  }};
  std::mt19937_64 rng(seed ^ 0xD1B54A32D192ED03ull);
  const auto u = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  DepictStyle s;
  s.canvas_side = canvas_side;
  s.stroke_width = 1.0 + 3.0 * u();
  s.font_scale = 0.8 + 0.4 * u();
  const auto& [bg, fg] = kPalettes[rng() % kPalettes.size()];
  s.background = bg;
  s.line = fg;
  return s;
}

Depiction render(const Molecule& mol, const DepictStyle& style, std::uint64_t seed) {
  const int side = style.canvas_side;
  Painter painter(side, side);
  Depiction out;
  if (mol.num_atoms() > 0) {
    std::mt19937_64 rng(seed);
    const double theta = draw_angle(rng);
    std::vector<Molecule> parts;
    std::vector<int> map;
    Coords c = layout_components(mol, theta, parts, map);
    const Extent e = extent_of(c);
    const double usable = side * (1.0 - 2.0 * kDepictMargin);
    const double w = e.x1 - e.x0;
    const double h = e.y1 - e.y0;
    double scale = 0.25 * side;
    if (w > 1e-9) scale = std::min(scale, usable / w);
    if (h > 1e-9) scale = std::min(scale, usable / h);
    const Vec2 mid((e.x0 + e.x1) / 2, (e.y0 + e.y1) / 2);
    for (Vec2& p : c) p = (p - mid) * scale + Vec2(side / 2.0, side / 2.0);
    const Item item = molecule_item(joined(parts), c, scale, style);
    painter.draw(item);
    out = painter.finish(style);
    out.placements.push_back({Placement::Kind::molecule, item.bounds()});
    return out;
  }
  return painter.finish(style);
}

Depiction render_reaction(const ReactionRecord& rxn, const DepictStyle& style, std::uint64_t seed) {
  using G = ReactionGeometry;
  const double height = style.canvas_side;
  const double bond_px = G::bond_length * height;
  const double gap = G::gap * height;
  const double mid_y = height / 2;
  std::mt19937_64 rng(seed);

  struct Placed {
    Item item;
    Placement::Kind kind;
  };
  std::vector<Placed> items;
  double cursor = kDepictMargin * height;
  auto push = [&](Item item, Placement::Kind kind) {
    const Box b = item.bounds();
    item.translate(Vec2(cursor - b.x0, 0));
    cursor += b.width() + gap;
    items.push_back({std::move(item), kind});
  };
  auto molecule = [&](const Molecule& m, double scale) {
    Item it = scaled_molecule(m, draw_angle(rng), scale, style);
    it.translate(Vec2(0, mid_y));
    return it;
  };
  auto plus = [&] {
    Item it;
    it.width = style.stroke_width;
    const double s = G::plus_size * height / 2;
    it.line(Vec2(0, mid_y - s), Vec2(0, mid_y + s));
    it.line(Vec2(-s, mid_y), Vec2(s, mid_y));
    return it;
  };

  for (std::size_t i = 0; i < rxn.reactants.size(); ++i) {
    if (i > 0) push(plus(), Placement::Kind::plus);
    push(molecule(rxn.reactants[i], bond_px), Placement::Kind::molecule);
  }

  // Arrow with agents stacked side by side above it.
  std::vector<Item> agents;
  double agents_width = 0.0;
  for (const Molecule& m : rxn.agents) {
    agents.push_back(molecule(m, bond_px * G::agent_scale));
    agents_width += agents.back().bounds().width() + (agents.size() > 1 ? gap : 0.0);
  }
  const double arrow_len = std::max(G::min_arrow * height, agents_width + 2 * gap);
  Item arrow;
  arrow.width = style.stroke_width;
  const double head = 0.04 * height;
  arrow.line(Vec2(0, mid_y), Vec2(arrow_len, mid_y));
  arrow.line(Vec2(arrow_len, mid_y), Vec2(arrow_len - head, mid_y - 0.6 * head));
  arrow.line(Vec2(arrow_len, mid_y), Vec2(arrow_len - head, mid_y + 0.6 * head));
  const double arrow_x = cursor;
  push(arrow, Placement::Kind::arrow);
  double ax = arrow_x + (arrow_len - agents_width) / 2;
  for (Item& it : agents) {
    const Box b = it.bounds();
    it.translate(Vec2(ax - b.x0, (mid_y - 0.04 * height) - b.y1));
    ax += b.width() + gap;
    items.push_back({std::move(it), Placement::Kind::molecule});
  }

  for (std::size_t i = 0; i < rxn.products.size(); ++i) {
    if (i > 0) push(plus(), Placement::Kind::plus);
    push(molecule(rxn.products[i], bond_px), Placement::Kind::molecule);
  }

  const int width = static_cast<int>(std::ceil(cursor - gap + kDepictMargin * height));
  Painter painter(std::max(width, 1), style.canvas_side);
  for (const Placed& p : items) painter.draw(p.item);
  Depiction out = painter.finish(style);
  for (const Placed& p : items) out.placements.push_back({p.kind, p.item.bounds()});
  return out;
}

}  // namespace chemtok
