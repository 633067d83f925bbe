#include "chemtok/molecule.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <utility>

#include "chemtok/errors.hpp"

namespace chemtok {

int Molecule::heavy_degree(int atom) const {
  int n = 0;
  for (int b : incident_[atom]) n += atoms[bonds[b].other(atom)].atomic_number != 1;
  return n;
}

std::optional<int> Molecule::bond_between(int a, int b) const {
  for (int bi : incident_[a]) {
    if (bonds[bi].other(a) == b) return bi;
  }
  return std::nullopt;
}

std::vector<int> Molecule::component_ids() const {
  std::vector<int> comp(atoms.size(), -1);
  int next = 0;
  std::vector<int> stack;
  for (int start = 0; start < num_atoms(); ++start) {
    if (comp[start] >= 0) continue;
    comp[start] = next;
    stack.push_back(start);
    while (!stack.empty()) {
      const int a = stack.back();
      stack.pop_back();
      for (int b : incident_[a]) {
        const int o = bonds[b].other(a);
        if (comp[o] < 0) {
          comp[o] = next;
          stack.push_back(o);
        }
      }
    }
    ++next;
  }
  return comp;
}

int Molecule::num_components() const {
  const auto ids = component_ids();
  return ids.empty() ? 0 : *std::max_element(ids.begin(), ids.end()) + 1;
}

std::vector<Molecule> Molecule::split_components() const {
  const auto ids = component_ids();
  const int n = ids.empty() ? 0 : *std::max_element(ids.begin(), ids.end()) + 1;
  std::vector<Molecule> out(n);
  std::vector<int> local(atoms.size());
  for (int a = 0; a < num_atoms(); ++a) {
    local[a] = out[ids[a]].num_atoms();
    out[ids[a]].atoms.push_back(atoms[a]);
  }
  for (const Bond& b : bonds) {
    Bond c = b;
    c.begin = local[b.begin];
    c.end = local[b.end];
    out[ids[b.begin]].bonds.push_back(c);
  }
  for (Molecule& m : out) {
    m.stereo_markers_seen = stereo_markers_seen;
    m.finalize();
  }
  return out;
}

void Molecule::finalize() {
  incident_.assign(atoms.size(), {});
  std::set<std::pair<int, int>> seen;
  for (int i = 0; i < num_bonds(); ++i) {
    const Bond& b = bonds[i];
    if (b.begin < 0 || b.end < 0 || b.begin >= num_atoms() || b.end >= num_atoms()) {
      throw Error("bond endpoint out of range");
    }
    if (b.begin == b.end) throw Error("bond from an atom to itself");
    if (!seen.emplace(std::minmax(b.begin, b.end)).second) throw Error("duplicate bond");
    incident_[b.begin].push_back(i);
    incident_[b.end].push_back(i);
  }

  // A bond is a ring bond iff it is not a bridge.
  std::vector<int> disc(atoms.size(), -1);
  std::vector<int> low(atoms.size(), 0);
  int timer = 0;
  for (Bond& b : bonds) b.in_ring = true;
  std::function<void(int, int)> dfs = [&](int a, int via) {
    disc[a] = low[a] = timer++;
    for (int bi : incident_[a]) {
      if (bi == via) continue;
      const int o = bonds[bi].other(a);
      if (disc[o] < 0) {
        dfs(o, bi);
        low[a] = std::min(low[a], low[o]);
        if (low[o] > disc[a]) bonds[bi].in_ring = false;
      } else {
        low[a] = std::min(low[a], disc[o]);
      }
    }
  };
  for (int a = 0; a < num_atoms(); ++a) {
    if (disc[a] < 0) dfs(a, -1);
  }
}

Molecule permute_atoms(const Molecule& mol, std::span<const int> perm) {
  if (static_cast<int>(perm.size()) != mol.num_atoms()) throw Error("permutation size mismatch");
  Molecule out;
  out.stereo_markers_seen = mol.stereo_markers_seen;
  out.atoms.resize(mol.atoms.size());
  for (int i = 0; i < mol.num_atoms(); ++i) out.atoms[perm[i]] = mol.atoms[i];
  for (const Bond& b : mol.bonds) {
    Bond c = b;
    c.begin = perm[b.begin];
    c.end = perm[b.end];
    out.bonds.push_back(c);
  }
  out.finalize();
  return out;
}

}  // namespace chemtok
