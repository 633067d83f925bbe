#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace chemtok {

struct Atom {
  std::string symbol;  // element symbol, capitalized ("C", "Cl")
  int atomic_number = 0;
  int formal_charge = 0;
  std::optional<int> isotope;
  bool aromatic = false;
  int hydrogens = 0;  // implicit + bracket H count
};

struct Bond {
  int begin = 0;
  int end = 0;
  int order = 1;  // 1, 2 or 3; aromatic bonds keep 1
  bool aromatic = false;
  bool in_ring = false;

  int other(int atom) const { return atom == begin ? end : begin; }
};

/// Atom/bond graph. Adjacency lists are rebuilt by `finalize`, which also
/// marks ring bonds; every mutating producer calls it before returning.
class Molecule {
 public:
  std::vector<Atom> atoms;
  std::vector<Bond> bonds;
  bool stereo_markers_seen = false;

  int num_atoms() const { return static_cast<int>(atoms.size()); }
  int num_bonds() const { return static_cast<int>(bonds.size()); }

  /// Bond indices incident to `atom`.
  std::span<const int> incident(int atom) const { return incident_[atom]; }
  int degree(int atom) const { return static_cast<int>(incident_[atom].size()); }
  /// Neighbours that are not hydrogen atoms.
  int heavy_degree(int atom) const;
  std::optional<int> bond_between(int a, int b) const;

  /// Component id per atom, numbered in order of first atom.
  std::vector<int> component_ids() const;
  int num_components() const;
  std::vector<Molecule> split_components() const;

  /// Rebuilds adjacency, validates bond endpoints and duplicates, marks ring bonds.
  void finalize();

 private:
  std::vector<std::vector<int>> incident_;
};

/// Copy of `mol` with atom i moved to position perm[i].
Molecule permute_atoms(const Molecule& mol, std::span<const int> perm);

}  // namespace chemtok
