#include "chemtok/descriptors.hpp"

#include "chemtok/elements.hpp"

namespace chemtok {

Descriptors descriptors(const Molecule& mol) {
  const double h_mass = element_by_number(1).mass;
  Descriptors d;
  for (int a = 0; a < mol.num_atoms(); ++a) {
    const Atom& at = mol.atoms[a];
    d.molecular_weight += element_by_number(at.atomic_number).mass + at.hydrogens * h_mass;
    if (at.atomic_number == 7 || at.atomic_number == 8) {
      ++d.hbond_acceptors;
      bool has_h = at.hydrogens > 0;
      for (int bi : mol.incident(a)) has_h |= mol.atoms[mol.bonds[bi].other(a)].atomic_number == 1;
      if (has_h) ++d.hbond_donors;
    }
  }
  for (const Bond& b : mol.bonds) {
    if (b.aromatic || b.order != 1 || b.in_ring) continue;
    if (mol.heavy_degree(b.begin) >= 2 && mol.heavy_degree(b.end) >= 2) ++d.rotatable_bonds;
  }
  return d;
}

}  // namespace chemtok
