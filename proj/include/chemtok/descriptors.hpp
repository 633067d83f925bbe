#pragma once

#include "chemtok/molecule.hpp"

namespace chemtok {

struct Descriptors {
  double molecular_weight = 0.0;  // g/mol, implicit hydrogens included
  int hbond_donors = 0;           // N/O atoms carrying at least one H
  int hbond_acceptors = 0;        // N/O atoms
  int rotatable_bonds = 0;        // single acyclic bonds between atoms of heavy degree >= 2
};

Descriptors descriptors(const Molecule& mol);

}  // namespace chemtok
