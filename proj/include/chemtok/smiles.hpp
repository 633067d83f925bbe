#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "chemtok/molecule.hpp"

namespace chemtok {

/// Parses a SMILES string into a graph.
///
/// Organic-subset atoms get implicit hydrogens from the lowest standard
/// valence that fits their bond-order sum (aromatic atoms reserve one
/// valence unit for the ring); bracket atoms carry only their explicit H.
/// Stereo marks (@, /, \) are accepted and dropped. A '.' separates
/// components inside one Molecule. Throws ParseError with a byte offset.
Molecule parse_smiles(std::string_view text);

/// Unique SMILES for a single connected molecule. Throws Error when the
/// molecule has more than one component; split on '.' first.
std::string canonical_smiles(const Molecule& mol);

/// Canonical strings of every component, sorted and joined with '.'.
std::string canonical_smiles_multi(const Molecule& mol);

/// Canonical ranks (0..n-1, all distinct) used by the emitter.
std::vector<int> canonical_ranks(const Molecule& mol);

struct ReactionRecord {
  std::vector<Molecule> reactants;
  std::vector<Molecule> agents;
  std::vector<Molecule> products;
};

/// Splits a string on top-level '.' (outside brackets). An empty string
/// yields no parts.
std::vector<std::string> split_molecules(std::string_view text);

/// `reactants>agents>products`, each a '.'-separated molecule list.
/// Throws FormatError when there are not exactly three components and
/// rethrows molecule errors with the component name and position.
ReactionRecord parse_reaction(std::string_view text);

/// Canonical molecules joined with '.', components joined with '>'.
std::string format_reaction(const ReactionRecord& rxn);

}  // namespace chemtok
