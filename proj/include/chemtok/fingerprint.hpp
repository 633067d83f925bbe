#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "chemtok/molecule.hpp"

namespace chemtok {

/// Fixed-width bit vector over hashed linear paths of a molecular graph.
class Fingerprint {
 public:
  explicit Fingerprint(int width = 2048);

  int width() const { return width_; }
  bool test(int bit) const { return (words_[bit >> 6] >> (bit & 63)) & 1u; }
  void set(int bit) { words_[bit >> 6] |= std::uint64_t{1} << (bit & 63); }
  int count() const;
  std::span<const std::uint64_t> words() const { return words_; }

  Fingerprint& operator|=(const Fingerprint& other);
  bool operator==(const Fingerprint&) const = default;

  /// Lowercase hex, most significant word first.
  std::string to_hex() const;

 private:
  int width_;
  std::vector<std::uint64_t> words_;
};

struct FingerprintOptions {
  int width = 2048;
  int max_path_bonds = 7;
};

/// Path element codes: atoms are 2*Z + aromatic, bonds are 1000 + order
/// (1004 for aromatic). A path alternates atom, bond, atom, ...
std::int64_t atom_code(const Atom& a);
std::int64_t bond_code(const Bond& b);

/// Direction-independent hash of one path: the lexicographically smaller of
/// the forward and reversed code sequences, folded with a splitmix64 step
/// per element starting from 0x9E3779B97F4A7C15 ^ length.
std::uint64_t path_hash(std::span<const std::int64_t> codes);

/// Sets bit (path_hash & (width-1)) for every simple path of 0..max bonds.
/// Zero-bond paths give one bit per distinct atom type.
Fingerprint fingerprint(const Molecule& mol, const FingerprintOptions& opts = {});

/// |a & b| / |a | b|; 1.0 when both are empty. Widths must match.
double tanimoto(const Fingerprint& a, const Fingerprint& b);

}  // namespace chemtok
