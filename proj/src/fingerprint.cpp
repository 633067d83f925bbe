#include "chemtok/fingerprint.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>

#include "chemtok/errors.hpp"

namespace chemtok {

Fingerprint::Fingerprint(int width) : width_(width) {
  if (width < 64 || !std::has_single_bit(static_cast<unsigned>(width))) {
    throw UsageError("fingerprint width must be a power of two >= 64");
  }
  words_.assign(width / 64, 0);
}

int Fingerprint::count() const {
  int n = 0;
  for (std::uint64_t w : words_) n += std::popcount(w);
  return n;
}

Fingerprint& Fingerprint::operator|=(const Fingerprint& other) {
  if (other.width_ != width_) throw UsageError("fingerprint width mismatch");
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
  return *this;
}

std::string Fingerprint::to_hex() const {
  std::string out;
  out.reserve(words_.size() * 16);
  char buf[17];
  for (auto it = words_.rbegin(); it != words_.rend(); ++it) {
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(*it));
    out += buf;
  }
  return out;
}

std::int64_t atom_code(const Atom& a) { return 2 * a.atomic_number + (a.aromatic ? 1 : 0); }

std::int64_t bond_code(const Bond& b) { return 1000 + (b.aromatic ? 4 : b.order); }

namespace {

std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t path_hash(std::span<const std::int64_t> codes) {
  const bool reverse = std::lexicographical_compare(codes.rbegin(), codes.rend(), codes.begin(), codes.end());
  std::uint64_t h = 0x9E3779B97F4A7C15ull ^ codes.size();
  const auto fold = [&](std::int64_t c) { h = splitmix(h ^ static_cast<std::uint64_t>(c)); };
  if (reverse) {
    std::for_each(codes.rbegin(), codes.rend(), fold);
  } else {
    std::for_each(codes.begin(), codes.end(), fold);
  }
  return h;
}

Fingerprint fingerprint(const Molecule& mol, const FingerprintOptions& opts) {
  Fingerprint fp(opts.width);
  const std::uint64_t mask = static_cast<std::uint64_t>(opts.width) - 1;
  std::vector<char> on_path(mol.atoms.size(), 0);
  std::vector<std::int64_t> codes;

  // Depth-first over simple paths; each undirected path is reached from both
  // ends, which sets the same bit twice.
  auto extend = [&](auto&& self, int atom, int bonds_used) -> void {
    fp.set(static_cast<int>(path_hash(codes) & mask));
    if (bonds_used == opts.max_path_bonds) return;
    for (int bi : mol.incident(atom)) {
      const Bond& b = mol.bonds[bi];
      const int next = b.other(atom);
      if (on_path[next]) continue;
      on_path[next] = 1;
      codes.push_back(bond_code(b));
      codes.push_back(atom_code(mol.atoms[next]));
      self(self, next, bonds_used + 1);
      codes.resize(codes.size() - 2);
      on_path[next] = 0;
    }
  };
  for (int a = 0; a < mol.num_atoms(); ++a) {
    on_path[a] = 1;
    codes.assign(1, atom_code(mol.atoms[a]));
    extend(extend, a, 0);
    on_path[a] = 0;
  }
  return fp;
}

double tanimoto(const Fingerprint& a, const Fingerprint& b) {
  if (a.width() != b.width()) throw UsageError("fingerprint width mismatch");
  int inter = 0;
  int uni = 0;
  const auto wa = a.words();
  const auto wb = b.words();
  for (std::size_t i = 0; i < wa.size(); ++i) {
    inter += std::popcount(wa[i] & wb[i]);
    uni += std::popcount(wa[i] | wb[i]);
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / uni;
}

}  // namespace chemtok
