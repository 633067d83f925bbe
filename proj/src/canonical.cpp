#include <algorithm>
#include <array>
#include <cctype>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <tuple>

#include "chemtok/elements.hpp"
#include "chemtok/errors.hpp"
#include "chemtok/smiles.hpp"

namespace chemtok {

namespace {

// Leaves explored by the tie-break search before it stops branching.
constexpr int kLeafBudget = 20000;

template <typename Key>
std::vector<int> dense_ranks(const std::vector<Key>& keys) {
  std::vector<Key> sorted = keys;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<int> out(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    out[i] = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), keys[i]) - sorted.begin());
  }
  return out;
}

int count_classes(const std::vector<int>& ranks) {
  return ranks.empty() ? 0 : *std::max_element(ranks.begin(), ranks.end()) + 1;
}

int bond_code(const Bond& b) { return b.aromatic ? 4 : b.order; }

std::vector<int> initial_ranks(const Molecule& mol) {
  using Key = std::array<int, 6>;
  std::vector<Key> keys;
  keys.reserve(mol.atoms.size());
  for (int a = 0; a < mol.num_atoms(); ++a) {
    const Atom& at = mol.atoms[a];
    keys.push_back({at.atomic_number, at.formal_charge, mol.degree(a), at.hydrogens, at.aromatic ? 1 : 0,
                    at.isotope.value_or(0)});
  }
  return dense_ranks(keys);
}

/// Iterates neighbour-multiset refinement until the class count is stable.
std::vector<int> refine(const Molecule& mol, std::vector<int> ranks) {
  using Key = std::pair<int, std::vector<std::pair<int, int>>>;
  int classes = count_classes(ranks);
  while (true) {
    std::vector<Key> keys(mol.atoms.size());
    for (int a = 0; a < mol.num_atoms(); ++a) {
      keys[a].first = ranks[a];
      for (int bi : mol.incident(a)) {
        const Bond& b = mol.bonds[bi];
        keys[a].second.emplace_back(ranks[b.other(a)], bond_code(b));
      }
      std::sort(keys[a].second.begin(), keys[a].second.end());
    }
    std::vector<int> next = dense_ranks(keys);
    const int next_classes = count_classes(next);
    ranks = std::move(next);
    if (next_classes == classes) return ranks;
    classes = next_classes;
  }
}

int implied_hydrogens(const Molecule& mol, int a, bool& representable) {
  const Atom& at = mol.atoms[a];
  const auto valences = default_valences(at.atomic_number);
  representable = !valences.empty();
  if (!representable) return 0;
  int sum = 0;
  for (int bi : mol.incident(a)) sum += mol.bonds[bi].order;
  if (sum > valences.back()) {
    representable = false;
    return 0;
  }
  if (at.aromatic) return std::max(0, valences.front() - sum - 1);
  return *std::find_if(valences.begin(), valences.end(), [&](int v) { return v >= sum; }) - sum;
}

std::string atom_token(const Molecule& mol, int a) {
  const Atom& at = mol.atoms[a];
  static constexpr std::string_view kOrganic[] = {"B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I"};
  static constexpr std::string_view kAromaticBare[] = {"B", "C", "N", "O", "P", "S"};
  static constexpr std::string_view kAromaticBracket[] = {"B", "C", "N", "O", "P", "S", "Se", "As", "Te"};
  const auto in = [&](auto& list) { return std::find(std::begin(list), std::end(list), at.symbol) != std::end(list); };

  auto lower = [](std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  };

  if (at.formal_charge == 0 && !at.isotope && in(kOrganic) && (!at.aromatic || in(kAromaticBare))) {
    bool ok = false;
    const int h = implied_hydrogens(mol, a, ok);
    if (ok && h == at.hydrogens) return at.aromatic ? lower(at.symbol) : at.symbol;
  }
  std::string out = "[";
  if (at.isotope) out += std::to_string(*at.isotope);
  out += at.aromatic && in(kAromaticBracket) ? lower(at.symbol) : at.symbol;
  if (at.hydrogens > 0) {
    out += 'H';
    if (at.hydrogens > 1) out += std::to_string(at.hydrogens);
  }
  if (at.formal_charge != 0) {
    out += at.formal_charge > 0 ? '+' : '-';
    if (std::abs(at.formal_charge) > 1) out += std::to_string(std::abs(at.formal_charge));
  }
  out += ']';
  return out;
}

std::string bond_token(const Molecule& mol, const Bond& b) {
  const bool both_aromatic = mol.atoms[b.begin].aromatic && mol.atoms[b.end].aromatic;
  if (b.aromatic) return both_aromatic ? "" : ":";
  switch (b.order) {
    case 2:
      return "=";
    case 3:
      return "#";
    default:
      return both_aromatic ? "-" : "";
  }
}

std::string ring_label(int d) { return d < 10 ? std::to_string(d) : "%" + std::to_string(d); }

/// Writes the SMILES of a connected molecule whose ranks are all distinct.
std::string emit(const Molecule& mol, const std::vector<int>& ranks) {
  const int n = mol.num_atoms();
  if (n == 0) return {};
  std::vector<std::vector<int>> sorted_nb(n);
  for (int a = 0; a < n; ++a) {
    for (int bi : mol.incident(a)) sorted_nb[a].push_back(bi);
    std::sort(sorted_nb[a].begin(), sorted_nb[a].end(), [&](int x, int y) {
      return ranks[mol.bonds[x].other(a)] < ranks[mol.bonds[y].other(a)];
    });
  }
  const int root = static_cast<int>(std::min_element(ranks.begin(), ranks.end()) - ranks.begin());

  std::vector<int> order(n, -1);
  std::vector<char> bond_used(mol.bonds.size(), 0);
  std::vector<std::vector<int>> children(n);  // tree bond indices
  std::vector<std::vector<int>> ring_bonds(n);
  int counter = 0;
  std::function<void(int)> visit = [&](int a) {
    order[a] = counter++;
    for (int bi : sorted_nb[a]) {
      if (bond_used[bi]) continue;
      bond_used[bi] = 1;
      const int o = mol.bonds[bi].other(a);
      if (order[o] < 0) {
        children[a].push_back(bi);
        visit(o);
      } else {
        ring_bonds[a].push_back(bi);
        ring_bonds[o].push_back(bi);
      }
    }
  };
  visit(root);

  std::vector<int> digit_of(mol.bonds.size(), -1);
  std::vector<char> digit_busy(100, 0);
  std::string out;
  std::function<void(int)> write = [&](int a) {
    out += atom_token(mol, a);
    auto& rb = ring_bonds[a];
    std::sort(rb.begin(), rb.end(), [&](int x, int y) {
      return order[mol.bonds[x].other(a)] < order[mol.bonds[y].other(a)];
    });
    for (int bi : rb) {
      const int o = mol.bonds[bi].other(a);
      if (order[o] < order[a]) {
        out += ring_label(digit_of[bi]);
        digit_busy[digit_of[bi]] = 0;
      } else {
        int d = 1;
        while (digit_busy[d]) ++d;
        digit_busy[d] = 1;
        digit_of[bi] = d;
        out += bond_token(mol, mol.bonds[bi]) + ring_label(d);
      }
    }
    const auto& ch = children[a];
    for (std::size_t i = 0; i < ch.size(); ++i) {
      const Bond& b = mol.bonds[ch[i]];
      const bool last = i + 1 == ch.size();
      if (!last) out += '(';
      out += bond_token(mol, b);
      write(b.other(a));
      if (!last) out += ')';
    }
  };
  write(root);
  return out;
}

struct SearchState {
  int leaves = 0;
};

std::pair<std::string, std::vector<int>> search(const Molecule& mol, std::vector<int> ranks, SearchState& st) {
  ranks = refine(mol, std::move(ranks));
  const int n = mol.num_atoms();
  if (count_classes(ranks) == n) {
    ++st.leaves;
    return {emit(mol, ranks), ranks};
  }
  // Lowest rank value shared by more than one atom.
  std::vector<int> counts(n, 0);
  for (int r : ranks) ++counts[r];
  int tied = 0;
  while (counts[tied] < 2) ++tied;

  std::optional<std::pair<std::string, std::vector<int>>> best;
  for (int a = 0; a < n; ++a) {
    if (ranks[a] != tied) continue;
    if (best && st.leaves >= kLeafBudget) break;
    std::vector<int> split(n);
    for (int i = 0; i < n; ++i) split[i] = 2 * ranks[i] + 1;
    split[a] = 2 * ranks[a];
    auto cand = search(mol, dense_ranks(split), st);
    if (!best || cand.first < best->first) best = std::move(cand);
  }
  return std::move(*best);
}

std::pair<std::string, std::vector<int>> canonicalize(const Molecule& mol) {
  if (mol.num_atoms() == 0) return {};
  if (mol.num_components() != 1) {
    throw Error("canonical_smiles needs a single connected molecule; split on '.' first");
  }
  SearchState st;
  return search(mol, initial_ranks(mol), st);
}

}  // namespace

std::string canonical_smiles(const Molecule& mol) { return canonicalize(mol).first; }

std::vector<int> canonical_ranks(const Molecule& mol) { return canonicalize(mol).second; }

std::string canonical_smiles_multi(const Molecule& mol) {
  std::vector<std::string> parts;
  for (const Molecule& c : mol.split_components()) parts.push_back(canonical_smiles(c));
  std::sort(parts.begin(), parts.end());
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += '.';
    out += parts[i];
  }
  return out;
}

}  // namespace chemtok
