#include "chemtok/smiles.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "chemtok/elements.hpp"
#include "chemtok/errors.hpp"

namespace chemtok {

namespace {

struct BondSpec {
  int order = 1;
  bool aromatic = false;
  bool explicit_symbol = false;
  std::size_t offset = 0;

  bool operator==(const BondSpec& o) const { return order == o.order && aromatic == o.aromatic; }
};

struct RingOpen {
  int atom;
  BondSpec bond;
  std::size_t offset;
};

class SmilesParser {
 public:
  explicit SmilesParser(std::string_view text) : s_(text) {}

  Molecule run() {
    if (s_.empty()) throw ParseError(0, "empty SMILES");
    while (pos_ < s_.size()) step();
    if (pending_) throw ParseError(pending_->offset, "bond without a following atom");
    if (!branches_.empty()) throw ParseError(branches_.back().second, "unbalanced '('");
    if (!rings_.empty()) {
      const auto& open = rings_.begin()->second;
      throw ParseError(open.offset, "unmatched ring closure " + std::to_string(rings_.begin()->first));
    }
    if (mol_.atoms.empty()) throw ParseError(0, "no atoms");
    assign_hydrogens();
    mol_.finalize();
    return std::move(mol_);
  }

 private:
  void step() {
    const char c = s_[pos_];
    if (c == '(') {
      if (prev_ < 0) throw ParseError(pos_, "branch without a preceding atom");
      if (pending_) throw ParseError(pos_, "bond before '('");
      branches_.emplace_back(prev_, pos_);
      ++pos_;
    } else if (c == ')') {
      if (branches_.empty()) throw ParseError(pos_, "unbalanced ')'");
      if (pending_) throw ParseError(pending_->offset, "bond without a following atom");
      prev_ = branches_.back().first;
      branches_.pop_back();
      ++pos_;
    } else if (c == '.') {
      if (prev_ < 0) throw ParseError(pos_, "empty component before '.'");
      if (pending_) throw ParseError(pending_->offset, "bond without a following atom");
      if (!branches_.empty()) throw ParseError(pos_, "'.' inside a branch");
      prev_ = -1;
      ++pos_;
    } else if (c == '-' || c == '=' || c == '#' || c == ':' || c == '/' || c == '\\' || c == '$') {
      if (prev_ < 0) throw ParseError(pos_, "bond without a preceding atom");
      if (pending_) throw ParseError(pos_, "two consecutive bond symbols");
      BondSpec b;
      b.explicit_symbol = true;
      b.offset = pos_;
      switch (c) {
        case '=':
          b.order = 2;
          break;
        case '#':
          b.order = 3;
          break;
        case ':':
          b.aromatic = true;
          break;
        case '/':
        case '\\':
          mol_.stereo_markers_seen = true;
          break;
        case '$':
          throw ParseError(pos_, "quadruple bonds are not supported");
        default:
          break;
      }
      pending_ = b;
      ++pos_;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '%') {
      ring_closure();
    } else if (c == '[') {
      add_atom(bracket_atom());
    } else if (std::isalpha(static_cast<unsigned char>(c))) {
      add_atom(organic_atom());
    } else {
      throw ParseError(pos_, std::string("unexpected character '") + c + "'");
    }
  }

  struct ParsedAtom {
    Atom atom;
    bool bracket;
    std::size_t offset;
  };

  ParsedAtom organic_atom() {
    const std::size_t start = pos_;
    const std::string_view rest = s_.substr(pos_);
    Atom a;
    if (rest.starts_with("Cl") || rest.starts_with("Br")) {
      a.symbol = std::string(rest.substr(0, 2));
      pos_ += 2;
    } else {
      const char c = s_[pos_];
      switch (c) {
        case 'B':
        case 'C':
        case 'N':
        case 'O':
        case 'P':
        case 'S':
        case 'F':
        case 'I':
          a.symbol = std::string(1, c);
          break;
        case 'b':
        case 'c':
        case 'n':
        case 'o':
        case 'p':
        case 's':
          a.symbol = std::string(1, static_cast<char>(std::toupper(c)));
          a.aromatic = true;
          break;
        default:
          throw ParseError(start, std::string("unknown atom symbol '") + c + "'");
      }
      ++pos_;
    }
    a.atomic_number = element_by_symbol(a.symbol)->atomic_number;
    return {a, false, start};
  }

  int read_int(int max_digits = 9) {
    int v = 0;
    int n = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])) && n < max_digits) {
      v = v * 10 + (s_[pos_] - '0');
      ++pos_;
      ++n;
    }
    return v;
  }

  bool digit_here() const { return pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])); }

  ParsedAtom bracket_atom() {
    const std::size_t start = pos_;
    ++pos_;  // '['
    Atom a;
    if (digit_here()) a.isotope = read_int();
    if (pos_ >= s_.size()) throw ParseError(start, "unterminated bracket atom");

    const std::size_t sym_at = pos_;
    const char c = s_[pos_];
    if (std::isupper(static_cast<unsigned char>(c))) {
      if (pos_ + 1 < s_.size() && std::islower(static_cast<unsigned char>(s_[pos_ + 1])) &&
          element_by_symbol(s_.substr(pos_, 2))) {
        a.symbol = std::string(s_.substr(pos_, 2));
        pos_ += 2;
      } else if (element_by_symbol(s_.substr(pos_, 1))) {
        a.symbol = std::string(1, c);
        pos_ += 1;
      } else {
        throw ParseError(sym_at, std::string("unknown element '") + c + "'");
      }
    } else if (std::islower(static_cast<unsigned char>(c))) {
      static constexpr std::string_view two[] = {"se", "as", "te"};
      bool matched = false;
      for (std::string_view t : two) {
        if (s_.substr(pos_).starts_with(t)) {
          a.symbol = std::string(1, static_cast<char>(std::toupper(t[0]))) + t[1];
          pos_ += 2;
          matched = true;
          break;
        }
      }
      if (!matched) {
        if (std::string_view("bcnops").find(c) == std::string_view::npos) {
          throw ParseError(sym_at, std::string("unknown aromatic symbol '") + c + "'");
        }
        a.symbol = std::string(1, static_cast<char>(std::toupper(c)));
        ++pos_;
      }
      a.aromatic = true;
    } else if (c == '*') {
      throw ParseError(sym_at, "wildcard atoms are not supported");
    } else {
      throw ParseError(sym_at, "missing element symbol");
    }
    a.atomic_number = element_by_symbol(a.symbol)->atomic_number;

    if (pos_ < s_.size() && s_[pos_] == '@') {
      mol_.stereo_markers_seen = true;
      ++pos_;
      if (pos_ < s_.size() && s_[pos_] == '@') {
        ++pos_;
      } else {
        const std::string_view rest = s_.substr(pos_);
        for (std::string_view cls : {"TH", "AL", "SP", "TB", "OH"}) {
          if (rest.starts_with(cls)) {
            pos_ += 2;
            read_int(2);
            break;
          }
        }
      }
    }
    if (pos_ < s_.size() && s_[pos_] == 'H') {
      ++pos_;
      a.hydrogens = digit_here() ? read_int(1) : 1;
    }
    if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) {
      const char sign = s_[pos_];
      int mag = 0;
      while (pos_ < s_.size() && s_[pos_] == sign) {
        ++mag;
        ++pos_;
      }
      if (mag == 1 && digit_here()) mag = read_int(2);
      a.formal_charge = sign == '+' ? mag : -mag;
    }
    if (pos_ < s_.size() && s_[pos_] == ':') {
      ++pos_;
      if (!digit_here()) throw ParseError(pos_, "atom class without a number");
      read_int();
    }
    if (pos_ >= s_.size() || s_[pos_] != ']') throw ParseError(pos_, "expected ']'");
    ++pos_;
    return {a, true, start};
  }

  BondSpec default_bond(int a, int b) const {
    BondSpec spec;
    spec.aromatic = mol_.atoms[a].aromatic && mol_.atoms[b].aromatic;
    return spec;
  }

  void connect(int a, int b, const BondSpec& spec, std::size_t offset) {
    for (const Bond& existing : mol_.bonds) {
      if ((existing.begin == a && existing.end == b) || (existing.begin == b && existing.end == a)) {
        throw ParseError(offset, "duplicate bond");
      }
    }
    Bond bond;
    bond.begin = a;
    bond.end = b;
    bond.order = spec.aromatic ? 1 : spec.order;
    bond.aromatic = spec.aromatic;
    mol_.bonds.push_back(bond);
  }

  void add_atom(ParsedAtom parsed) {
    const int idx = static_cast<int>(mol_.atoms.size());
    mol_.atoms.push_back(parsed.atom);
    bracket_.push_back(parsed.bracket);
    offsets_.push_back(parsed.offset);
    if (prev_ >= 0) {
      const BondSpec spec = pending_ ? *pending_ : default_bond(prev_, idx);
      connect(prev_, idx, spec, parsed.offset);
    }
    pending_.reset();
    prev_ = idx;
  }

  void ring_closure() {
    const std::size_t start = pos_;
    if (prev_ < 0) throw ParseError(start, "ring closure without a preceding atom");
    int num;
    if (s_[pos_] == '%') {
      ++pos_;
      if (pos_ + 1 >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_])) ||
          !std::isdigit(static_cast<unsigned char>(s_[pos_ + 1]))) {
        throw ParseError(start, "'%' must be followed by two digits");
      }
      num = read_int(2);
    } else {
      num = s_[pos_] - '0';
      ++pos_;
    }
    auto it = rings_.find(num);
    if (it == rings_.end()) {
      RingOpen open{prev_, pending_.value_or(BondSpec{}), start};
      rings_.emplace(num, open);
    } else {
      const RingOpen open = it->second;
      rings_.erase(it);
      if (open.atom == prev_) throw ParseError(start, "ring closure to the same atom");
      BondSpec spec;
      if (pending_ && open.bond.explicit_symbol) {
        if (!(*pending_ == open.bond)) throw ParseError(start, "conflicting ring-closure bond symbols");
        spec = *pending_;
      } else if (pending_) {
        spec = *pending_;
      } else if (open.bond.explicit_symbol) {
        spec = open.bond;
      } else {
        spec = default_bond(open.atom, prev_);
      }
      connect(open.atom, prev_, spec, start);
    }
    pending_.reset();
  }

  void assign_hydrogens() {
    std::vector<int> order_sum(mol_.atoms.size(), 0);
    for (const Bond& b : mol_.bonds) {
      order_sum[b.begin] += b.order;
      order_sum[b.end] += b.order;
    }
    for (std::size_t i = 0; i < mol_.atoms.size(); ++i) {
      if (bracket_[i]) continue;
      Atom& a = mol_.atoms[i];
      const auto valences = default_valences(a.atomic_number);
      const int sum = order_sum[i];
      if (sum > valences.back()) {
        throw ParseError(offsets_[i], "valence overflow on " + a.symbol);
      }
      if (a.aromatic) {
        a.hydrogens = std::max(0, valences.front() - sum - 1);
      } else {
        const auto v = std::find_if(valences.begin(), valences.end(), [&](int x) { return x >= sum; });
        a.hydrogens = *v - sum;
      }
    }
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  Molecule mol_;
  std::vector<bool> bracket_;
  std::vector<std::size_t> offsets_;
  int prev_ = -1;
  std::optional<BondSpec> pending_;
  std::vector<std::pair<int, std::size_t>> branches_;
  std::map<int, RingOpen> rings_;
};

}  // namespace

Molecule parse_smiles(std::string_view text) { return SmilesParser(text).run(); }

std::vector<std::string> split_molecules(std::string_view text) {
  std::vector<std::string> parts;
  if (text.empty()) return parts;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '[') ++depth;
    if (text[i] == ']') --depth;
    if (text[i] == '.' && depth == 0) {
      parts.emplace_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  parts.emplace_back(text.substr(start));
  return parts;
}

ReactionRecord parse_reaction(std::string_view text) {
  std::vector<std::string_view> comps;
  std::size_t start = 0;
  int depth = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '[') ++depth;
    if (text[i] == ']') --depth;
    if (text[i] == '>' && depth == 0) {
      comps.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  comps.push_back(text.substr(start));
  if (comps.size() != 3) {
    throw FormatError("reaction must have 3 '>'-separated components, found " + std::to_string(comps.size()));
  }

  static constexpr const char* kNames[] = {"reactants", "agents", "products"};
  ReactionRecord rxn;
  std::vector<Molecule>* targets[] = {&rxn.reactants, &rxn.agents, &rxn.products};
  std::size_t comp_offset = 0;
  for (int c = 0; c < 3; ++c) {
    std::size_t mol_offset = comp_offset;
    for (const std::string& part : split_molecules(comps[c])) {
      try {
        targets[c]->push_back(parse_smiles(part));
      } catch (const ParseError& e) {
        throw ParseError(mol_offset + e.offset(), std::string(kNames[c]) + ": " + e.message());
      }
      mol_offset += part.size() + 1;
    }
    comp_offset += comps[c].size() + 1;
  }
  return rxn;
}

std::string format_reaction(const ReactionRecord& rxn) {
  std::string out;
  const std::vector<Molecule>* comps[] = {&rxn.reactants, &rxn.agents, &rxn.products};
  for (int c = 0; c < 3; ++c) {
    if (c > 0) out += '>';
    for (std::size_t i = 0; i < comps[c]->size(); ++i) {
      if (i > 0) out += '.';
      out += canonical_smiles_multi((*comps[c])[i]);
    }
  }
  return out;
}

}  // namespace chemtok
