#pragma once

#include <optional>
#include <span>
#include <string_view>

namespace chemtok {

struct ElementInfo {
  int atomic_number;
  std::string_view symbol;
  double mass;  // standard atomic weight, g/mol
};

/// Elements 1 (H) through 103 (Lr).
std::span<const ElementInfo> element_table();
std::optional<ElementInfo> element_by_symbol(std::string_view symbol);
const ElementInfo& element_by_number(int atomic_number);

/// Allowed neutral valences for organic-subset atoms, ascending; empty otherwise.
std::span<const int> default_valences(int atomic_number);

}  // namespace chemtok
