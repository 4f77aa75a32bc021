#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qvc/axioms.hpp"
#include "qvc/ratfun.hpp"
#include "qvc/space.hpp"

namespace qvc {

// One term of a braiding datum: replacement labels and the rational
// coefficient function of (x1, x2).
struct STerm {
  std::string u_label, v_label;
  RationalFunction f;
};

// Finitely supported symbolic braiding data: an ordered pair of field labels
// maps to its finite list of terms (u_i, v_i, f_i).  A registry resolves
// labels to concrete fields for the checks that apply them.
struct SMapData {
  std::map<std::string, QuantumField> fields;
  std::map<std::pair<std::string, std::string>, std::vector<STerm>> entries;

  const std::vector<STerm>* find(const std::string& a, const std::string& b) const;
  // Every coefficient nonzero and every label resolvable in the registry.
  void validate() const;
};

// The identity braiding on the given fields: every ordered pair (a, b) maps
// to the single term (a, b, 1).
SMapData identity_smap(const std::vector<QuantumField>& fields);

}  // namespace qvc
