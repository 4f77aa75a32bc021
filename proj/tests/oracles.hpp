#pragma once

// Independent brute-force calculators used to freeze expected values in
// tests.  Deliberately structured differently from the library: states are
// raw part-lists, and annihilation is computed by recursive commutation
// rather than multiplicity counting.

#include <algorithm>
#include <map>
#include <vector>

#include "qvc/scalar.hpp"

namespace oracle {

using qvc::Scalar;

// Free-boson state: descending part list -> coefficient.
using Fock = std::map<std::vector<int>, Scalar>;

inline void fock_add(Fock& into, std::vector<int> parts, const Scalar& c) {
  if (c.is_zero()) return;
  std::sort(parts.rbegin(), parts.rend());
  auto it = into.find(parts);
  if (it == into.end()) {
    into.emplace(std::move(parts), c);
    return;
  }
  it->second = it->second + c;
  if (it->second.is_zero()) into.erase(it);
}

inline Fock fock_unit(std::vector<int> parts) {
  Fock f;
  fock_add(f, std::move(parts), Scalar(1));
  return f;
}

// alpha_n on one monomial, by commuting past the leading creation operator:
// alpha_n alpha_{-m} = alpha_{-m} alpha_n + n*level*[n==m].
inline Fock mode_on_monomial(int n, const std::vector<int>& parts, const Scalar& level) {
  Fock out;
  if (n < 0) {
    std::vector<int> p = parts;
    p.push_back(-n);
    fock_add(out, std::move(p), Scalar(1));
    return out;
  }
  if (n == 0 || parts.empty()) return out;  // alpha_0 = 0; alpha_n vac = 0
  const int m = parts.front();
  std::vector<int> rest(parts.begin() + 1, parts.end());
  Fock inner = mode_on_monomial(n, rest, level);
  for (const auto& [p, c] : inner) {
    std::vector<int> q = p;
    q.push_back(m);
    fock_add(out, std::move(q), c);
  }
  if (n == m) fock_add(out, rest, Scalar(n) * level);
  return out;
}

inline Fock alpha_mode(int n, const Fock& v, const Scalar& level) {
  Fock out;
  for (const auto& [parts, c] : v) {
    Fock t = mode_on_monomial(n, parts, level);
    for (const auto& [p, tc] : t) fock_add(out, p, tc * c);
  }
  return out;
}

// Coefficient of x^e in alpha(x) = sum_n alpha_n x^{-n-1}.
inline Fock alpha_coeff(int e, const Fock& v, const Scalar& level) {
  return alpha_mode(-e - 1, v, level);
}

// Partition count by the standard two-argument recursion.
inline long partition_count(int n, int max_part) {
  if (n < 0) return 0;
  if (n == 0) return 1;
  if (max_part <= 0) return 0;
  return partition_count(n, max_part - 1) + partition_count(n - max_part, max_part);
}

}  // namespace oracle
