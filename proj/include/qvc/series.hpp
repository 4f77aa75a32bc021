#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qvc/errors.hpp"
#include "qvc/scalar.hpp"
#include "qvc/window.hpp"

namespace qvc {

// Coefficient hooks for Series<C>.  A coefficient type provides:
//   coeff_trivial(c)   -- safe to drop from sparse storage (identically zero
//                         with nothing unknown about it)
//   coeff_add(a, b)    -- abelian group operation
//   coeff_scale(c, s)  -- action of the scalar field
//   coeff_str(c)       -- printable form for witnesses
// plus mixed products via coeff_mul overloads.  Scalar's hooks live here;
// vector-valued coefficients supply their own overloads.
inline bool coeff_trivial(const Scalar& c) { return c.is_zero(); }
inline Scalar coeff_add(const Scalar& a, const Scalar& b) { return a + b; }
inline Scalar coeff_mul(const Scalar& a, const Scalar& b) { return a * b; }
inline Scalar coeff_scale(const Scalar& c, const Scalar& s) { return c * s; }
inline std::string coeff_str(const Scalar& c) { return c.str(); }

// Windowed formal series in finitely many variables.
//
// Sparse map from exponent vectors (aligned with `vars`) to coefficients.
// `window` is the per-variable box inside which the representation is exact:
// within the box, absent means known-zero.  Outside the box knowledge is
// governed by two per-variable certificates about the represented object's
// true support:
//   floored[v]: the support satisfies e_v >= window[v].lo, so any exponent
//               below the box floor has coefficient exactly zero;
//   capped[v]:  the support satisfies e_v <= window[v].hi likewise.
// A variable certified in neither direction carries no information outside
// its range: such queries raise UnknownCoefficientError.  When one variable
// certifies zero but another leaves its range uncertified, the query raises:
// unknown outranks certified-zero, which keeps truncated objects (see
// taylor_substitute) from answering for exponents they do not determine.
template <class C>
class Series {
 public:
  std::vector<std::string> vars;
  Window window;
  std::vector<char> floored;
  std::vector<char> capped;
  std::map<std::vector<int>, C> coeffs;

  Series() = default;
  Series(std::vector<std::string> vs, Window w)
      : vars(std::move(vs)), window(std::move(w)) {
    if (window.size() != static_cast<int>(vars.size()))
      throw InputError("Series: window/variable arity mismatch");
    floored.assign(vars.size(), 0);
    capped.assign(vars.size(), 0);
  }

  int nvars() const { return static_cast<int>(vars.size()); }

  int var_index(const std::string& name) const {
    for (int i = 0; i < nvars(); ++i)
      if (vars[i] == name) return i;
    throw InputError("Series: unknown variable '" + name + "'");
  }

  bool has_var(const std::string& name) const {
    return std::find(vars.begin(), vars.end(), name) != vars.end();
  }

  // A finitely supported series whose box certifies its support hull: both
  // certificates hold in every variable.
  static Series exact(std::vector<std::string> vs, Window w) {
    Series s(std::move(vs), std::move(w));
    s.floored.assign(s.vars.size(), 1);
    s.capped.assign(s.vars.size(), 1);
    return s;
  }

  static Series monomial(std::vector<std::string> vs, std::vector<int> e, C c) {
    std::vector<Range> r;
    for (int x : e) r.push_back(Range{x, x});
    Series s = exact(std::move(vs), Window(std::move(r)));
    if (!coeff_trivial(c)) s.coeffs.emplace(std::move(e), std::move(c));
    return s;
  }

  bool fully_exact() const {
    for (int v = 0; v < nvars(); ++v)
      if (!floored[v] || !capped[v]) return false;
    return true;
  }

  void set(std::vector<int> e, C c) {
    if (static_cast<int>(e.size()) != nvars())
      throw InputError("Series::set: exponent arity mismatch");
    if (!window.contains(e))
      throw InputError("Series::set: exponent outside window");
    if (coeff_trivial(c))
      coeffs.erase(e);
    else
      coeffs[std::move(e)] = std::move(c);
  }

  void add_to(const std::vector<int>& e, const C& c) {
    if (coeff_trivial(c)) return;
    auto it = coeffs.find(e);
    if (it == coeffs.end()) {
      coeffs.emplace(e, c);
    } else {
      it->second = coeff_add(it->second, c);
      if (coeff_trivial(it->second)) coeffs.erase(it);
    }
  }

  // Coefficient at `e`.  Exponents beyond the box under a support certificate
  // are exactly zero; exponents beyond it in an uncertified direction are
  // unknown and raise.
  const C& coeff(const std::vector<int>& e) const {
    static const C zero{};
    if (static_cast<int>(e.size()) != nvars())
      throw InputError("Series::coeff: exponent arity mismatch");
    bool certified_zero = false;
    for (int v = 0; v < nvars(); ++v) {
      if (e[v] < window[v].lo) {
        if (!floored[v]) throw_unknown(e);
        certified_zero = true;
      }
      if (e[v] > window[v].hi) {
        if (!capped[v]) throw_unknown(e);
        certified_zero = true;
      }
    }
    if (certified_zero) return zero;
    auto it = coeffs.find(e);
    return it == coeffs.end() ? zero : it->second;
  }

  bool known_at(const std::vector<int>& e) const {
    for (int v = 0; v < nvars(); ++v) {
      if (e[v] < window[v].lo && !floored[v]) return false;
      if (e[v] > window[v].hi && !capped[v]) return false;
    }
    return true;
  }

  // Shrink the box onto the stored support hull wherever a certificate makes
  // that sound: a floored variable's floor may rise to the least stored
  // exponent (everything below it inside the box is known zero), and dually
  // for capped ceilings.  An all-zero series with both certificates in some
  // variable collapses to a degenerate single-point range there.
  void tighten() {
    for (int v = 0; v < nvars(); ++v) {
      if (!floored[v] && !capped[v]) continue;
      if (coeffs.empty()) {
        if (floored[v] && capped[v]) window[v] = Range{0, 0};
        continue;
      }
      int mn = std::numeric_limits<int>::max();
      int mx = std::numeric_limits<int>::min();
      for (const auto& [e, c] : coeffs) {
        mn = std::min(mn, e[v]);
        mx = std::max(mx, e[v]);
      }
      if (floored[v]) window[v].lo = mn;
      if (capped[v]) window[v].hi = mx;
    }
  }

  // Restrict the box.  Knowledge may only be forgotten: the new box must stay
  // inside the old one except in certified directions, and a certificate
  // survives only where it remains a true statement about the support (a
  // floor raised past stored entries would not).
  Series restricted(const Window& w) const {
    if (w.size() != nvars()) throw InputError("Series::restricted: arity mismatch");
    Series out(vars, w);
    for (int v = 0; v < nvars(); ++v) {
      if (w[v].lo < window[v].lo && !floored[v])
        throw InputError("Series::restricted: window extends below known floor");
      if (w[v].hi > window[v].hi && !capped[v])
        throw InputError("Series::restricted: window extends above known cap");
      bool fl = floored[v], cp = capped[v];
      for (const auto& [e, c] : coeffs) {
        if (e[v] < w[v].lo) fl = false;
        if (e[v] > w[v].hi) cp = false;
      }
      out.floored[v] = fl ? 1 : 0;
      out.capped[v] = cp ? 1 : 0;
    }
    for (const auto& [e, c] : coeffs)
      if (w.contains(e)) out.coeffs.emplace(e, c);
    return out;
  }

  Series renamed(const std::string& from, const std::string& to) const {
    if (has_var(to)) throw InputError("Series::renamed: variable '" + to + "' already present");
    Series out = *this;
    out.vars[var_index(from)] = to;
    return out;
  }

  // Multiply by the monomial s * prod_v vars[v]^{k[v]}: exponents and box
  // shift rigidly, certificates survive.
  Series shifted(const std::vector<int>& k, const Scalar& s) const {
    if (static_cast<int>(k.size()) != nvars())
      throw InputError("Series::shifted: arity mismatch");
    std::vector<Range> r;
    for (int v = 0; v < nvars(); ++v)
      r.push_back(Range{window[v].lo + k[v], window[v].hi + k[v]});
    Series out(vars, Window(std::move(r)));
    out.floored = floored;
    out.capped = capped;
    if (s.is_zero()) return out;
    for (const auto& [e, c] : coeffs) {
      std::vector<int> e2 = e;
      for (int v = 0; v < nvars(); ++v) e2[v] += k[v];
      out.coeffs.emplace(std::move(e2), coeff_scale(c, s));
    }
    return out;
  }

  Series scaled(const Scalar& s) const {
    Series out(vars, window);
    out.floored = floored;
    out.capped = capped;
    if (s.is_zero()) return out;
    for (const auto& [e, c] : coeffs) out.add_to(e, coeff_scale(c, s));
    return out;
  }

  Series operator-() const { return scaled(Scalar(-1)); }

  bool stored_empty() const { return coeffs.empty(); }

  std::string vars_str() const {
    std::string s = "(";
    for (int i = 0; i < nvars(); ++i) {
      if (i) s += ",";
      s += vars[i];
    }
    return s + ")";
  }

  static std::string exp_str(const std::vector<int>& e) {
    std::string s = "(";
    for (size_t i = 0; i < e.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(e[i]);
    }
    return s + ")";
  }

  std::string str() const {
    if (coeffs.empty()) return "0  [window " + window_str() + "]";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : coeffs) {
      if (!first) os << " + ";
      first = false;
      os << "(" << coeff_str(c) << ")";
      for (int v = 0; v < nvars(); ++v)
        if (e[v] != 0) os << "*" << vars[v] << "^" << e[v];
    }
    os << "  [window " << window_str() << "]";
    return os.str();
  }

  std::string window_str() const {
    std::string s;
    for (int v = 0; v < nvars(); ++v) {
      if (v) s += " ";
      s += vars[v] + ":";
      s += floored[v] ? "[" : "(";
      s += std::to_string(window[v].lo) + ".." + std::to_string(window[v].hi);
      s += capped[v] ? "]" : ")";
    }
    return s;
  }

 private:
  [[noreturn]] static void throw_unknown(const std::vector<int>& e) {
    throw UnknownCoefficientError("coefficient at " + exp_str(e) +
                                  " lies outside the validity window");
  }
};

namespace detail {

// Re-express a series on a target variable list that contains all of its own
// variables.  A variable absent from the series enters with exponent 0 and a
// certified degenerate range.
template <class C>
Series<C> with_vars(const Series<C>& s, const std::vector<std::string>& vs) {
  std::vector<int> pos(vs.size(), -1);
  for (size_t i = 0; i < vs.size(); ++i)
    for (int j = 0; j < s.nvars(); ++j)
      if (vs[i] == s.vars[j]) pos[i] = j;
  std::vector<Range> r(vs.size());
  Series<C> out;
  out.vars = vs;
  out.floored.assign(vs.size(), 0);
  out.capped.assign(vs.size(), 0);
  for (size_t i = 0; i < vs.size(); ++i) {
    if (pos[i] < 0) {
      r[i] = Range{0, 0};
      out.floored[i] = 1;
      out.capped[i] = 1;
    } else {
      r[i] = s.window[pos[i]];
      out.floored[i] = s.floored[pos[i]];
      out.capped[i] = s.capped[pos[i]];
    }
  }
  out.window = Window(std::move(r));
  for (const auto& [e, c] : s.coeffs) {
    std::vector<int> e2(vs.size(), 0);
    for (size_t i = 0; i < vs.size(); ++i)
      if (pos[i] >= 0) e2[i] = e[pos[i]];
    out.coeffs.emplace(std::move(e2), c);
  }
  return out;
}

inline std::vector<std::string> merged_vars(const std::vector<std::string>& a,
                                            const std::vector<std::string>& b) {
  std::vector<std::string> vs = a;
  for (const std::string& v : b)
    if (std::find(vs.begin(), vs.end(), v) == vs.end()) vs.push_back(v);
  return vs;
}

}  // namespace detail

template <class C>
Series<C> reordered(const Series<C>& s, const std::vector<std::string>& vs) {
  for (const std::string& v : s.vars)
    if (std::find(vs.begin(), vs.end(), v) == vs.end())
      throw InputError("reordered: target variable list drops '" + v + "'");
  return detail::with_vars(s, vs);
}

// Sum.  Knowledge intersects: per variable the result is certified only in
// the directions both operands certify, and the box is the largest range on
// which both coefficients are determined.
template <class C>
Series<C> add(const Series<C>& a0, const Series<C>& b0) {
  auto vs = detail::merged_vars(a0.vars, b0.vars);
  Series<C> a = detail::with_vars(a0, vs);
  Series<C> b = detail::with_vars(b0, vs);
  std::vector<Range> r(vs.size());
  Series<C> out;
  out.vars = vs;
  out.floored.assign(vs.size(), 0);
  out.capped.assign(vs.size(), 0);
  for (size_t v = 0; v < vs.size(); ++v) {
    int lo, hi;
    if (a.floored[v] && b.floored[v]) {
      lo = std::min(a.window[v].lo, b.window[v].lo);
      out.floored[v] = 1;
    } else if (a.floored[v]) {
      lo = b.window[v].lo;
    } else if (b.floored[v]) {
      lo = a.window[v].lo;
    } else {
      lo = std::max(a.window[v].lo, b.window[v].lo);
    }
    if (a.capped[v] && b.capped[v]) {
      hi = std::max(a.window[v].hi, b.window[v].hi);
      out.capped[v] = 1;
    } else if (a.capped[v]) {
      hi = b.window[v].hi;
    } else if (b.capped[v]) {
      hi = a.window[v].hi;
    } else {
      hi = std::min(a.window[v].hi, b.window[v].hi);
    }
    if (lo > hi)
      throw BudgetError("series_add: validity windows for " + vs[v] + " do not overlap (" +
                        std::to_string(lo) + " > " + std::to_string(hi) + ")");
    r[v] = Range{lo, hi};
  }
  out.window = Window(std::move(r));
  for (const auto& [e, c] : a.coeffs)
    if (out.window.contains(e)) out.add_to(e, c);
  for (const auto& [e, c] : b.coeffs)
    if (out.window.contains(e)) out.add_to(e, c);
  return out;
}

template <class C>
Series<C> sub(const Series<C>& a, const Series<C>& b) {
  return add(a, b.scaled(Scalar(-1)));
}

// Product.  Sound per-variable window arithmetic from the four certificates:
// the convolution at an output exponent is exact when every split compatible
// with the factors' support certificates lands inside both stored boxes.
// Requires each variable's split set to be bounded, i.e. (a floored or b
// capped) and (a capped or b floored).
template <class A, class B>
auto mul(const Series<A>& a0, const Series<B>& b0)
    -> Series<decltype(coeff_mul(std::declval<A>(), std::declval<B>()))> {
  using R = decltype(coeff_mul(std::declval<A>(), std::declval<B>()));
  auto vs = detail::merged_vars(a0.vars, b0.vars);
  Series<A> a = detail::with_vars(a0, vs);
  Series<B> b = detail::with_vars(b0, vs);
  a.tighten();
  b.tighten();
  constexpr int kInf = std::numeric_limits<int>::max() / 4;
  std::vector<Range> r(vs.size());
  Series<R> out;
  out.vars = vs;
  out.floored.assign(vs.size(), 0);
  out.capped.assign(vs.size(), 0);
  for (size_t v = 0; v < vs.size(); ++v) {
    const Range ra = a.window[v], rb = b.window[v];
    const bool fa = a.floored[v], fb = b.floored[v];
    const bool ca = a.capped[v], cb = b.capped[v];
    if (!((fa || cb) && (ca || fb)))
      throw InputError("series_mul: convolution in " + vs[v] +
                       " is unbounded (missing support certificates)");
    int lo = -kInf, hi = kInf;
    if (fa && fb) {
      lo = ra.lo + rb.lo;
      out.floored[v] = 1;
    } else {
      // An uncertified floor is exact only where the other factor's cap cuts
      // every below-floor split off.
      if (!fa) lo = std::max(lo, ra.lo + rb.hi);
      if (!fb) lo = std::max(lo, rb.lo + ra.hi);
    }
    if (ca && cb) {
      hi = ra.hi + rb.hi;
      out.capped[v] = 1;
    } else {
      if (!ca) hi = std::min(hi, ra.hi + rb.lo);
      if (!cb) hi = std::min(hi, rb.hi + ra.lo);
    }
    if (lo > hi)
      throw BudgetError("series_mul: exact window for " + vs[v] + " is empty (" +
                        std::to_string(lo) + " > " + std::to_string(hi) + ")");
    r[v] = Range{lo, hi};
  }
  out.window = Window(std::move(r));
  std::vector<int> e(vs.size());
  for (const auto& [ea, cca] : a.coeffs) {
    for (const auto& [eb, ccb] : b.coeffs) {
      bool inside = true;
      for (size_t v = 0; v < vs.size(); ++v) {
        e[v] = ea[v] + eb[v];
        if (!out.window[v].contains(e[v])) {
          inside = false;
          break;
        }
      }
      if (inside) out.add_to(e, coeff_mul(cca, ccb));
    }
  }
  return out;
}

// Substitute var_from -> var_base + var_new, expanding by the generalized
// binomial theorem through nonnegative powers of var_new:
//   var_from^n  |->  sum_k binom(n,k) var_base^{n-k} var_new^k.
//
// The result is the truncation of that expansion to var_new-degree <= budget
// (relative to pre-existing var_new content, which shifts the degree count):
// a genuine formal object whose box and certificates describe the truncation.
// It agrees with the untruncated substitution on every exponent whose
// var_new-degree the budget covers, and the new variable is left uncapped so
// degrees beyond the budget read as unknown rather than as the truncation's
// zeros.  Callers size the budget to cover every degree they read.
//
// var_base and var_new may each be fresh or already present; var_from and
// var_base (when present) must be floored.  The substituted variable leaves
// the list, a fresh base variable takes its slot, and a fresh new variable
// joins at the end.
template <class C>
Series<C> taylor_substitute(const Series<C>& s0, const std::string& var_from,
                            const std::string& var_base, const std::string& var_new,
                            int budget) {
  if (budget < 0) throw InputError("taylor_substitute: negative budget");
  if (var_from == var_base || var_from == var_new || var_base == var_new)
    throw InputError("taylor_substitute: variables must be distinct");
  if (!s0.has_var(var_from)) throw InputError("taylor_substitute: unknown source variable");

  // Normalize: inject missing base/new variables with certified exponent 0,
  // keeping the original order and appending fresh ones (base first).
  std::vector<std::string> vs = s0.vars;
  if (std::find(vs.begin(), vs.end(), var_base) == vs.end()) {
    // A fresh base takes the slot of the substituted variable.
    vs[s0.var_index(var_from)] = var_base;
    vs.insert(vs.begin() + s0.var_index(var_from), var_from);
  }
  if (std::find(vs.begin(), vs.end(), var_new) == vs.end()) vs.push_back(var_new);
  Series<C> s = detail::with_vars(s0, vs);

  const int vf = s.var_index(var_from);
  const int vb = s.var_index(var_base);
  const int vn = s.var_index(var_new);
  if (!s.floored[vf] || !s.floored[vb])
    throw InputError("taylor_substitute: operand must be bounded below in source and base variables");

  const Range rf = s.window[vf], rb = s.window[vb], rn = s.window[vn];
  const bool cap_base_out = s.capped[vf] && s.capped[vb];

  std::vector<std::string> ovs;
  std::vector<Range> r;
  std::vector<char> fl, cp;
  for (int v = 0; v < s.nvars(); ++v) {
    if (v == vf) continue;
    ovs.push_back(s.vars[v]);
    if (v == vb) {
      int lo = rf.lo + rb.lo - budget;
      int hi;
      if (cap_base_out) {
        hi = rf.hi + rb.hi;
      } else {
        constexpr int kInf = std::numeric_limits<int>::max() / 4;
        hi = std::min(s.capped[vf] ? kInf : rf.hi + rb.lo,
                      s.capped[vb] ? kInf : rb.hi + rf.lo) -
             budget;
      }
      if (lo > hi)
        throw BudgetError("taylor_substitute: exact window for " + var_base +
                          " is empty at budget " + std::to_string(budget));
      r.push_back(Range{lo, hi});
      fl.push_back(1);
      cp.push_back(cap_base_out ? 1 : 0);
    } else if (v == vn) {
      // Pre-existing var_new content shifts the added degree; knowledge above
      // caps out at hi + 0 unless the operand is capped there, and below at
      // lo + budget unless it is floored.
      r.push_back(Range{s.floored[vn] ? rn.lo : rn.lo + budget,
                        s.capped[vn] ? rn.hi + budget : rn.hi});
      fl.push_back(s.floored[vn]);
      cp.push_back(0);
    } else {
      r.push_back(s.window[v]);
      fl.push_back(s.floored[v]);
      cp.push_back(s.capped[v]);
    }
  }

  Series<C> out;
  out.vars = std::move(ovs);
  out.window = Window(std::move(r));
  out.floored = std::move(fl);
  out.capped = std::move(cp);

  const int ob = out.var_index(var_base);
  const int on = out.var_index(var_new);
  for (const auto& [e, c] : s.coeffs) {
    const int n = e[vf];
    std::vector<int> e2;
    e2.reserve(out.nvars());
    for (int v = 0; v < s.nvars(); ++v)
      if (v != vf) e2.push_back(e[v]);
    Scalar binom(1);
    for (int k = 0; k <= budget; ++k) {
      if (k > 0) {
        binom = binom * Scalar(mpq_class(n - k + 1) / k);
        if (binom.is_zero()) break;  // nonnegative n: expansion terminates
      }
      e2[ob] = e[vb] + n - k;
      e2[on] = e[vn] + k;
      if (out.window.contains(e2)) out.add_to(e2, coeff_scale(c, binom));
    }
  }
  return out;
}

// First exponent in `box` (aligned with the merged variable list, a's order
// first) where the two series disagree; raises if either side is unknown
// somewhere in the box before a difference is found.
template <class C>
std::optional<std::vector<int>> first_difference(const Series<C>& a0, const Series<C>& b0,
                                                 const Window& box) {
  auto vs = detail::merged_vars(a0.vars, b0.vars);
  Series<C> a = detail::with_vars(a0, vs);
  Series<C> b = detail::with_vars(b0, vs);
  if (box.size() != static_cast<int>(vs.size()))
    throw InputError("first_difference: box arity mismatch");
  std::vector<int> e(vs.size());
  for (int v = 0; v < static_cast<int>(vs.size()); ++v) e[v] = box[v].lo;
  while (true) {
    if (!(a.coeff(e) == b.coeff(e))) return e;
    int v = static_cast<int>(vs.size()) - 1;
    while (v >= 0 && e[v] == box[v].hi) {
      e[v] = box[v].lo;
      --v;
    }
    if (v < 0) return std::nullopt;
    ++e[v];
  }
}

template <class C>
bool equal_on(const Series<C>& a, const Series<C>& b, const Window& box) {
  return !first_difference(a, b, box).has_value();
}

using ScalarSeries = Series<Scalar>;

}  // namespace qvc
