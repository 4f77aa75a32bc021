#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qvc/ratfun.hpp"
#include "qvc/series.hpp"

namespace qvc {

// Expansion of a rational function inside the iterated Laurent field
// C((v1))((v2))...((vr)), where the LAST variable of `order` is the outermost
// Laurent variable (equivalently: denominators are inverted through
// nonnegative powers of the later variables wherever possible).
//
// Coefficients are produced on demand from the defining relation den * B = 1,
// solved along the tower ordering (compare exponents from the last variable
// down).  Writing mu for the tower-least denominator monomial, the support of
// B lies in -mu + Cone(m - mu : m in den), and a family of linear functionals
// nonnegative on the cone generators certifies zeros outside it; this is what
// keeps the recursion finite and yields support bounds for products.
//
// The expansion of a given rational function depends on the variable order:
// the same input expanded under different orders differs exactly by the
// kernel phenomena the calculus is built around.
class IotaSeries {
 public:
  IotaSeries(const RationalFunction& f, std::vector<std::string> order,
             long node_budget = 2000000);

  const std::vector<std::string>& order() const { return order_; }
  int nvars() const { return static_cast<int>(order_.size()); }

  // Exact coefficient at the exponent tuple (aligned with order()).
  Scalar coeff(const std::vector<int>& e) const;

  // Certified support lower bound for variable v (order index), when the cone
  // admits one in that direction; nullopt otherwise.  Numerator shifts are
  // included.
  std::optional<int> floor_bound(int v) const;

  // Two-variable expansions only: a lower bound on the inner variable's
  // support exponent, valid whenever the outer variable's exponent is at most
  // outer_hi.  Returns nullopt when the slice is empty (everything zero).
  std::optional<int> inner_floor_bound(int outer_hi) const;

  // Box materialization; earns floor certificates where floor_bound covers
  // the requested range.
  Series<Scalar> materialize(const Window& w) const;

 private:
  std::vector<std::string> order_;
  std::vector<int> mu_;
  Scalar mu_coeff_;
  std::vector<std::pair<std::vector<int>, Scalar>> rest_;  // den terms except mu
  std::vector<std::pair<std::vector<int>, Scalar>> num_;
  std::vector<std::vector<int>> gens_;  // m - mu per rest_ entry
  // psi_[k]: functional (coefficients over variables) with psi(gen) >= 0 for
  // all generators, psi_[k][k] == 1 and support only at indices >= k.
  std::vector<std::vector<long>> psi_;
  std::vector<long> psi_at_minus_mu_;
  std::vector<int> num_min_;  // per-var numerator min degree

  mutable std::map<std::vector<int>, Scalar> memo_;
  mutable long nodes_ = 0;
  long node_budget_;

  bool certified_zero(const std::vector<int>& e) const;
  const Scalar& inv_coeff(const std::vector<int>& e) const;
};

// Exact product of an iota expansion with a windowed series on a target box.
// Splits are enumerated over the factor's stored support, with the expansion
// queried on demand; the target box is admissible only where the expansion's
// cone bounds rule out contributions from the factor's unknown region (beyond
// its caps), which is checked up front (BudgetError otherwise).  The factor
// must be floored in every expansion variable it shares.  Only expansions in
// at most two variables are supported (the inner-floor bound is what makes
// the escape analysis exact).
template <class C>
Series<C> iota_mul(const IotaSeries& ev, const Series<C>& g,
                   const std::vector<std::string>& target_vars, const Window& target) {
  if (ev.nvars() > 2) throw InputError("iota_mul: expansion has more than two variables");
  Series<C> gg = detail::with_vars(g, target_vars);
  gg.tighten();
  const int n = static_cast<int>(target_vars.size());
  if (target.size() != n) throw InputError("iota_mul: target arity mismatch");
  std::vector<int> evpos(ev.nvars(), -1);
  for (int j = 0; j < ev.nvars(); ++j) {
    evpos[j] = gg.var_index(ev.order()[j]);
    if (!gg.floored[evpos[j]])
      throw InputError("iota_mul: factor must be bounded below in " + ev.order()[j]);
  }

  // Escape analysis: contributions from factor exponents above an uncapped
  // window ceiling must be killed by the expansion's support bounds.
  const int vout = evpos.back();
  for (int j = 0; j < ev.nvars(); ++j) {
    const int v = evpos[j];
    if (gg.capped[v]) continue;
    std::optional<int> bound;
    if (j == ev.nvars() - 1) {
      bound = ev.floor_bound(j);
    } else {
      // Highest reachable outer level within the target box.
      const int level = target[vout].hi - gg.window[vout].lo;
      bound = ev.inner_floor_bound(level);
      if (!bound.has_value()) continue;  // empty slice: nothing contributes at all
    }
    if (!bound.has_value() || target[v].hi - gg.window[v].hi - 1 >= *bound)
      throw BudgetError("iota_mul: target box for " + target_vars[v] +
                        " is not certifiable against the factor's window");
  }
  // Non-expansion variables: splits are rigid there, so the factor must be
  // known on the whole target range.
  for (int v = 0; v < n; ++v) {
    bool is_ev = false;
    for (int j = 0; j < ev.nvars(); ++j)
      if (evpos[j] == v) is_ev = true;
    if (is_ev) continue;
    if ((target[v].lo < gg.window[v].lo && !gg.floored[v]) ||
        (target[v].hi > gg.window[v].hi && !gg.capped[v]))
      throw BudgetError("iota_mul: factor unknown on the target range of " + target_vars[v]);
  }

  Series<C> out;
  out.vars = target_vars;
  out.window = target;
  out.floored.assign(n, 0);
  out.capped.assign(n, 0);

  std::vector<int> E(n), s(ev.nvars());
  for (int v = 0; v < n; ++v) E[v] = target[v].lo;
  while (true) {
    C acc{};
    for (const auto& [t, tc] : gg.coeffs) {
      bool rigid_ok = true;
      for (int v = 0; v < n; ++v) {
        bool is_ev = false;
        for (int j = 0; j < ev.nvars(); ++j)
          if (evpos[j] == v) is_ev = true;
        if (!is_ev && t[v] != E[v]) {
          rigid_ok = false;
          break;
        }
      }
      if (!rigid_ok) continue;
      for (int j = 0; j < ev.nvars(); ++j) s[j] = E[evpos[j]] - t[evpos[j]];
      Scalar c = ev.coeff(s);
      if (!c.is_zero()) acc = coeff_add(acc, coeff_scale(tc, c));
    }
    if (!coeff_trivial(acc)) out.coeffs.emplace(E, std::move(acc));
    int v = n - 1;
    while (v >= 0 && E[v] == target[v].hi) {
      E[v] = target[v].lo;
      --v;
    }
    if (v < 0) break;
    ++E[v];
  }
  return out;
}

}  // namespace qvc
