#pragma once

#include <array>
#include <string>
#include <vector>

#include "qvc/series.hpp"

namespace qvc {

// binom(n, k) for arbitrary integer n and k >= 0 (0 for k < 0):
// n(n-1)...(n-k+1) / k!.
mpq_class generalized_binom(int n, int k);

// The three expansions of the delta-function kernels entering the Jacobi
// identity, as exact coefficient formulas on Z^3 in variable order
// (u0, u1, u2):
//   JacobiPlus   u0^{-1} d((u1-u2)/u0)   expanded through nonnegative powers
//                                        of u2: support has e2 >= 0;
//   JacobiMinus  u0^{-1} d((u2-u1)/-u0)  expanded through nonnegative powers
//                                        of u1: support has e1 >= 0;
//   Iterate      u2^{-1} d((u1-u0)/u2)   expanded through nonnegative powers
//                                        of u0: support has e0 >= 0.
// All three are homogeneous of total degree -1 and satisfy
//   JacobiPlus - JacobiMinus = Iterate.
enum class DeltaKind { JacobiPlus, JacobiMinus, Iterate };

// Exact coefficient of u0^{e0} u1^{e1} u2^{e2} in the chosen kernel.
Scalar delta_coeff(DeltaKind kind, int e0, int e1, int e2);

// Pinned variable index (the one whose support is bounded below by 0).
int delta_pinned_var(DeltaKind kind);

// Materialize a kernel on a box.  The window floor in the pinned variable is
// raised to 0 when the request reaches it (earning the floor certificate);
// other variables carry no certificates, as the support is unbounded there.
Series<Scalar> delta_kernel(DeltaKind kind, const std::array<std::string, 3>& vars,
                            const Window& w);

// Exact product of a delta kernel with a windowed series, on a caller-chosen
// target box.  The kernel's homogeneity (total degree -1 across its three
// variables) and pinned floor make each output coefficient a finite sum even
// though the kernel admits no box certificates; the factor must be floored in
// each kernel variable it shares.  Unknown factor coefficients needed by some
// split surface as BudgetError.
//
// target_vars must contain the three kernel variables and all of g's; g's
// coefficients at injected variables sit at exponent 0 as usual.
template <class C>
Series<C> kernel_mul(DeltaKind kind, const std::array<std::string, 3>& kvars,
                     const Series<C>& g, const std::vector<std::string>& target_vars,
                     const Window& target) {
  Series<C> gg = detail::with_vars(g, target_vars);
  gg.tighten();
  const int n = static_cast<int>(target_vars.size());
  if (target.size() != n) throw InputError("kernel_mul: target arity mismatch");
  std::array<int, 3> kv{};
  for (int j = 0; j < 3; ++j) kv[j] = gg.var_index(kvars[j]);
  for (int j = 0; j < 3; ++j)
    if (!gg.floored[kv[j]])
      throw InputError("kernel_mul: factor must be bounded below in " + kvars[j]);
  const int pin = delta_pinned_var(kind);
  // The two unpinned kernel variables, in kernel order.
  std::array<int, 2> free{};
  for (int j = 0, t = 0; j < 3; ++j)
    if (j != pin) free[t++] = j;

  Series<C> out;
  out.vars = target_vars;
  out.window = target;
  out.floored.assign(n, 0);
  out.capped.assign(n, 0);
  for (int v = 0; v < n; ++v) {
    bool is_kernel_var = (v == kv[0] || v == kv[1] || v == kv[2]);
    if (v == kv[pin]) {
      // Product support: kernel contributes >= 0, factor >= its floor.
      if (target[v].lo <= gg.window[v].lo) out.floored[v] = 1;
    } else if (!is_kernel_var) {
      if (gg.floored[v] && target[v].lo <= gg.window[v].lo) out.floored[v] = 1;
      if (gg.capped[v] && target[v].hi >= gg.window[v].hi) out.capped[v] = 1;
    }
  }

  std::vector<int> E(n), ge(n);
  for (int v = 0; v < n; ++v) E[v] = target[v].lo;
  while (true) {
    // Split E = e + g over kernel exponents e: g_pin ranges below E_pin, the
    // kernel's homogeneity pins e_a + e_b once e_pin is chosen, and the
    // factor's floors bound the remaining free exponent.
    C acc{};
    for (int gp = gg.window[kv[pin]].lo; gp <= E[kv[pin]]; ++gp) {
      const int ep = E[kv[pin]] - gp;
      const int sum_free = -1 - ep;  // e_a + e_b
      const int a = kv[free[0]], b = kv[free[1]];
      // g_a >= lo_a and g_b >= lo_b bound e_a into a finite range.
      const int ea_hi = E[a] - gg.window[a].lo;
      const int ea_lo = sum_free - (E[b] - gg.window[b].lo);
      for (int ea = ea_lo; ea <= ea_hi; ++ea) {
        const int eb = sum_free - ea;
        std::array<int, 3> ke{};
        ke[pin] = ep;
        ke[free[0]] = ea;
        ke[free[1]] = eb;
        Scalar kc = delta_coeff(kind, ke[0], ke[1], ke[2]);
        if (kc.is_zero()) continue;
        for (int v = 0; v < n; ++v) ge[v] = E[v];
        ge[a] = E[a] - ea;
        ge[b] = E[b] - eb;
        ge[kv[pin]] = gp;
        const C& gc = gg.coeff(ge);
        if (!coeff_trivial(gc)) acc = coeff_add(acc, coeff_scale(gc, kc));
      }
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

// Exact product of the two-variable scaled delta  d(c z / w) = sum_n c^n z^n w^{-n}
// with a series free of z.  The delta pins the z-split entirely, so each
// output coefficient is the single factor lookup at the shifted w-exponent:
//   (d(cz/w) g)(Ez, Ew, ...) = c^{Ez} g(Ew + Ez, ...).
template <class C>
Series<C> delta2_mul(const Scalar& c, const std::string& zvar, const std::string& wvar,
                     const Series<C>& g, const std::vector<std::string>& target_vars,
                     const Window& target) {
  if (g.has_var(zvar)) throw InputError("delta2_mul: factor must not involve " + zvar);
  Series<C> gg = detail::with_vars(g, target_vars);
  const int n = static_cast<int>(target_vars.size());
  if (target.size() != n) throw InputError("delta2_mul: target arity mismatch");
  const int vz = gg.var_index(zvar);
  const int vw = gg.var_index(wvar);

  Series<C> out;
  out.vars = target_vars;
  out.window = target;
  out.floored.assign(n, 0);
  out.capped.assign(n, 0);

  std::vector<int> E(n), ge(n);
  for (int v = 0; v < n; ++v) E[v] = target[v].lo;
  while (true) {
    for (int v = 0; v < n; ++v) ge[v] = E[v];
    ge[vz] = 0;
    ge[vw] = E[vw] + E[vz];
    const C& gc = gg.coeff(ge);
    if (!coeff_trivial(gc)) {
      C val = coeff_scale(gc, c.pow(E[vz]));
      if (!coeff_trivial(val)) out.coeffs.emplace(E, std::move(val));
    }
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
