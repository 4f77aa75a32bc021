#include "qvc/axioms.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qvc/braiding.hpp"
#include "qvc/delta.hpp"
#include "qvc/errors.hpp"
#include "qvc/iota.hpp"

namespace qvc {

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    default: return "inconclusive";
  }
}

namespace {

std::string basis_str(const BasisRef& w) {
  return "(" + std::to_string(w.first) + ", " + w.second + ")";
}

// ---------------------------------------------------------------------------
// Cellwise comparison of two vector-valued series over a box.  A cell decides
// the verdict only where both sides are in budget; a disagreement among the
// known components of a tainted cell still witnesses failure.
// ---------------------------------------------------------------------------

struct ScanOutcome {
  std::optional<AxiomWitness> witness;
  int skipped = 0;
};

ScanOutcome scan_box(const Series<SpaceVector>& L, const Series<SpaceVector>& R,
                     const std::vector<std::string>& vars, const Window& box,
                     const BasisRef& tv) {
  Series<SpaceVector> l = detail::with_vars(L, vars);
  Series<SpaceVector> r = detail::with_vars(R, vars);
  ScanOutcome out;
  const int n = static_cast<int>(vars.size());
  std::vector<int> e(n);
  for (int i = 0; i < n; ++i) e[i] = box[i].lo;
  while (true) {
    bool decided_whole_cell = true;
    try {
      const SpaceVector da = l.coeff(e);
      const SpaceVector db = r.coeff(e);
      const SpaceVector d = da - db;
      const int cut = d.unknown_from;
      for (const auto& [key, c] : d.comps) {
        if (key.first >= cut || c.is_zero()) continue;
        AxiomWitness wit;
        wit.vars = vars;
        wit.exponent = e;
        wit.test_vector = tv;
        wit.degree = key.first;
        wit.label = key.second;
        wit.lhs = da.component(key.first, key.second);
        wit.rhs = db.component(key.first, key.second);
        out.witness = wit;
        return out;
      }
      if (d.tainted()) decided_whole_cell = false;
    } catch (const BudgetError&) {
      decided_whole_cell = false;
    }
    if (!decided_whole_cell) ++out.skipped;
    int i = n - 1;
    while (i >= 0 && e[i] == box[i].hi) e[i--] = box[i].lo;
    if (i < 0) break;
    ++e[i];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Operator-product modes as a two-variable series sum_n (mode_n w) x0^{-n-1}
// on r0 x rx.  The x0 floor is genuine because modes at or above vanish_from
// are identically zero; the caller must pass r0.lo <= -vanish_from.  A mode
// whose materialization exceeds its table's budget becomes a row of tainted
// cells (and forfeits the x-direction certificates).
// ---------------------------------------------------------------------------

Series<SpaceVector> mode_series(const std::map<int, QuantumField>& modes,
                                int vanish_from, const BasisRef& w, Range r0,
                                Range rx, const std::string& x0v,
                                const std::string& xv) {
  if (r0.lo > -vanish_from)
    throw InputError("mode_series: x0 floor does not certify the vanishing tail");
  struct Row {
    int e0;
    std::optional<Series<SpaceVector>> ap;
  };
  std::vector<Row> rows;
  int xlo = rx.lo;
  bool fl = true, cp = true;
  for (int e0 = r0.lo; e0 <= r0.hi; ++e0) {
    const int nmode = -e0 - 1;
    if (nmode >= vanish_from) continue;  // certified-zero row
    auto it = modes.find(nmode);
    if (it == modes.end())
      throw BudgetError("mode_series: operator-product table lacks mode " +
                        std::to_string(nmode));
    Row row{e0, std::nullopt};
    try {
      const int lb = it->second.lower_bound(w.first);
      auto ap = field_apply(it->second, SpaceVector::unit(w.first, w.second), xv,
                            Range{std::min(rx.lo, lb), rx.hi});
      xlo = std::min(xlo, ap.window[0].lo);
      fl = fl && ap.floored[0] != 0;
      cp = cp && ap.capped[0] != 0;
      row.ap = std::move(ap);
    } catch (const BudgetError&) {
      fl = cp = false;
    }
    rows.push_back(std::move(row));
  }
  Series<SpaceVector> out({x0v, xv},
                          Window(std::vector<Range>{r0, Range{xlo, rx.hi}}));
  out.floored[0] = 1;  // modes below the window vanish by vanish_from
  out.floored[1] = fl ? 1 : 0;
  out.capped[1] = cp ? 1 : 0;
  for (const Row& row : rows) {
    if (!row.ap) {
      for (int e = rx.lo; e <= rx.hi; ++e)
        out.set({row.e0, e}, SpaceVector::unknown_above(0));
      continue;
    }
    for (const auto& [e, c] : row.ap->coeffs) out.set({row.e0, e[0]}, c);
  }
  return out;
}

// ---------------------------------------------------------------------------
// x1 -> x0 + x2 on an iterated composite, expanded through nonnegative powers
// of x2:  out(e0, e2) = sum_{k=0}^{e2-f2} binom(e0+k, k) comp(e0+k, e2-k),
// finite because f2 is a genuine x2 support floor of comp.  Reads stay inside
// comp's box when it covers x1 in [s0.lo, s0.hi + (s2.hi - f2)] and x2 in
// [f2, s2.hi].  No direction certificates are claimed: the result is exactly
// the requested box.
// ---------------------------------------------------------------------------

Series<SpaceVector> binomial_substitute(const Series<SpaceVector>& comp,
                                        const std::string& x1v,
                                        const std::string& x2v, int f2, Range s0,
                                        Range s2, const std::string& x0v) {
  const int i1 = comp.var_index(x1v);
  const int i2 = comp.var_index(x2v);
  Series<SpaceVector> out({x0v, x2v}, Window(std::vector<Range>{s0, s2}));
  std::vector<int> re(comp.nvars(), 0);
  for (int e0 = s0.lo; e0 <= s0.hi; ++e0) {
    for (int e2 = s2.lo; e2 <= s2.hi; ++e2) {
      SpaceVector acc;
      for (int k = 0; k <= e2 - f2; ++k) {
        const mpq_class bc = generalized_binom(e0 + k, k);
        if (bc == 0) continue;
        re[i1] = e0 + k;
        re[i2] = e2 - k;
        acc = acc + comp.coeff(re).scaled(Scalar(bc));
      }
      if (!coeff_trivial(acc)) out.set({e0, e2}, acc);
    }
  }
  return out;
}

// The least mode index from which every operator-product mode vanishes, read
// off the re-expansion of 1/p(x2+x0, x2) with x2 outermost.
int product_vanish_bound(const MPoly& p) {
  std::map<std::string, MPoly> repl;
  repl["x1"] = MPoly::variable("x2") + MPoly::variable("x0");
  repl["x2"] = MPoly::variable("x2");
  const MPoly den = p.substituted(repl);
  const IotaSeries ev(RationalFunction(MPoly(1L), den), {"x2", "x0"});
  const auto fb = ev.floor_bound(1);
  if (!fb) throw BudgetError("operator product: expansion admits no mode floor");
  return -*fb;
}

// A clearing certificate for (a, b) on a window deep enough to reach the
// honest support floors seen from the test vector; the probe over b's columns
// is best-effort and partial knowledge only deepens the window.  The ceiling
// mirrors the floor so an escape staircase of slope -1 through the corner
// cannot outrun the compatibility probe.
CompatibilityCertificate pick_certificate(const QuantumField& a,
                                          const QuantumField& b,
                                          const BasisRef& w, Range base) {
  const int d = w.first;
  int lo = std::min(base.lo, b.lower_bound(d));
  try {
    constexpr int kProbeOvershoot = 6;  // max clearing degree searched below
    const int phi = base.hi + kProbeOvershoot;
    auto cols = field_apply(b, SpaceVector::unit(d, w.second), "x2",
                            Range{std::min(b.lower_bound(d), phi), phi});
    for (const auto& [e, c] : cols.coeffs)
      for (const auto& [key, s] : c.comps)
        if (key.first < c.unknown_from) lo = std::min(lo, a.lower_bound(key.first));
  } catch (const BudgetError&) {
  }
  const int hi = std::max(base.hi, -lo);
  const Window cw(std::vector<Range>{Range{lo, hi}, Range{lo, hi}});
  return search_compat_poly(a, b, cw, {w}, default_root_candidates(), 6);
}

// ---------------------------------------------------------------------------
// Shared engine for the clearing identities
//   pm(x0, x2) a(x0 + x2) b(x2) w == pm(x0, x2) (ab)(x0, x2) w
// with pm a nonzero polynomial multiplier in (x0, x2) and the left binomials
// expanded in nonnegative powers of x2.
// ---------------------------------------------------------------------------

AxiomReport assoc_like(const std::string& axiom, const QuantumField& a,
                       const QuantumField& b, const BasisRef& w,
                       const MPoly& pm, const std::string& params,
                       const Window& window, const YeProduct* product) {
  AxiomReport rep;
  rep.axiom = axiom;
  rep.subjects = "a = " + a.name + ", b = " + b.name + ", w = " + basis_str(w);
  rep.params = params;
  rep.window = window;
  if (pm.is_zero()) throw InputError(axiom + ": zero clearing multiplier");
  for (const std::string& v : pm.vars())
    if (v != "x0" && v != "x2")
      throw InputError(axiom + ": multiplier must live in x0, x2");
  if (window.size() != 2) throw InputError(axiom + ": window must cover (x0, x2)");
  const Range t0 = window[0], t2 = window[1];
  const int d = w.first;
  try {
    const int D0 = std::max(pm.degree("x0"), 0), m0 = pm.min_degree("x0");
    const int D2 = std::max(pm.degree("x2"), 0), m2 = pm.min_degree("x2");
    const Range s0{t0.lo - D0, t0.hi - m0};
    const Range s2{t2.lo - D2, t2.hi - m2};
    const auto pms = pm.to_series({"x0", "x2"});

    // Left side: iterated composite, substituted and cleared.
    const int f2 = b.lower_bound(d);
    const Range r2A{f2, std::max(s2.hi, f2)};
    const Range r1A{s0.lo, s0.hi + std::max(0, s2.hi - f2)};
    auto comp = field_compose(a, b, SpaceVector::unit(d, w.second), "x1", "x2",
                              r1A, r2A);
    auto lhs = mul(pms, binomial_substitute(comp, "x1", "x2", f2, s0, s2, "x0"));

    // Right side: the operator product's modes, cleared by the same
    // multiplier.  The x0 floor of the mode series is the vanishing tail.
    int vanish = 0;
    const std::map<int, QuantumField>* modes = nullptr;
    YeProduct derived;
    if (product) {
      if (std::find(product->covered.begin(), product->covered.end(), w) ==
          product->covered.end()) {
        rep.note = "supplied product table does not cover " + basis_str(w);
        return rep;
      }
      vanish = product->vanish_from;
      modes = &product->modes;
    } else {
      auto cert = pick_certificate(
          a, b, w, Range{std::min(t0.lo, t2.lo), std::max(t0.hi, t2.hi)});
      if (!cert.pass) {
        rep.note = "no compatibility certificate within budget; " + cert.note;
        return rep;
      }
      vanish = product_vanish_bound(cert.p);
      const int lo0 = std::min(s0.lo, -vanish);
      derived = ye_product(a, b, cert, -s0.hi - 1, -lo0 - 1,
                           Range{s2.lo, s2.hi}, {w});
      vanish = derived.vanish_from;
      modes = &derived.modes;
    }
    const int lo0R = std::min(s0.lo, -vanish);
    auto R = mode_series(*modes, vanish, w, Range{lo0R, s0.hi},
                         Range{s2.lo, s2.hi}, "x0", "x2");
    auto rhs = mul(pms, R);

    auto sc = scan_box(lhs, rhs, {"x0", "x2"}, window, w);
    rep.skipped_cells = sc.skipped;
    if (sc.witness) {
      rep.verdict = Verdict::Fail;
      rep.witness = sc.witness;
    } else {
      rep.verdict = Verdict::Pass;
      if (sc.skipped)
        rep.note = std::to_string(sc.skipped) + " cell(s) out of budget";
    }
  } catch (const BudgetError& e) {
    rep.verdict = Verdict::Inconclusive;
    rep.note = e.what();
  }
  return rep;
}

MPoly clearing_power(int l) {
  return (MPoly::variable("x0") + MPoly::variable("x2")).pow(l);
}

}  // namespace

AxiomReport weak_assoc_check(const QuantumField& a, const QuantumField& b,
                             const BasisRef& w, std::optional<int> l,
                             const Window& window, const YeProduct* product) {
  if (l) {
    if (*l < 0) throw InputError("weak_assoc_check: negative clearing exponent");
    return assoc_like("weak associativity", a, b, w, clearing_power(*l),
                      "l = " + std::to_string(*l), window, product);
  }
  constexpr int kMaxClearing = 6;
  AxiomReport last;
  for (int k = 0; k <= kMaxClearing; ++k) {
    last = assoc_like("weak associativity", a, b, w, clearing_power(k),
                      "l = " + std::to_string(k) + " (searched)", window,
                      product);
    if (last.verdict == Verdict::Pass) return last;
  }
  last.verdict = Verdict::Inconclusive;
  last.note = "no clearing exponent up to " + std::to_string(kMaxClearing) +
              " settled the identity; exhaustion is not a refutation" +
              (last.note.empty() ? "" : "; last: " + last.note);
  last.witness.reset();
  return last;
}

AxiomReport quasi_module_check(const QuantumField& a, const QuantumField& b,
                               const BasisRef& w, const MPoly& p,
                               const Window& window, const YeProduct* product) {
  if (p.is_zero()) throw InputError("quasi_module_check: zero multiplier");
  for (const std::string& v : p.vars())
    if (v != "x1" && v != "x2")
      throw InputError("quasi_module_check: multiplier must live in x1, x2");
  std::map<std::string, MPoly> repl;
  repl["x1"] = MPoly::variable("x0") + MPoly::variable("x2");
  repl["x2"] = MPoly::variable("x2");
  return assoc_like("quasi-module clearing", a, b, w, p.substituted(repl),
                    "p = " + p.str(), window, product);
}

AxiomReport ct_linearity_check(const QuantumField& a, const QuantumField& b,
                               const Series<Scalar>& f, const Series<Scalar>& g,
                               const Window& window,
                               const std::vector<BasisRef>& test_vectors) {
  if (f.nvars() != 1 || g.nvars() != 1)
    throw InputError("ct_linearity_check: multipliers must be one-variable");
  if (!f.floored[0] || !f.capped[0] || !g.floored[0] || !g.capped[0])
    throw InputError(
        "ct_linearity_check: multipliers need certificates on both sides");
  if (window.size() != 2)
    throw InputError("ct_linearity_check: window must cover (x, x0)");
  if (test_vectors.empty())
    throw InputError("ct_linearity_check: no test vectors");
  const Range rx = window[0], r0 = window[1];
  AxiomReport rep;
  rep.axiom = "scalar-series linearity of the operator product";
  rep.subjects = "a = " + a.name + ", b = " + b.name;
  rep.params = "f = " + f.str() + ", g = " + g.str();
  rep.window = window;
  rep.verdict = Verdict::Pass;
  const Range hull{std::min(rx.lo, r0.lo), std::max(rx.hi, r0.hi)};
  for (const BasisRef& w : test_vectors) {
    try {
      // Left: the product of the rescaled fields.
      const QuantumField fa = ct_action(f, a);
      const QuantumField gb = ct_action(g, b);
      auto cert1 = pick_certificate(fa, gb, w, hull);
      if (!cert1.pass) {
        rep.verdict = Verdict::Inconclusive;
        rep.note = "no certificate for the rescaled pair; " + cert1.note;
        continue;
      }
      const int lo0L = std::min(r0.lo, -product_vanish_bound(cert1.p));
      auto ye1 = ye_product(fa, gb, cert1, -r0.hi - 1, -lo0L - 1, rx, {w});
      auto L = mode_series(ye1.modes, ye1.vanish_from, w,
                           Range{std::min(lo0L, -ye1.vanish_from), r0.hi}, rx,
                           "x0", "x");

      // Right: the plain product, rescaled afterwards.  f(t + x) expands
      // through nonnegative powers of x0 to the depth the x0 window needs.
      auto cert2 = pick_certificate(a, b, w, hull);
      if (!cert2.pass) {
        rep.verdict = Verdict::Inconclusive;
        rep.note = "no certificate for the plain pair; " + cert2.note;
        continue;
      }
      const int lo0R = std::min(r0.lo, -product_vanish_bound(cert2.p));
      const int B = r0.hi - lo0R;
      const int flo = f.window[0].lo;
      const Range rx2{rx.lo - flo, rx.hi - flo + B};
      auto ye2 = ye_product(a, b, cert2, -r0.hi - 1, -lo0R - 1, rx2, {w});
      std::map<int, QuantumField> gm;
      for (const auto& [nmode, fld] : ye2.modes) gm[nmode] = ct_action(g, fld);
      auto R0 = mode_series(gm, ye2.vanish_from, w,
                            Range{std::min(lo0R, -ye2.vanish_from), r0.hi}, rx2,
                            "x0", "x");
      auto fshift = taylor_substitute(f, f.vars[0], "x", "x0", B);
      auto rhs = mul(fshift, R0);

      auto sc = scan_box(L, rhs, {"x", "x0"}, window, w);
      rep.skipped_cells += sc.skipped;
      if (sc.witness) {
        rep.verdict = Verdict::Fail;
        rep.witness = sc.witness;
        return rep;
      }
    } catch (const BudgetError& e) {
      rep.verdict = Verdict::Inconclusive;
      rep.note = e.what();
    }
  }
  if (rep.verdict == Verdict::Pass && rep.skipped_cells)
    rep.note = std::to_string(rep.skipped_cells) + " cell(s) out of budget";
  return rep;
}

AxiomReport vecC_module_check(const QuantumField& v, const Series<Scalar>& f,
                              const BasisRef& w, const Range& r) {
  if (f.nvars() != 1 || !f.floored[0])
    throw InputError("vecC_module_check: multiplier must be bounded below");
  AxiomReport rep;
  rep.axiom = "scalar-series module law";
  rep.subjects = "v = " + v.name + ", w = " + basis_str(w);
  rep.params = "f = " + f.str();
  rep.window = Window(std::vector<Range>{r});
  const int d = w.first;
  try {
    auto lhs = field_apply(ct_action(f, v), SpaceVector::unit(d, w.second),
                           "x0", r);
    const int flo = f.window[0].lo;
    const Range r2{std::min(r.lo - flo, v.lower_bound(d)), r.hi - flo};
    auto ap = field_apply(v, SpaceVector::unit(d, w.second), "x0", r2);
    auto rhs = mul(f.renamed(f.vars[0], "x0"), ap);
    auto sc = scan_box(lhs, rhs, {"x0"}, rep.window, w);
    rep.skipped_cells = sc.skipped;
    if (sc.witness) {
      rep.verdict = Verdict::Fail;
      rep.witness = sc.witness;
    } else {
      rep.verdict = Verdict::Pass;
      if (sc.skipped)
        rep.note = std::to_string(sc.skipped) + " cell(s) out of budget";
    }
  } catch (const BudgetError& e) {
    rep.verdict = Verdict::Inconclusive;
    rep.note = e.what();
  }
  return rep;
}

AxiomReport vecCt_module_check(const QuantumField& v, const Series<Scalar>& f,
                               const Series<Scalar>& g, const SpaceVector& w,
                               const Range& r) {
  if (!v.space) throw InputError("vecCt_module_check: field carries no space");
  if (f.nvars() != 1 || !f.floored[0] || !f.capped[0] || g.nvars() != 1 ||
      !g.floored[0] || !g.capped[0])
    throw InputError(
        "vecCt_module_check: multipliers need certificates on both sides");
  AxiomReport rep;
  rep.axiom = "windowed-series module law";
  rep.subjects = "v = " + v.name + ", w = " + w.str();
  rep.params = "f = " + f.str() + ", g = " + g.str();
  rep.window = Window(std::vector<Range>{r});
  const GradedSpace& sp = *v.space;
  const BasisRef tv{0, "(vector)"};
  try {
    // Left: the shifted f-action on v, applied to g(t) w.
    auto lhs = field_apply(ct1_action(f, v), t_multiply(g, w, sp), "x0", r);

    // Right: f(t + x0) g(t) (v(x0) w), the g-action cellwise and the shifted
    // f-action expanded against the genuine x0 floor.
    int lbw = r.lo;
    for (const auto& [key, c] : w.comps)
      lbw = std::min(lbw, v.lower_bound(key.first));
    auto s0 = field_apply(v, w, "x0", Range{lbw, r.hi});
    if (!s0.floored[0])
      throw BudgetError(
          "vecCt_module_check: no certified x0 floor for the composite");
    Series<SpaceVector> s1 = s0;
    s1.coeffs.clear();
    for (const auto& [e, c] : s0.coeffs) {
      auto gc = t_multiply(g, c, sp);
      if (!coeff_trivial(gc)) s1.set(e, gc);
    }
    Series<SpaceVector> rhs({"x0"}, Window(std::vector<Range>{r}));
    const int s1lo = s1.window[0].lo;
    for (int e = r.lo; e <= r.hi; ++e) {
      SpaceVector acc;
      bool cell_ok = true;
      for (int j = 0; j <= e - s1lo && cell_ok; ++j) {
        const SpaceVector base = s1.coeff({e - j});
        if (coeff_trivial(base)) continue;
        for (const auto& [fe, fc] : f.coeffs) {
          if (fc.is_zero()) continue;
          const mpq_class bc = generalized_binom(fe[0], j);
          if (bc == 0) continue;
          try {
            acc = acc + t_shift_vector(base, fe[0] - j, sp).scaled(fc * Scalar(bc));
          } catch (const BudgetError&) {
            cell_ok = false;
            break;
          }
        }
      }
      if (!cell_ok)
        rhs.set({e}, SpaceVector::unknown_above(0));
      else if (!coeff_trivial(acc))
        rhs.set({e}, acc);
    }
    auto sc = scan_box(lhs, rhs, {"x0"}, rep.window, tv);
    rep.skipped_cells = sc.skipped;
    if (sc.witness) {
      rep.verdict = Verdict::Fail;
      rep.witness = sc.witness;
    } else {
      rep.verdict = Verdict::Pass;
      if (sc.skipped)
        rep.note = std::to_string(sc.skipped) + " cell(s) out of budget";
    }
  } catch (const BudgetError& e) {
    rep.verdict = Verdict::Inconclusive;
    rep.note = e.what();
  }
  return rep;
}

namespace {

// f(x + x1, x + x2) when it is a polynomial up to a constant denominator.
std::optional<MPoly> shifted_coefficient(const RationalFunction& f) {
  std::map<std::string, MPoly> repl;
  repl["x1"] = MPoly::variable("x") + MPoly::variable("x1");
  repl["x2"] = MPoly::variable("x") + MPoly::variable("x2");
  RationalFunction rf(f.num().substituted(repl), f.den().substituted(repl));
  if (!rf.den().is_constant()) return std::nullopt;
  const Scalar c = rf.den().terms().begin()->second;
  return rf.num().scaled(Scalar(1) / c);
}

}  // namespace

AxiomReport jacobi_check(const QuantumField& a, const QuantumField& b,
                         const SMapData& sdata, const Window& window,
                         const std::vector<BasisRef>& test_vectors) {
  sdata.validate();
  if (window.size() != 3)
    throw InputError("jacobi_check: window must cover (x0, x1, x2)");
  if (test_vectors.empty()) throw InputError("jacobi_check: no test vectors");
  const auto* terms = sdata.find(a.name, b.name);
  if (!terms)
    throw InputError("jacobi_check: no braiding datum for (" + a.name + ", " +
                     b.name + ")");
  const Range t0 = window[0], t1 = window[1], t2 = window[2];

  AxiomReport rep;
  rep.axiom = "three-term kernel identity";
  rep.subjects = "a = " + a.name + ", b = " + b.name;
  {
    std::ostringstream ps;
    ps << terms->size() << " braiding term(s); algebra variable realized as x";
    rep.params = ps.str();
  }
  rep.window = window;

  // Braiding coefficients shifted by the algebra variable; each must expand
  // to a polynomial up to a constant denominator.
  struct BTerm {
    const QuantumField* u;
    const QuantumField* v;
    MPoly m;
  };
  std::vector<BTerm> bts;
  int xhi = 0;
  for (const STerm& t : *terms) {
    auto m = shifted_coefficient(t.f);
    if (!m) {
      rep.verdict = Verdict::Inconclusive;
      rep.note =
          "braiding coefficient with nonconstant denominator exceeds the "
          "polynomial expansion budget";
      return rep;
    }
    bts.push_back(
        BTerm{&sdata.fields.at(t.u_label), &sdata.fields.at(t.v_label), *m});
    xhi = std::max(xhi, std::max(m->degree("x"), 0));
  }
  const std::vector<std::string> vars4{"x", "x0", "x1", "x2"};
  const Window target4(std::vector<Range>{Range{0, xhi}, t0, t1, t2});
  const std::array<std::string, 3> kvars{"x0", "x1", "x2"};

  rep.verdict = Verdict::Pass;
  for (const BasisRef& w : test_vectors) {
    try {
      const int d = w.first;
      const SpaceVector unit = SpaceVector::unit(d, w.second);

      // First term: a(x1) b(x2) w against the difference kernel.  The x2
      // floor is b's; the x1 box floor is safe to assert because every
      // kernel split that could read below it pairs with a kernel cell whose
      // injected-variable read is certified zero.
      const int f2v = b.lower_bound(d);
      const Range r2A{f2v, std::max(t2.hi, f2v)};
      const Range r1A{t0.lo + t1.lo + 1,
                      t0.hi + t1.hi + 1 + std::max(0, t2.hi - f2v)};
      auto compA = field_compose(a, b, unit, "x1", "x2", r1A, r2A);
      compA.floored[compA.var_index("x1")] = 1;
      auto termA = kernel_mul(DeltaKind::JacobiPlus, kvars, compA, vars4, target4);

      // Second term: the braiding replaces a(x1) b(x2) by
      // sum_i f_i(x+x1, x+x2) b_i(x2) a_i(x1), read against the reflected
      // kernel.  The x2 box floor is asserted on the same grounds.
      std::optional<Series<SpaceVector>> bsum;
      if (!bts.empty()) {
        int lo1B = t1.lo;
        for (const BTerm& t : bts) lo1B = std::min(lo1B, t.u->lower_bound(d));
        const int tlo2 = t0.lo + t2.lo + 1;
        const int thi2 = t0.hi + t2.hi + 1 + std::max(0, t1.hi - lo1B);
        int d2m = 0;
        for (const BTerm& t : bts) d2m = std::max(d2m, std::max(t.m.degree("x2"), 0));
        const Range r1B{lo1B, std::max(t1.hi, lo1B)};
        const Range r2B{tlo2 - d2m, std::max(thi2, tlo2 - d2m)};
        for (const BTerm& t : bts) {
          auto comp = field_compose(*t.v, *t.u, unit, "x2", "x1", r2B, r1B);
          comp.floored[comp.var_index("x2")] = 1;
          auto p = mul(t.m.to_series({"x", "x1", "x2"}), comp);
          bsum = bsum ? add(*bsum, p) : std::move(p);
        }
      }
      Series<SpaceVector> lhs =
          bsum ? sub(termA,
                     kernel_mul(DeltaKind::JacobiMinus, kvars, *bsum, vars4,
                                target4))
               : termA;

      // Third term: the operator product against the iterate kernel; its
      // floors are genuine (vanishing tail in x0, per-mode floors in x2).
      auto cert = pick_certificate(
          a, b, w,
          Range{std::min({t0.lo, t1.lo, t2.lo}), std::max({t0.hi, t1.hi, t2.hi})});
      if (!cert.pass) {
        rep.verdict = Verdict::Inconclusive;
        rep.note = "no compatibility certificate within budget; " + cert.note;
        continue;
      }
      const int vanish = product_vanish_bound(cert.p);
      const int lo0C = std::min(t0.lo, -vanish);
      const int hi2C = t0.hi + t1.hi + t2.hi + 1 - lo0C;
      auto yp = ye_product(a, b, cert, -t0.hi - 1, -lo0C - 1,
                           Range{t2.lo, std::max(hi2C, t2.lo)}, {w});
      auto R = mode_series(yp.modes, yp.vanish_from, w,
                           Range{std::min(lo0C, -yp.vanish_from), t0.hi},
                           Range{t2.lo, std::max(hi2C, t2.lo)}, "x0", "x2");
      auto termC = kernel_mul(DeltaKind::Iterate, kvars, R, vars4, target4);

      auto sc = scan_box(lhs, termC, vars4, target4, w);
      rep.skipped_cells += sc.skipped;
      if (sc.witness) {
        rep.verdict = Verdict::Fail;
        rep.witness = sc.witness;
        return rep;
      }
    } catch (const BudgetError& e) {
      rep.verdict = Verdict::Inconclusive;
      rep.note = e.what();
    }
  }
  if (rep.verdict == Verdict::Pass && rep.skipped_cells)
    rep.note = std::to_string(rep.skipped_cells) + " cell(s) out of budget";
  return rep;
}

}  // namespace qvc
