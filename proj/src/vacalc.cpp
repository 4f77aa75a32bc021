#include "qvc/vacalc.hpp"

#include <algorithm>
#include <climits>
#include <set>
#include <tuple>

#include "qvc/series.hpp"

namespace qvc {

namespace {

// Certified support floor of a(x) on degree-d input, folding in the uniform
// bound when one exists.  Table-backed fields report a huge floor on degrees
// they do not store; reads there still refuse, so the floor is never trusted
// alone.
int floor_of(const QuantumField& f, int d) {
  int lb = f.lower_bound(d);
  if (f.uniform_lower) lb = std::max(lb, *f.uniform_lower);
  return lb;
}

bool any_tainted(const Series<SpaceVector>& s) {
  for (const auto& [e, v] : s.coeffs)
    if (v.tainted()) return true;
  return false;
}

std::string ref_str(const BasisRef& w) {
  return w.second + "@" + std::to_string(w.first);
}

std::string mode_field_name(const std::string& a, int n, const std::string& b) {
  return "(" + a + ")_{" + std::to_string(n) + "}(" + b + ")";
}

void append_note(std::string& dst, const std::string& more) {
  if (more.empty()) return;
  if (!dst.empty()) dst += "; ";
  dst += more;
}

// Identically-zero slice: empty with both certificates, so every exponent
// reads as exact zero.
Series<SpaceVector> zero_slice(Range r) {
  return Series<SpaceVector>::exact({"x"}, Window(std::vector<Range>{r}));
}

// The per-basis mode slices of Y_E(a, x0)b applied to one basis vector:
// clear with p, substitute x1 = x2 + x0, multiply by the re-expansion of
// 1/p(x2+x0, x2) with x2 outermost, and slice at each x0-exponent.
std::map<int, Series<SpaceVector>> ye_modes_for_label(
    const QuantumField& a, const QuantumField& b, const Series<Scalar>& ps,
    int p1min, int p2min, const IotaSeries& ev, int mu0, int n_lo, int n_hi,
    Range x_range, const BasisRef& ref) {
  const SpaceVector w = SpaceVector::unit(ref.first, ref.second);
  std::map<int, Series<SpaceVector>> out;

  // Modes whose x0-exponent lies below the expansion floor -mu0 vanish: the
  // cleared product has only nonnegative x0-support after substitution.
  const int e0_max = -n_lo - 1;
  const std::optional<int> ib_top =
      e0_max < -mu0 ? std::optional<int>{} : ev.inner_floor_bound(e0_max);
  if (!ib_top) {
    for (int n = n_lo; n <= n_hi; ++n) out.emplace(n, zero_slice(x_range));
    return out;
  }

  const int B0 = std::max(0, e0_max + mu0);        // substitution depth
  const int req_hi = x_range.hi - *ib_top;         // substituted x2-cap needed
  const int F2 = std::min(floor_of(b, ref.first), req_hi);

  // The substituted cap depends on the cleared product's true x1 support
  // floor, which tighten() discovers; grow the column range until the cap
  // covers every slice read.
  Series<SpaceVector> sub;
  int H2 = req_hi;
  for (int attempt = 0;; ++attempt) {
    Series<SpaceVector> cols = field_apply(b, w, "x2", Range{F2, H2});
    if (any_tainted(cols))
      throw BudgetError("input columns exceed the space's degree budget");
    int F1 = 0;
    bool have = false;
    for (const auto& [e, v] : cols.coeffs)
      for (const auto& [kk, c] : v.comps) {
        const int fl = floor_of(a, kk.first);
        F1 = have ? std::min(F1, fl) : fl;
        have = true;
      }
    const int H1 = std::max(F1, req_hi + B0 - (p1min + F2 + p2min));
    Series<SpaceVector> comp =
        field_compose(a, b, w, "x1", "x2", Range{F1, H1}, Range{F2, H2});
    // Only cells on the anti-diagonals the substitution reads can reach a
    // slice; taint in the far creation corner is materialized but never
    // consumed.
    const int band = req_hi + B0 - p1min - p2min;
    for (const auto& [e, v] : comp.coeffs)
      if (v.tainted() && e[0] + e[1] <= band)
        throw BudgetError("iterated action exceeds the space's degree budget");
    // The raw composition has no global x1 floor (its support staircases down
    // as x2 grows), but within the materialized box nothing sits below F1 by
    // construction, and the compatibility certificate promises the cleared
    // product a true floor.  Assert the box floor so clearing and tighten()
    // can recover the cleared one.
    comp.floored[comp.var_index("x1")] = 1;
    Series<SpaceVector> g = mul(ps, comp);
    g.tighten();
    Series<SpaceVector> t = taylor_substitute(g, "x1", "x2", "x0", B0);
    const int tx2 = t.var_index("x2");
    // A capped window below the requested reads is success, not deficit:
    // everything above it is certified zero.
    if (t.capped[tx2] || t.window[tx2].hi >= req_hi) {
      sub = std::move(t);
      break;
    }
    if (attempt >= 3)
      throw BudgetError("substituted support cap failed to stabilize");
    H2 += req_hi - t.window[tx2].hi;
  }

  const int t2 = sub.var_index("x2");
  for (int n = n_lo; n <= n_hi; ++n) {
    const int e0 = -n - 1;
    const std::optional<int> ib =
        e0 < -mu0 ? std::optional<int>{} : ev.inner_floor_bound(e0);
    if (!ib) {
      out.emplace(n, zero_slice(x_range));
      continue;
    }
    // Every contribution to this slice sits at or above the substituted
    // floor plus the expansion's per-slice floor.
    const int slo = sub.window[t2].lo + *ib;
    Series<SpaceVector> slice(
        {"x"},
        Window(std::vector<Range>{Range{std::min(slo, x_range.lo), x_range.hi}}));
    slice.floored = {1};
    if (slo <= x_range.hi) {
      const Window target(std::vector<Range>{Range{slo, x_range.hi}, Range{e0, e0}});
      Series<SpaceVector> sm = iota_mul(ev, sub, {"x2", "x0"}, target);
      for (const auto& [e, v] : sm.coeffs) slice.set({e[0]}, v);
    }
    out.emplace(n, std::move(slice));
  }
  return out;
}

}  // namespace

CompatibilityCertificate check_compatible(const QuantumField& a, const QuantumField& b,
                                          const MPoly& p, const Window& window,
                                          const std::vector<BasisRef>& test_vectors) {
  if (p.is_zero()) throw InputError("check_compatible: p must be nonzero");
  for (const auto& v : p.vars())
    if (v != "x1" && v != "x2")
      throw InputError("check_compatible: p must be a polynomial in x1, x2");
  if (window.size() != 2) throw InputError("check_compatible: window must cover (x1, x2)");
  if (test_vectors.empty()) throw InputError("check_compatible: no test vectors");

  CompatibilityCertificate cert;
  cert.a_name = a.name;
  cert.b_name = b.name;
  cert.p = p;
  cert.window = window;
  cert.pass = true;

  const Series<Scalar> ps = p.to_series({"x1", "x2"});
  const int lo1 = window[0].lo, hi1 = window[0].hi;
  const int lo2 = window[1].lo, hi2 = window[1].hi;
  // Clearing by p can push an uncancelled escape diagonal up by its total
  // degree; overshoot the probe correspondingly so it cannot slip past the
  // box.
  int D = 0;
  for (const auto& [e, c] : p.terms()) {
    int t = 0;
    for (int x : e) t += x;
    D = std::max(D, t);
  }

  for (const auto& ref : test_vectors) {
    const SpaceVector w = SpaceVector::unit(ref.first, ref.second);
    // Probe below the window corner as far as the fields' certified floors
    // reach: escaping support inside the probed region cannot hide.
    const int P2 = std::min(floor_of(b, ref.first), lo2);
    Series<SpaceVector> cols = field_apply(b, w, "x2", Range{P2, hi2 + D});
    int F1 = lo1;
    bool skipped = false;
    for (const auto& [e, v] : cols.coeffs) {
      if (v.tainted()) skipped = true;
      for (const auto& [kk, c] : v.comps) F1 = std::min(F1, floor_of(a, kk.first));
    }
    Series<SpaceVector> comp = field_compose(a, b, w, "x1", "x2",
                                             Range{F1, hi1 + D}, Range{P2, hi2 + D});
    Series<SpaceVector> g = mul(ps, comp);
    for (const auto& [e, v] : g.coeffs) {
      if (v.tainted()) skipped = true;
      if (e[0] >= lo1 && e[1] >= lo2) continue;
      if (v.comps.empty()) continue;
      const auto& [kk, c] = *v.comps.begin();
      cert.pass = false;
      cert.witness = CompatibilityWitness{e[0],      e[1],      kk.first,
                                          kk.second, ref.first, ref.second};
      append_note(cert.note, "cleared support escapes the window corner on " + ref_str(ref));
      return cert;
    }
    if (skipped)
      append_note(cert.note, "cells beyond the degree budget skipped on " + ref_str(ref));
  }
  return cert;
}

std::vector<Scalar> default_root_candidates() {
  return {Scalar(1), Scalar::q(2), Scalar::q(-2), Scalar::q(4), Scalar::q(-4)};
}

CompatibilityCertificate search_compat_poly(const QuantumField& a, const QuantumField& b,
                                            const Window& window,
                                            const std::vector<BasisRef>& test_vectors,
                                            const std::vector<Scalar>& root_candidates,
                                            int max_total_degree) {
  if (max_total_degree < 0)
    throw InputError("search_compat_poly: negative degree bound");
  const MPoly x1 = MPoly::variable("x1");
  const MPoly x2 = MPoly::variable("x2");
  const int R = static_cast<int>(root_candidates.size());
  std::string skipped;
  for (int deg = 0; deg <= max_total_degree; ++deg) {
    if (deg > 0 && R == 0) break;
    // Multisets of root candidates as nondecreasing index tuples.
    std::vector<int> idx(deg, 0);
    for (;;) {
      MPoly p(1L);
      for (int i : idx) p = p * (x1 - x2.scaled(root_candidates[i]));
      CompatibilityCertificate cert;
      bool ok = true;
      try {
        cert = check_compatible(a, b, p, window, test_vectors);
      } catch (const BudgetError& err) {
        append_note(skipped, std::string("candidate skipped: ") + err.what());
        ok = false;
      }
      if (ok && cert.pass) {
        append_note(cert.note, "found at total degree " + std::to_string(deg));
        return cert;
      }
      int j = deg - 1;
      while (j >= 0 && idx[j] == R - 1) --j;
      if (j < 0) break;
      ++idx[j];
      for (int k = j + 1; k < deg; ++k) idx[k] = idx[j];
    }
  }
  CompatibilityCertificate cert;
  cert.a_name = a.name;
  cert.b_name = b.name;
  cert.window = window;
  cert.p = MPoly();
  cert.pass = false;
  cert.note = "no clearing polynomial found through total degree " +
              std::to_string(max_total_degree) + " over " + std::to_string(R) +
              " root candidates; exhaustion is not a refutation";
  append_note(cert.note, skipped);
  return cert;
}

YeProduct ye_product(const QuantumField& a, const QuantumField& b,
                     const CompatibilityCertificate& cert, int n_lo, int n_hi,
                     Range x_range, const std::vector<BasisRef>& labels) {
  if (!cert.pass)
    throw InputError("ye_product: compatibility certificate is not a pass");
  if (cert.p.is_zero())
    throw InputError("ye_product: certificate carries no clearing polynomial");
  if (n_lo > n_hi) throw InputError("ye_product: empty mode range");
  if (x_range.lo > x_range.hi) throw InputError("ye_product: empty window");
  if (labels.empty()) throw InputError("ye_product: no basis vectors requested");
  if (!a.space || a.space != b.space)
    throw InputError("ye_product: fields act on different spaces");
  for (const auto& v : cert.p.vars())
    if (v != "x1" && v != "x2")
      throw InputError("ye_product: clearing polynomial must live in x1, x2");

  // Re-expansion of 1/p(x2+x0, x2): x2 outermost, x0 inner.
  std::map<std::string, MPoly> repl;
  repl["x1"] = MPoly::variable("x2") + MPoly::variable("x0");
  repl["x2"] = MPoly::variable("x2");
  const MPoly den = cert.p.substituted(repl);
  const IotaSeries ev(RationalFunction(MPoly(1L), den), {"x2", "x0"});
  const auto fb = ev.floor_bound(1);
  if (!fb) throw BudgetError("ye_product: expansion admits no mode floor");
  const int mu0 = -*fb;

  const Series<Scalar> ps = cert.p.to_series({"x1", "x2"});
  const int p1min = cert.p.min_degree("x1");
  const int p2min = cert.p.min_degree("x2");

  YeProduct out;
  out.vanish_from = mu0;
  std::map<int, std::map<std::pair<int, std::string>, Series<SpaceVector>>> tables;
  for (const auto& ref : labels) {
    try {
      auto slices = ye_modes_for_label(a, b, ps, p1min, p2min, ev, mu0, n_lo,
                                       n_hi, x_range, ref);
      for (auto& [n, s] : slices) tables[n].emplace(ref, std::move(s));
      out.covered.push_back(ref);
    } catch (const Error& err) {
      out.skipped.emplace_back(ref, err.what());
    }
  }
  if (out.covered.empty()) {
    std::string msg = "ye_product: no basis vector computable at this budget";
    for (const auto& [ref, why] : out.skipped) msg += "; " + ref_str(ref) + ": " + why;
    throw BudgetError(msg);
  }
  for (int n = n_lo; n <= n_hi; ++n)
    out.modes.emplace(n, make_table_field(mode_field_name(a.name, n, b.name),
                                          a.space, std::move(tables[n])));
  return out;
}

FieldComparison fields_agree(const QuantumField& f, const QuantumField& g,
                             const std::vector<BasisRef>& test_vectors, Range r) {
  FieldComparison out;
  for (const auto& ref : test_vectors) {
    const SpaceVector w = SpaceVector::unit(ref.first, ref.second);
    Series<SpaceVector> sf, sg;
    try {
      sf = field_apply(f, w, "x", r);
      sg = field_apply(g, w, "x", r);
    } catch (const Error& err) {
      append_note(out.note, ref_str(ref) + std::string(" skipped: ") + err.what());
      continue;
    }
    for (int e = r.lo; e <= r.hi; ++e) {
      const SpaceVector d = sf.coeff({e}) - sg.coeff({e});
      if (!d.comps.empty()) {
        const auto& [kk, c] = *d.comps.begin();
        out.equal = false;
        out.diff = FieldDiff{ref,
                             e,
                             kk.first,
                             kk.second,
                             sf.coeff({e}).component(kk.first, kk.second),
                             sg.coeff({e}).component(kk.first, kk.second),
                             ""};
        return out;
      }
      if (d.tainted())
        append_note(out.note, ref_str(ref) + " x^" + std::to_string(e) +
                                  ": compared below degree " +
                                  std::to_string(d.unknown_from));
    }
  }
  return out;
}

FieldComparison ye_p_independence(const QuantumField& a, const QuantumField& b,
                                  const MPoly& p1, const MPoly& p2, const Window& window,
                                  int n_lo, int n_hi, Range x_range,
                                  const std::vector<BasisRef>& labels) {
  const auto c1 = check_compatible(a, b, p1, window, labels);
  const auto c2 = check_compatible(a, b, p2, window, labels);
  if (!c1.pass || !c2.pass)
    throw InputError("ye_p_independence: both polynomials must certify the pair");
  const auto y1 = ye_product(a, b, c1, n_lo, n_hi, x_range, labels);
  const auto y2 = ye_product(a, b, c2, n_lo, n_hi, x_range, labels);
  std::vector<BasisRef> common;
  for (const auto& ref : y1.covered)
    if (std::find(y2.covered.begin(), y2.covered.end(), ref) != y2.covered.end())
      common.push_back(ref);
  if (common.empty())
    throw BudgetError("ye_p_independence: no basis vector covered by both products");
  FieldComparison out;
  for (int n = n_lo; n <= n_hi; ++n) {
    FieldComparison cmp = fields_agree(y1.modes.at(n), y2.modes.at(n), common, x_range);
    if (!cmp.equal) {
      cmp.diff->context = "mode " + std::to_string(n);
      return cmp;
    }
    if (!cmp.note.empty())
      append_note(out.note, "mode " + std::to_string(n) + ": " + cmp.note);
  }
  if (common.size() < labels.size())
    append_note(out.note, "compared on " + std::to_string(common.size()) + " of " +
                              std::to_string(labels.size()) + " basis vectors");
  return out;
}

const TableEntry* ProductTable::find(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return &e;
  return nullptr;
}

ProductTable closure_generate(std::shared_ptr<const GradedSpace> space,
                              const std::vector<QuantumField>& generators, int depth,
                              int n_lo, int n_hi, Range x_range,
                              const std::vector<BasisRef>& labels,
                              const std::vector<Scalar>& root_candidates,
                              int max_total_degree) {
  if (!space) throw InputError("closure_generate: no space");
  if (depth < 0) throw InputError("closure_generate: negative depth");
  ProductTable tbl;
  tbl.depth_budget = depth;
  tbl.n_lo = n_lo;
  tbl.n_hi = n_hi;
  tbl.x_range = x_range;
  tbl.notes.push_back(
      "partial closure cut at depth " + std::to_string(depth) +
      ", modes " + std::to_string(n_lo) + ".." + std::to_string(n_hi) +
      "; equality and coverage are relative to the stated window");
  tbl.entries.push_back(TableEntry{"1", identity_field(space), "vacuum", 0});
  for (const auto& g : generators) {
    bool dup = false;
    for (const auto& e : tbl.entries)
      if (fields_agree(e.field, g, labels, x_range).equal) {
        dup = true;
        break;
      }
    if (!dup) tbl.entries.push_back(TableEntry{g.name, g, "generator", 0});
  }
  const Window cw(std::vector<Range>{x_range, x_range});
  for (int lvl = 1; lvl <= depth; ++lvl) {
    const size_t base = tbl.entries.size();
    std::vector<TableEntry> fresh;
    auto is_dup = [&](const QuantumField& f) {
      for (const auto& e : tbl.entries)
        if (fields_agree(e.field, f, labels, x_range).equal) return true;
      for (const auto& e : fresh)
        if (fields_agree(e.field, f, labels, x_range).equal) return true;
      return false;
    };
    for (size_t i = 0; i < base; ++i)
      for (size_t j = 0; j < base; ++j) {
        const TableEntry& A = tbl.entries[i];
        const TableEntry& B = tbl.entries[j];
        if (std::max(A.depth, B.depth) != lvl - 1) continue;
        CompatibilityCertificate cert;
        try {
          cert = search_compat_poly(A.field, B.field, cw, labels,
                                    root_candidates, max_total_degree);
        } catch (const Error& err) {
          tbl.notes.push_back("(" + A.name + ", " + B.name + "): " + err.what());
          continue;
        }
        if (!cert.pass) {
          tbl.notes.push_back("(" + A.name + ", " + B.name + "): " + cert.note);
          continue;
        }
        YeProduct y;
        try {
          y = ye_product(A.field, B.field, cert, n_lo, n_hi, x_range, labels);
        } catch (const Error& err) {
          tbl.notes.push_back("(" + A.name + ", " + B.name + "): " + err.what());
          continue;
        }
        for (const auto& [ref, why] : y.skipped)
          tbl.notes.push_back("(" + A.name + ", " + B.name + ") on " +
                              ref_str(ref) + ": " + why);
        for (const auto& [n, f] : y.modes) {
          if (is_dup(f)) continue;
          fresh.push_back(TableEntry{f.name, f, f.name, lvl});
        }
      }
    for (auto& e : fresh) tbl.entries.push_back(std::move(e));
  }
  return tbl;
}

QuantumField d_operator(const QuantumField& a, Range x_range,
                        const std::vector<BasisRef>& labels) {
  if (!a.space) throw InputError("d_operator: field carries no space");
  const QuantumField one = identity_field(a.space);
  // The probe window must reach the field's certified floor on every test
  // vector, or honest support below the corner reads as an escape.
  int lo = x_range.lo;
  for (const auto& ref : labels) lo = std::min(lo, floor_of(a, ref.first));
  const Window cw(std::vector<Range>{Range{lo, x_range.hi}, Range{lo, x_range.hi}});
  const auto cert = check_compatible(a, one, MPoly(1L), cw, labels);
  if (!cert.pass)
    throw InputError("d_operator: (a, 1) fails compatibility with p = 1");
  auto y = ye_product(a, one, cert, -2, -2, x_range, labels);
  QuantumField d = y.modes.at(-2);
  d.name = "D(" + a.name + ")";
  return d;
}

Series<SpaceVector> zn_evaluate(const std::vector<QuantumField>& factors,
                                const RationalFunction& f,
                                const std::vector<std::string>& xvars, BasisRef w,
                                Range x_range, const std::vector<BasisRef>& labels) {
  const int n = static_cast<int>(factors.size());
  if (n == 0) throw InputError("zn_evaluate: needs at least one factor");
  if (static_cast<int>(xvars.size()) != n)
    throw InputError("zn_evaluate: factor/variable arity mismatch");
  for (const auto& poly : {f.num(), f.den()})
    for (const auto& v : poly.vars())
      if (std::find(xvars.begin(), xvars.end(), v) == xvars.end())
        throw InputError("zn_evaluate: f uses a variable outside the point list");
  auto space = factors[0].space;
  for (const auto& a : factors)
    if (!a.space || a.space != space)
      throw InputError("zn_evaluate: factors act on different spaces");

  // Iterated vacuum products, innermost factor first: stage maps the exponent
  // tail (e_{k+1}, ..., e_n) to the field coefficient at that tail.
  std::map<std::vector<int>, QuantumField> stage;
  stage.emplace(std::vector<int>{}, identity_field(space));
  std::vector<char> tail_floored(n, 1);
  const Window cw(std::vector<Range>{x_range, x_range});
  for (int k = n - 1; k >= 0; --k) {
    std::map<std::vector<int>, QuantumField> next;
    for (const auto& [tail, g] : stage) {
      const auto cert = search_compat_poly(factors[k], g, cw, labels,
                                           default_root_candidates(), 4);
      if (!cert.pass)
        throw BudgetError("zn_evaluate: factor " + std::to_string(k + 1) +
                          " admits no clearing polynomial at this budget; " + cert.note);
      const auto y = ye_product(factors[k], g, cert, -x_range.hi - 1,
                                -x_range.lo - 1, x_range, labels);
      if (!y.skipped.empty())
        throw BudgetError("zn_evaluate: factor " + std::to_string(k + 1) +
                          " not computable on every requested basis vector: " +
                          y.skipped.front().second);
      // Exponents below x_range.lo are zero only when every mode above the
      // materialized range provably vanishes.
      if (y.vanish_from > -x_range.lo) tail_floored[k] = 0;
      for (const auto& [m, fld] : y.modes) {
        std::vector<int> key;
        key.reserve(tail.size() + 1);
        key.push_back(-m - 1);
        key.insert(key.end(), tail.begin(), tail.end());
        next.emplace(std::move(key), fld);
      }
    }
    stage = std::move(next);
  }

  // Assemble the iterated product as a series in (x, x1, ..., xn).
  std::vector<std::string> vars;
  vars.push_back("x");
  vars.insert(vars.end(), xvars.begin(), xvars.end());
  Series<SpaceVector> h(vars, Window::uniform(n + 1, x_range.lo, x_range.hi));
  const SpaceVector wv = SpaceVector::unit(w.first, w.second);
  char xf = 1, xc = 1;
  for (const auto& [tail, fld] : stage) {
    const Series<SpaceVector> s = field_apply(fld, wv, "x", x_range);
    xf &= s.floored[0];
    xc &= s.capped[0];
    for (const auto& [e, v] : s.coeffs) {
      std::vector<int> key;
      key.reserve(n + 1);
      key.push_back(e[0]);
      key.insert(key.end(), tail.begin(), tail.end());
      h.set(std::move(key), v);
    }
  }
  h.floored[0] = xf;
  h.capped[0] = xc;
  for (int k = 0; k < n; ++k) h.floored[k + 1] = tail_floored[k];

  // Multiply by the re-expansion of f(x + x1, ..., x + xn), x outermost.
  std::map<std::string, MPoly> repl;
  for (const auto& xv : xvars)
    repl[xv] = MPoly::variable("x") + MPoly::variable(xv);
  const MPoly num2 = f.num().substituted(repl);
  const MPoly den2 = f.den().substituted(repl);
  if (den2.is_constant()) {
    const Series<Scalar> fs =
        num2.scaled(Scalar(1) / den2.constant_term()).to_series(vars);
    return mul(fs, h);
  }
  if (n == 1) {
    const IotaSeries evf(RationalFunction(num2, den2), {"x", xvars[0]});
    return iota_mul(evf, h, {"x", xvars[0]},
                    Window::uniform(2, x_range.lo, x_range.hi));
  }
  throw InputError(
      "zn_evaluate: denominators over several points exceed the supported "
      "expansions; clear them into the vectors first");
}

ZnProbeReport zn_kernel_probe(const std::vector<ZnRow>& span,
                              const std::vector<std::string>& xvars,
                              const std::vector<BasisRef>& test_vectors, Range x_range,
                              const std::vector<BasisRef>& labels) {
  const int k = static_cast<int>(span.size());
  if (k == 0) throw InputError("zn_kernel_probe: empty span");
  if (test_vectors.empty()) throw InputError("zn_kernel_probe: no test vectors");
  for (const auto& row : span)
    if (row.factors.size() != xvars.size())
      throw InputError("zn_kernel_probe: row arity mismatch");

  const int T = static_cast<int>(test_vectors.size());
  std::vector<std::vector<Series<SpaceVector>>> ev(k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < T; ++j)
      ev[i].push_back(zn_evaluate(span[i].factors, span[i].f, xvars,
                                  test_vectors[j], x_range, labels));

  // Common certified box per test vector, cells cut at the least unknown
  // degree across rows.
  const int nv = static_cast<int>(xvars.size()) + 1;
  using Key = std::tuple<int, std::vector<int>, int, std::string>;
  std::map<Key, std::vector<Scalar>> columns;
  int dropped = 0;
  for (int j = 0; j < T; ++j) {
    std::vector<Range> box;
    bool empty = false;
    for (int v = 0; v < nv; ++v) {
      int lo = INT_MIN, hi = INT_MAX;
      for (int i = 0; i < k; ++i) {
        lo = std::max(lo, ev[i][j].window[v].lo);
        hi = std::min(hi, ev[i][j].window[v].hi);
      }
      if (lo > hi) {
        empty = true;
        break;
      }
      box.push_back(Range{lo, hi});
    }
    if (empty) continue;
    std::vector<int> e(nv);
    for (int v = 0; v < nv; ++v) e[v] = box[v].lo;
    for (;;) {
      int bad = INT_MAX;
      for (int i = 0; i < k; ++i) {
        const SpaceVector& val = ev[i][j].coeff(e);
        if (val.tainted()) bad = std::min(bad, val.unknown_from);
      }
      for (int i = 0; i < k; ++i)
        for (const auto& [kk, c] : ev[i][j].coeff(e).comps) {
          if (kk.first >= bad) {
            ++dropped;
            continue;
          }
          auto [it, fresh] =
              columns.try_emplace(Key{j, e, kk.first, kk.second},
                                  std::vector<Scalar>(k));
          it->second[i] = c;
        }
      int v = nv - 1;
      while (v >= 0 && e[v] == box[v].hi) {
        e[v] = box[v].lo;
        --v;
      }
      if (v < 0) break;
      ++e[v];
    }
  }

  // Exact row reduction over the scalar field, tracking the combination.
  const int C = static_cast<int>(columns.size());
  std::vector<std::vector<Scalar>> m(k, std::vector<Scalar>(C));
  {
    int c = 0;
    for (const auto& [key, vals] : columns) {
      for (int i = 0; i < k; ++i) m[i][c] = vals[i];
      ++c;
    }
  }
  std::vector<std::vector<Scalar>> u(k, std::vector<Scalar>(k));
  for (int i = 0; i < k; ++i) u[i][i] = Scalar(1);
  std::vector<std::pair<int, int>> pivots;  // (column, row)
  ZnProbeReport rep;
  for (int i = 0; i < k; ++i) {
    for (const auto& [pc, pr] : pivots) {
      if (m[i][pc].is_zero()) continue;
      const Scalar f = m[i][pc] / m[pr][pc];
      for (int c = 0; c < C; ++c) m[i][c] = m[i][c] - f * m[pr][c];
      for (int c = 0; c < k; ++c) u[i][c] = u[i][c] - f * u[pr][c];
    }
    int piv = -1;
    for (int c = 0; c < C; ++c)
      if (!m[i][c].is_zero()) {
        piv = c;
        break;
      }
    if (piv < 0) {
      rep.kernel_found = true;
      rep.rank = static_cast<int>(pivots.size());
      rep.combo = u[i];
      rep.note =
          "vanishing combination on the probed window; a larger window may "
          "refute it";
      return rep;
    }
    pivots.emplace_back(piv, i);
  }
  rep.rank = static_cast<int>(pivots.size());
  rep.note = "no kernel on the probed window (evidence, not a certificate)";
  if (dropped > 0)
    append_note(rep.note, std::to_string(dropped) + " out-of-budget cells excluded");
  return rep;
}

}  // namespace qvc
