#include "qvc/space.hpp"

#include <algorithm>
#include <sstream>

#include "qvc/delta.hpp"

namespace qvc {

namespace {

// Sentinels wide enough that window arithmetic cannot overflow them.
constexpr int kBigExp = 1 << 20;

int clamp_degree(long d) {
  if (d < 0) return 0;
  if (d > SpaceVector::kFullyKnown - 1) return SpaceVector::kFullyKnown;
  return static_cast<int>(d);
}

}  // namespace

GradedSpace::GradedSpace(std::vector<std::vector<std::string>> basis_by_degree, Base base,
                         int t_floor)
    : basis_(std::move(basis_by_degree)), base_(base), t_floor_(t_floor) {
  if (basis_.empty()) throw InputError("GradedSpace: no degrees");
  for (int d = 0; d <= degree_cap(); ++d)
    for (size_t i = 0; i < basis_[d].size(); ++i)
      for (size_t j = i + 1; j < basis_[d].size(); ++j)
        if (basis_[d][i] == basis_[d][j])
          throw InputError("GradedSpace: duplicate label '" + basis_[d][i] + "'");
}

int GradedSpace::dim(int degree) const {
  if (degree < 0 || degree > degree_cap()) return 0;
  return static_cast<int>(basis_[degree].size());
}

const std::vector<std::string>& GradedSpace::labels(int degree) const {
  if (degree < 0 || degree > degree_cap())
    throw InputError("GradedSpace::labels: degree outside cap");
  return basis_[degree];
}

bool GradedSpace::has_basis(int degree, const std::string& label) const {
  if (degree < 0 || degree > degree_cap()) return false;
  const auto& ls = basis_[degree];
  return std::find(ls.begin(), ls.end(), label) != ls.end();
}

SpaceVector SpaceVector::unit(int degree, const std::string& label) {
  SpaceVector v;
  v.comps.emplace(std::make_pair(degree, label), Scalar(1));
  return v;
}

SpaceVector SpaceVector::unknown_above(int degree) {
  SpaceVector v;
  v.unknown_from = degree < 0 ? 0 : degree;
  return v;
}

Scalar SpaceVector::component(int degree, const std::string& label) const {
  if (degree >= unknown_from)
    throw UnknownCoefficientError("component at degree " + std::to_string(degree) +
                                  " is beyond the degree budget");
  auto it = comps.find(std::make_pair(degree, label));
  return it == comps.end() ? Scalar(0) : it->second;
}

void SpaceVector::add_component(int degree, const std::string& label, const Scalar& c) {
  if (degree >= unknown_from)
    throw InputError("SpaceVector: writing into the unknown region");
  auto key = std::make_pair(degree, label);
  auto it = comps.find(key);
  if (it == comps.end()) {
    if (!c.is_zero()) comps.emplace(std::move(key), c);
    return;
  }
  it->second = it->second + c;
  if (it->second.is_zero()) comps.erase(it);
}

SpaceVector SpaceVector::scaled(const Scalar& s) const {
  SpaceVector out;
  if (s.is_zero()) return out;  // exact zero clears the unknown region too
  out.unknown_from = unknown_from;
  for (const auto& [k, c] : comps) out.comps.emplace(k, c * s);
  return out;
}

SpaceVector operator+(const SpaceVector& a, const SpaceVector& b) {
  SpaceVector out;
  out.unknown_from = std::min(a.unknown_from, b.unknown_from);
  for (const auto& [k, c] : a.comps)
    if (k.first < out.unknown_from) out.comps.emplace(k, c);
  for (const auto& [k, c] : b.comps) {
    if (k.first >= out.unknown_from) continue;
    auto it = out.comps.find(k);
    if (it == out.comps.end()) {
      out.comps.emplace(k, c);
    } else {
      it->second = it->second + c;
      if (it->second.is_zero()) out.comps.erase(it);
    }
  }
  return out;
}

bool operator==(const SpaceVector& a, const SpaceVector& b) {
  const int m = std::min(a.unknown_from, b.unknown_from);
  for (const auto& [k, c] : a.comps) {
    if (k.first >= m) continue;
    auto it = b.comps.find(k);
    if (it == b.comps.end() || !(it->second == c)) return false;
  }
  for (const auto& [k, c] : b.comps) {
    if (k.first >= m) continue;
    if (!a.comps.count(k)) return false;
  }
  if (m != SpaceVector::kFullyKnown)
    throw BudgetError("vector comparison undecidable beyond degree " + std::to_string(m));
  return true;
}

std::string SpaceVector::str() const {
  if (provably_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, c] : comps) {
    if (!first) os << " + ";
    first = false;
    os << "(" << c.str() << ")|" << k.second << "@" << k.first << ">";
  }
  if (tainted()) {
    if (!first) os << " + ";
    os << "?(deg>=" << unknown_from << ")";
  }
  return os.str();
}

QuantumField identity_field(std::shared_ptr<const GradedSpace> space) {
  QuantumField f;
  f.name = "1";
  f.space = std::move(space);
  f.action = [](int d, const std::string& lbl, int e) {
    return e == 0 ? SpaceVector::unit(d, lbl) : SpaceVector();
  };
  f.lower_bound = [](int) { return 0; };
  f.upper_bound = [](int) { return std::optional<int>(0); };
  f.uniform_lower = 0;
  f.uniform_upper = 0;
  f.weight_floor = 0;
  return f;
}

QuantumField zero_field(std::shared_ptr<const GradedSpace> space) {
  QuantumField f;
  f.name = "0";
  f.space = std::move(space);
  f.action = [](int, const std::string&, int) { return SpaceVector(); };
  f.lower_bound = [](int) { return kBigExp; };
  f.upper_bound = [](int) { return std::optional<int>(-kBigExp); };
  f.uniform_lower = kBigExp;
  f.uniform_upper = -kBigExp;
  f.weight_floor = kBigExp;  // no output at all, so any floor claim is vacuous
  return f;
}

QuantumField field_scaled(const QuantumField& a, const Scalar& s) {
  if (s.is_zero()) return zero_field(a.space);
  QuantumField f = a;
  f.name = "(" + s.str() + ")*" + a.name;
  f.action = [act = a.action, s](int d, const std::string& lbl, int e) {
    return act(d, lbl, e).scaled(s);
  };
  return f;
}

QuantumField field_sum(const QuantumField& a, const QuantumField& b) {
  if (a.space != b.space) throw InputError("field_sum: fields live on different spaces");
  QuantumField f;
  f.name = "(" + a.name + " + " + b.name + ")";
  f.space = a.space;
  f.action = [aa = a.action, ba = b.action](int d, const std::string& lbl, int e) {
    return aa(d, lbl, e) + ba(d, lbl, e);
  };
  f.lower_bound = [al = a.lower_bound, bl = b.lower_bound](int d) {
    return std::min(al(d), bl(d));
  };
  f.upper_bound = [au = a.upper_bound, bu = b.upper_bound](int d) -> std::optional<int> {
    auto x = au(d), y = bu(d);
    if (!x || !y) return std::nullopt;
    return std::max(*x, *y);
  };
  if (a.uniform_lower && b.uniform_lower)
    f.uniform_lower = std::min(*a.uniform_lower, *b.uniform_lower);
  if (a.uniform_upper && b.uniform_upper)
    f.uniform_upper = std::max(*a.uniform_upper, *b.uniform_upper);
  if (a.weight_floor && b.weight_floor)
    f.weight_floor = std::min(*a.weight_floor, *b.weight_floor);
  return f;
}

namespace {

// One coefficient of a(x)(w): linear extension over the known components,
// plus the taint contributed by the unknown region through the field's
// weight floor.  Uniform bounds certify zero even on tainted inputs.
SpaceVector apply_at(const QuantumField& a, const SpaceVector& w, int e) {
  if ((a.uniform_lower && e < *a.uniform_lower) ||
      (a.uniform_upper && e > *a.uniform_upper))
    return SpaceVector();
  SpaceVector acc;
  for (const auto& [k, c] : w.comps) acc = acc + a.action(k.first, k.second, e).scaled(c);
  if (w.tainted()) {
    long from = 0;
    if (a.weight_floor)
      from = static_cast<long>(w.unknown_from) + e + *a.weight_floor;
    const int cut = clamp_degree(from);
    if (cut != SpaceVector::kFullyKnown) {
      SpaceVector taint = SpaceVector::unknown_above(cut);
      acc = acc + taint;
    }
  }
  return acc;
}

// Support bounds of a over the degrees occurring in w (w fully known).
std::pair<int, std::optional<int>> support_bounds(const QuantumField& a,
                                                  const SpaceVector& w) {
  int lo = kBigExp;
  std::optional<int> hi = -kBigExp;
  for (const auto& [k, c] : w.comps) {
    lo = std::min(lo, a.lower_bound(k.first));
    if (hi) {
      auto u = a.upper_bound(k.first);
      hi = u ? std::optional<int>(std::max(*hi, *u)) : std::nullopt;
    }
  }
  return {lo, hi};
}

}  // namespace

Series<SpaceVector> field_apply(const QuantumField& a, const SpaceVector& w,
                                const std::string& var, Range r) {
  Series<SpaceVector> out({var}, Window(std::vector<Range>{r}));
  if (w.provably_zero()) {
    out.floored[0] = out.capped[0] = 1;
    return out;
  }
  if (!w.tainted()) {
    auto [lo, hi] = support_bounds(a, w);
    out.floored[0] = lo >= r.lo;
    out.capped[0] = hi.has_value() && *hi <= r.hi;
  }
  if (a.uniform_lower && *a.uniform_lower >= r.lo) out.floored[0] = 1;
  if (a.uniform_upper && *a.uniform_upper <= r.hi) out.capped[0] = 1;
  for (int e = r.lo; e <= r.hi; ++e) {
    SpaceVector v = apply_at(a, w, e);
    if (!coeff_trivial(v)) out.set({e}, std::move(v));
  }
  return out;
}

Series<SpaceVector> field_compose(const QuantumField& a, const QuantumField& b,
                                  const SpaceVector& w, const std::string& var1,
                                  const std::string& var2, Range r1, Range r2) {
  if (a.space != b.space) throw InputError("field_compose: fields live on different spaces");
  Series<SpaceVector> out({var1, var2}, Window(std::vector<Range>{r1, r2}));
  if (w.provably_zero()) {
    out.floored = {1, 1};
    out.capped = {1, 1};
    return out;
  }

  bool cols_in_box = false, cols_known = true;
  if (!w.tainted()) {
    auto [lo2, hi2] = support_bounds(b, w);
    out.floored[1] = lo2 >= r2.lo;
    out.capped[1] = hi2.has_value() && *hi2 <= r2.hi;
  }
  if (b.uniform_lower && *b.uniform_lower >= r2.lo) out.floored[1] = 1;
  if (b.uniform_upper && *b.uniform_upper <= r2.hi) out.capped[1] = 1;
  cols_in_box = out.floored[1] && out.capped[1];

  int lo1 = kBigExp;
  std::optional<int> hi1 = -kBigExp;
  for (int e2 = r2.lo; e2 <= r2.hi; ++e2) {
    SpaceVector v2 = apply_at(b, w, e2);
    if (v2.tainted()) {
      cols_known = false;
    } else {
      auto [l, h] = support_bounds(a, v2);
      lo1 = std::min(lo1, l);
      if (hi1) hi1 = h ? std::optional<int>(std::max(*hi1, *h)) : std::nullopt;
    }
    if (coeff_trivial(v2)) continue;
    for (int e1 = r1.lo; e1 <= r1.hi; ++e1) {
      SpaceVector v = apply_at(a, v2, e1);
      if (!coeff_trivial(v)) out.set({e1, e2}, std::move(v));
    }
  }
  // A global x1 certificate needs every nonzero column inside the box and
  // fully known — or a degree-independent bound, which covers even the
  // columns outside the box.
  out.floored[0] = cols_in_box && cols_known && lo1 >= r1.lo;
  out.capped[0] = cols_in_box && cols_known && hi1.has_value() && *hi1 <= r1.hi;
  if (a.uniform_lower && *a.uniform_lower >= r1.lo) out.floored[0] = 1;
  if (a.uniform_upper && *a.uniform_upper <= r1.hi) out.capped[0] = 1;
  return out;
}

QuantumField ct_action(const Series<Scalar>& f, const QuantumField& a) {
  if (f.nvars() != 1) throw InputError("ct_action: multiplier must be a one-variable series");
  if (!f.floored[0]) throw InputError("ct_action: multiplier must be bounded below");
  const Range fr = f.window[0];
  const bool fcap = f.capped[0] != 0;

  QuantumField out;
  out.name = "(" + f.str() + ")*" + a.name;
  out.space = a.space;
  out.action = [f, fr, fcap, act = a.action, lb = a.lower_bound](
                   int d, const std::string& lbl, int e) {
    SpaceVector acc;
    const int jmax = e - lb(d);  // beyond this, a's coefficient is zero
    for (int j = fr.lo; j <= jmax; ++j) {
      if (j > fr.hi && fcap) break;
      Scalar c = f.coeff({j});  // raises beyond an uncapped window
      if (c.is_zero()) continue;
      acc = acc + act(d, lbl, e - j).scaled(c);
    }
    return acc;
  };
  out.lower_bound = [lo = fr.lo, lb = a.lower_bound](int d) { return lo + lb(d); };
  out.upper_bound = [fcap, hi = fr.hi, ub = a.upper_bound](int d) -> std::optional<int> {
    if (!fcap) return std::nullopt;
    auto u = ub(d);
    if (!u) return std::nullopt;
    return hi + *u;
  };
  if (a.uniform_lower) out.uniform_lower = fr.lo + *a.uniform_lower;
  if (fcap && a.uniform_upper) out.uniform_upper = fr.hi + *a.uniform_upper;
  if (a.weight_floor && fcap) out.weight_floor = *a.weight_floor - fr.hi;
  return out;
}

QuantumField make_table_field(
    const std::string& name, std::shared_ptr<const GradedSpace> space,
    std::map<std::pair<int, std::string>, Series<SpaceVector>> table) {
  // Partial tables are allowed: reads on a missing basis vector refuse at
  // lookup time rather than guessing zero.
  if (table.empty()) throw InputError("make_table_field: empty table");
  for (const auto& [key, s] : table)
    if (s.nvars() != 1 || !s.floored[0])
      throw InputError("make_table_field: action for '" + key.second +
                       "' is not a below-bounded one-variable series");

  // Certified support bounds and a weight floor derived from the stored data.
  auto lower = std::make_shared<std::map<int, int>>();
  auto upper = std::make_shared<std::map<int, std::optional<int>>>();
  long wf = kBigExp;
  bool wf_valid = true;
  for (const auto& [key, s] : table) {
    const int d = key.first;
    auto lit = lower->find(d);
    if (lit == lower->end()) {
      lower->emplace(d, s.window[0].lo);
    } else {
      lit->second = std::min(lit->second, s.window[0].lo);
    }
    std::optional<int> cap =
        s.capped[0] ? std::optional<int>(s.window[0].hi) : std::nullopt;
    auto uit = upper->find(d);
    if (uit == upper->end()) {
      upper->emplace(d, cap);
    } else if (uit->second && cap) {
      uit->second = std::max(*uit->second, *cap);
    } else {
      uit->second = std::nullopt;
    }
    for (const auto& [e, v] : s.coeffs) {
      for (const auto& [k, c] : v.comps)
        wf = std::min(wf, static_cast<long>(k.first) - d - e[0]);
      if (v.tainted()) wf_valid = false;
    }
  }

  auto tbl = std::make_shared<std::map<std::pair<int, std::string>, Series<SpaceVector>>>(
      std::move(table));
  QuantumField f;
  f.name = name;
  f.space = std::move(space);
  f.action = [tbl](int d, const std::string& lbl, int e) {
    auto it = tbl->find(std::make_pair(d, lbl));
    if (it == tbl->end())
      throw InputError("table field: unknown basis vector '" + lbl + "'");
    return it->second.coeff({e});
  };
  f.lower_bound = [lower](int d) {
    auto it = lower->find(d);
    return it == lower->end() ? kBigExp : it->second;
  };
  f.upper_bound = [upper](int d) -> std::optional<int> {
    auto it = upper->find(d);
    return it == upper->end() ? std::optional<int>(-kBigExp) : it->second;
  };
  if (wf_valid) f.weight_floor = static_cast<int>(std::max<long>(wf, -kBigExp));
  return f;
}

namespace {

void gen_partitions(int n, int max_part, std::vector<int>& cur,
                    std::vector<std::vector<int>>& out) {
  if (n == 0) {
    out.push_back(cur);
    return;
  }
  for (int p = std::min(n, max_part); p >= 1; --p) {
    cur.push_back(p);
    gen_partitions(n - p, p, cur, out);
    cur.pop_back();
  }
}

std::string partition_label(const std::vector<int>& parts) {
  if (parts.empty()) return "vac";
  std::ostringstream os;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) os << ".";
    os << parts[i];
  }
  return os.str();
}

std::vector<int> parse_partition(const std::string& label) {
  if (label == "vac") return {};
  std::vector<int> parts;
  size_t pos = 0;
  while (pos < label.size()) {
    size_t dot = label.find('.', pos);
    if (dot == std::string::npos) dot = label.size();
    parts.push_back(std::stoi(label.substr(pos, dot - pos)));
    pos = dot + 1;
  }
  return parts;
}

}  // namespace

std::pair<std::shared_ptr<const GradedSpace>, QuantumField>
build_heisenberg_fock(const Scalar& level, int degree_cap) {
  if (degree_cap < 1) throw InputError("build_heisenberg_fock: degree_cap must be >= 1");
  std::vector<std::vector<std::string>> basis(degree_cap + 1);
  for (int n = 0; n <= degree_cap; ++n) {
    std::vector<std::vector<int>> parts;
    std::vector<int> cur;
    gen_partitions(n, n == 0 ? 1 : n, cur, parts);
    for (const auto& p : parts) basis[n].push_back(partition_label(p));
  }
  auto space = std::make_shared<const GradedSpace>(std::move(basis), GradedSpace::Base::Plain);

  const int cap = degree_cap;
  QuantumField alpha;
  alpha.name = "alpha";
  alpha.space = space;
  alpha.action = [level, cap](int d, const std::string& lbl, int e) -> SpaceVector {
    std::vector<int> parts = parse_partition(lbl);
    SpaceVector out;
    if (e >= 0) {
      // Creation mode alpha_{-e-1}: append the part e+1.
      const int m = e + 1;
      if (d + m > cap) return SpaceVector::unknown_above(d + m);
      parts.push_back(m);
      std::sort(parts.rbegin(), parts.rend());
      out.add_component(d + m, partition_label(parts), Scalar(1));
      return out;
    }
    // Annihilation mode alpha_n, n = -e-1 >= 0; alpha_0 acts as zero.
    const int n = -e - 1;
    if (n == 0) return out;
    for (size_t i = 0; i < parts.size(); ++i) {
      if (parts[i] != n) continue;
      std::vector<int> rest = parts;
      rest.erase(rest.begin() + i);
      out.add_component(d - n, partition_label(rest), Scalar(n) * level);
    }
    return out;
  };
  alpha.lower_bound = [](int d) { return -d - 1; };
  alpha.upper_bound = [](int) { return std::optional<int>(); };
  alpha.weight_floor = 1;  // the mode at x-exponent e shifts degree by e + 1
  return {space, alpha};
}

// ---------------------------------------------------------------------------
// t-module spaces
// ---------------------------------------------------------------------------

namespace {

void require_t_module(const GradedSpace& space, const char* who) {
  if (space.base() != GradedSpace::Base::TModule)
    throw InputError(std::string(who) + ": space is not a t-module");
}

}  // namespace

std::shared_ptr<const GradedSpace> build_free_t_module(int rank, int t_floor, int t_cap) {
  if (rank < 1) throw InputError("build_free_t_module: rank must be >= 1");
  if (t_cap < t_floor) throw InputError("build_free_t_module: empty t-window");
  std::vector<std::string> ranks;
  for (int i = 1; i <= rank; ++i) ranks.push_back("u" + std::to_string(i));
  std::vector<std::vector<std::string>> basis(t_cap - t_floor + 1, ranks);
  return std::make_shared<GradedSpace>(std::move(basis), GradedSpace::Base::TModule,
                                       t_floor);
}

SpaceVector t_shift_vector(const SpaceVector& w, int m, const GradedSpace& space) {
  require_t_module(space, "t_shift_vector");
  int taint = SpaceVector::kFullyKnown;
  if (w.tainted()) taint = clamp_degree(static_cast<long>(w.unknown_from) + m);
  for (const auto& [key, c] : w.comps) {
    const int d = key.first + m;
    if (d < 0)
      throw BudgetError(
          "t_shift_vector: component drops below the representable t-floor; "
          "rebuild the space with a deeper floor");
    if (d > space.degree_cap()) taint = std::min(taint, d);
  }
  SpaceVector out;
  out.unknown_from = taint;
  for (const auto& [key, c] : w.comps) {
    const int d = key.first + m;
    if (d <= space.degree_cap()) out.add_component(d, key.second, c);
  }
  return out;
}

SpaceVector t_series_vector(const Series<Scalar>& f, const std::string& label,
                            const GradedSpace& space) {
  require_t_module(space, "t_series_vector");
  if (f.nvars() != 1 || !f.floored[0])
    throw InputError("t_series_vector: series must be one-variable and bounded below");
  if (!space.has_basis(0, label))
    throw InputError("t_series_vector: unknown rank label '" + label + "'");
  const int tf = space.t_floor();
  int taint = SpaceVector::kFullyKnown;
  if (!f.capped[0]) taint = clamp_degree(static_cast<long>(f.window[0].hi) + 1 - tf);
  for (const auto& [e, c] : f.coeffs) {
    const int d = e[0] - tf;
    if (d < 0)
      throw BudgetError("t_series_vector: support below the representable t-floor");
    if (d > space.degree_cap()) taint = std::min(taint, d);
  }
  SpaceVector out;
  out.unknown_from = taint;
  for (const auto& [e, c] : f.coeffs) {
    const int d = e[0] - tf;
    if (d <= space.degree_cap() && d < taint) out.add_component(d, label, c);
  }
  return out;
}

SpaceVector t_multiply(const Series<Scalar>& g, const SpaceVector& w,
                       const GradedSpace& space) {
  require_t_module(space, "t_multiply");
  if (g.nvars() != 1 || !g.floored[0] || !g.capped[0])
    throw InputError("t_multiply: multiplier needs certificates on both sides");
  SpaceVector acc;
  for (const auto& [e, c] : g.coeffs) {
    if (c.is_zero()) continue;
    acc = acc + t_shift_vector(w, e[0], space).scaled(c);
  }
  return acc;
}

QuantumField multiplication_field(const std::string& name,
                                  std::shared_ptr<const GradedSpace> space,
                                  const Series<Scalar>& m) {
  if (!space) throw InputError("multiplication_field: null space");
  require_t_module(*space, "multiplication_field");
  if (m.nvars() != 2 || !m.has_var("t") || !m.has_var("x"))
    throw InputError("multiplication_field: multiplier must be a series in (t, x)");
  const int vt = m.var_index("t"), vx = m.var_index("x");
  if (!m.floored[vt] || !m.capped[vt] || !m.floored[vx])
    throw InputError(
        "multiplication_field: t-support needs certificates on both sides and x a floor");

  QuantumField out;
  out.name = name;
  out.space = space;
  out.action = [m, vt, vx, sp = space](int d, const std::string& lbl, int e) {
    SpaceVector acc;
    const Range tr = m.window[vt], xr = m.window[vx];
    if (e < xr.lo) return acc;
    if (e > xr.hi) {
      if (m.capped[vx]) return acc;
      throw UnknownCoefficientError(
          "multiplication_field: x-coefficient beyond the certified window");
    }
    std::vector<int> key(2);
    for (int mt = tr.lo; mt <= tr.hi; ++mt) {
      key[vt] = mt;
      key[vx] = e;
      Scalar c = m.coeff(key);
      if (c.is_zero()) continue;
      acc = acc + t_shift_vector(SpaceVector::unit(d, lbl), mt, *sp).scaled(c);
    }
    return acc;
  };
  out.lower_bound = [lo = m.window[vx].lo](int) { return lo; };
  const bool xcap = m.capped[vx] != 0;
  const int xhi = m.window[vx].hi;
  out.upper_bound = [xcap, xhi](int) -> std::optional<int> {
    if (xcap) return xhi;
    return std::nullopt;
  };
  out.uniform_lower = m.window[vx].lo;
  if (xcap) out.uniform_upper = xhi;
  if (xcap) out.weight_floor = m.window[vt].lo - xhi;
  return out;
}

QuantumField ct1_action(const Series<Scalar>& f, const QuantumField& a) {
  if (!a.space) throw InputError("ct1_action: field carries no space");
  require_t_module(*a.space, "ct1_action");
  if (f.nvars() != 1) throw InputError("ct1_action: multiplier must be a one-variable series");
  if (!f.floored[0] || !f.capped[0])
    throw InputError("ct1_action: multiplier needs certificates on both sides");
  const Range fr = f.window[0];

  QuantumField out;
  out.name = "(" + f.str() + " shifted)*" + a.name;
  out.space = a.space;
  out.action = [f, fr, act = a.action, lb = a.lower_bound, sp = a.space](
                   int d, const std::string& lbl, int e) {
    SpaceVector acc;
    const int jmax = e - lb(d);  // beyond this, a's coefficient is zero
    for (int j = 0; j <= jmax; ++j) {
      SpaceVector base = act(d, lbl, e - j);
      if (coeff_trivial(base)) continue;
      for (int n = fr.lo; n <= fr.hi; ++n) {
        Scalar c = f.coeff({n});
        if (c.is_zero()) continue;
        mpq_class b = generalized_binom(n, j);
        if (b == 0) continue;
        acc = acc + t_shift_vector(base, n - j, *sp).scaled(c * Scalar(b));
      }
    }
    return acc;
  };
  out.lower_bound = a.lower_bound;
  out.upper_bound = [](int) -> std::optional<int> { return std::nullopt; };
  out.uniform_lower = a.uniform_lower;
  return out;
}

}  // namespace qvc
