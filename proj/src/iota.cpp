#include "qvc/iota.hpp"

#include <algorithm>

namespace qvc {

namespace {

// Tower comparison: the LAST component is the most significant.
bool tower_less(const std::vector<int>& a, const std::vector<int>& b) {
  for (int i = static_cast<int>(a.size()) - 1; i >= 0; --i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

std::vector<std::pair<std::vector<int>, Scalar>> aligned_terms(
    const MPoly& p, const std::vector<std::string>& order) {
  for (const std::string& v : p.vars())
    if (std::find(order.begin(), order.end(), v) == order.end())
      throw InputError("iota: expansion order misses variable '" + v + "'");
  std::vector<int> pos(order.size(), -1);
  for (size_t i = 0; i < order.size(); ++i) {
    auto it = std::find(p.vars().begin(), p.vars().end(), order[i]);
    if (it != p.vars().end()) pos[i] = static_cast<int>(it - p.vars().begin());
  }
  std::vector<std::pair<std::vector<int>, Scalar>> out;
  for (const auto& [e, c] : p.terms()) {
    std::vector<int> ne(order.size(), 0);
    for (size_t i = 0; i < order.size(); ++i)
      if (pos[i] >= 0) ne[i] = e[pos[i]];
    out.emplace_back(std::move(ne), c);
  }
  return out;
}

}  // namespace

IotaSeries::IotaSeries(const RationalFunction& f, std::vector<std::string> order,
                       long node_budget)
    : order_(std::move(order)), node_budget_(node_budget) {
  if (order_.empty()) throw InputError("iota: empty variable order");
  auto den = aligned_terms(f.den(), order_);
  num_ = aligned_terms(f.num(), order_);
  const int r = nvars();

  // Tower-least denominator monomial.
  size_t mi = 0;
  for (size_t i = 1; i < den.size(); ++i)
    if (tower_less(den[i].first, den[mi].first)) mi = i;
  mu_ = den[mi].first;
  mu_coeff_ = den[mi].second;
  for (size_t i = 0; i < den.size(); ++i)
    if (i != mi) rest_.push_back(den[i]);
  for (const auto& [m, c] : rest_) {
    std::vector<int> g(r);
    for (int v = 0; v < r; ++v) g[v] = m[v] - mu_[v];
    gens_.push_back(std::move(g));
  }

  // Cone functionals psi_[k] = e_k + (nonnegative combination of psi_[j>k]),
  // adjusted until nonnegative on every generator.  A generator negative at
  // index k is tower-positive, so its outermost nonzero index J exceeds k and
  // psi_[J] evaluates on it to the positive entry g[J]; adding enough copies
  // repairs the sign without harming any other generator.
  psi_.assign(r, {});
  for (int k = r - 1; k >= 0; --k) {
    std::vector<long> psi(r, 0);
    psi[k] = 1;
    for (const auto& g : gens_) {
      long val = 0;
      for (int v = 0; v < r; ++v) val += psi[v] * g[v];
      if (val >= 0) continue;
      int J = r - 1;
      while (J >= 0 && g[J] == 0) --J;
      if (J <= k || g[J] <= 0)
        throw InputError("iota: denominator monomials are not tower-ordered");
      const long a = (-val + g[J] - 1) / g[J];
      for (int v = 0; v < r; ++v) psi[v] += a * psi_[J][v];
    }
    psi_[k] = std::move(psi);
  }
  psi_at_minus_mu_.assign(r, 0);
  for (int k = 0; k < r; ++k)
    for (int v = 0; v < r; ++v) psi_at_minus_mu_[k] += psi_[k][v] * static_cast<long>(-mu_[v]);

  num_min_.assign(r, 0);
  for (int v = 0; v < r; ++v) {
    int mn = 0;
    bool first = true;
    for (const auto& [m, c] : num_) {
      if (first || m[v] < mn) mn = m[v];
      first = false;
    }
    num_min_[v] = mn;
  }
}

bool IotaSeries::certified_zero(const std::vector<int>& e) const {
  const int r = nvars();
  for (int k = 0; k < r; ++k) {
    long val = 0;
    for (int v = 0; v < r; ++v) val += psi_[k][v] * static_cast<long>(e[v]);
    if (val < psi_at_minus_mu_[k]) return true;
  }
  return false;
}

const Scalar& IotaSeries::inv_coeff(const std::vector<int>& e) const {
  static const Scalar zero(0);
  if (certified_zero(e)) return zero;
  // Explicit DFS: a node is computable once every child (shifted by mu - m)
  // is memoized or certified zero.
  std::vector<std::vector<int>> stack{e};
  const int r = nvars();
  while (!stack.empty()) {
    const std::vector<int> top = stack.back();  // copy: pushes may reallocate
    if (memo_.count(top)) {
      stack.pop_back();
      continue;
    }
    bool ready = true;
    std::vector<int> child(r);
    for (const auto& [m, c] : rest_) {
      for (int v = 0; v < r; ++v) child[v] = top[v] + mu_[v] - m[v];
      if (!certified_zero(child) && !memo_.count(child)) {
        if (++nodes_ > node_budget_)
          throw BudgetError("iota: expansion node budget exhausted");
        stack.push_back(child);
        ready = false;
      }
    }
    if (!ready) continue;
    bool at_origin = true;
    for (int v = 0; v < r; ++v)
      if (top[v] + mu_[v] != 0) at_origin = false;
    Scalar acc = at_origin ? Scalar(1) : Scalar(0);
    for (const auto& [m, c] : rest_) {
      for (int v = 0; v < r; ++v) child[v] = top[v] + mu_[v] - m[v];
      if (certified_zero(child)) continue;
      acc = acc - c * memo_.at(child);
    }
    memo_.emplace(top, acc / mu_coeff_);
    stack.pop_back();
  }
  return memo_.at(e);
}

Scalar IotaSeries::coeff(const std::vector<int>& e) const {
  if (static_cast<int>(e.size()) != nvars())
    throw InputError("IotaSeries::coeff: exponent arity mismatch");
  Scalar acc(0);
  const int r = nvars();
  std::vector<int> be(r);
  for (const auto& [m, c] : num_) {
    for (int v = 0; v < r; ++v) be[v] = e[v] - m[v];
    acc = acc + c * inv_coeff(be);
  }
  return acc;
}

std::optional<int> IotaSeries::floor_bound(int v) const {
  if (num_.empty()) return std::nullopt;  // zero numerator: caller treats as no info
  for (const auto& g : gens_)
    if (g[v] < 0) return std::nullopt;
  return -mu_[v] + num_min_[v];
}

std::optional<int> IotaSeries::inner_floor_bound(int outer_hi) const {
  if (nvars() != 2)
    throw InputError("IotaSeries::inner_floor_bound: requires a two-variable expansion");
  if (num_.empty()) return std::nullopt;
  // Support of 1/den at outer level <= L: lambda-combinations of generators
  // with sum(lambda_i g_i[1]) <= L + mu[1].  Generators lowering the inner
  // exponent are tower-positive, hence strictly positive at the outer index,
  // so the level cap bounds each of their multiplicities.
  const long L = outer_hi - num_min_[1];
  const long cap = L + mu_[1];
  if (cap < 0) return std::nullopt;
  long b = -mu_[0];
  for (const auto& g : gens_) {
    if (g[0] >= 0) continue;
    if (g[1] <= 0) throw InputError("iota: malformed generator");
    b += (cap / g[1]) * g[0];
  }
  return static_cast<int>(b) + num_min_[0];
}

Series<Scalar> IotaSeries::materialize(const Window& w) const {
  if (w.size() != nvars()) throw InputError("IotaSeries::materialize: arity mismatch");
  Series<Scalar> out(order_, w);
  const int r = nvars();
  for (int v = 0; v < r; ++v) {
    auto fb = floor_bound(v);
    if (fb.has_value() && *fb >= w[v].lo) out.floored[v] = 1;
  }
  std::vector<int> e(r);
  for (int v = 0; v < r; ++v) e[v] = w[v].lo;
  while (true) {
    Scalar c = coeff(e);
    if (!c.is_zero()) out.coeffs.emplace(e, std::move(c));
    int v = r - 1;
    while (v >= 0 && e[v] == w[v].hi) {
      e[v] = w[v].lo;
      --v;
    }
    if (v < 0) break;
    ++e[v];
  }
  return out;
}

}  // namespace qvc
