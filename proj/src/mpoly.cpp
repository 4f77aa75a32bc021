#include "qvc/mpoly.hpp"

#include <algorithm>
#include <sstream>

#include "qvc/errors.hpp"

namespace qvc {

MPoly::MPoly(const Scalar& c) {
  if (!c.is_zero()) terms_.emplace(std::vector<int>{}, c);
}

MPoly MPoly::variable(const std::string& name, int power) {
  if (power < 0) throw InputError("MPoly::variable: negative power");
  MPoly p;
  if (power == 0) return MPoly(Scalar(1));
  p.vars_ = {name};
  p.terms_.emplace(std::vector<int>{power}, Scalar(1));
  return p;
}

MPoly MPoly::monomial(const Scalar& c, const std::vector<std::pair<std::string, int>>& vp) {
  MPoly p(c);
  for (const auto& [v, e] : vp) p = p * variable(v, e);
  return p;
}

Scalar MPoly::constant_term() const {
  std::vector<int> zero(vars_.size(), 0);
  auto it = terms_.find(zero);
  return it == terms_.end() ? Scalar(0) : it->second;
}

int MPoly::degree(const std::string& var) const {
  if (is_zero()) return -1;
  auto it = std::find(vars_.begin(), vars_.end(), var);
  if (it == vars_.end()) return 0;
  const size_t i = it - vars_.begin();
  int d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, e[i]);
  return d;
}

int MPoly::min_degree(const std::string& var) const {
  if (is_zero()) return 0;
  auto it = std::find(vars_.begin(), vars_.end(), var);
  if (it == vars_.end()) return 0;
  const size_t i = it - vars_.begin();
  int d = degree(var);
  for (const auto& [e, c] : terms_) d = std::min(d, e[i]);
  return d;
}

void MPoly::normalize() {
  for (auto it = terms_.begin(); it != terms_.end();)
    it = it->second.is_zero() ? terms_.erase(it) : std::next(it);
  // Drop variables that no longer occur.
  std::vector<char> used(vars_.size(), 0);
  for (const auto& [e, c] : terms_)
    for (size_t i = 0; i < vars_.size(); ++i)
      if (e[i] != 0) used[i] = 1;
  if (std::all_of(used.begin(), used.end(), [](char u) { return u; })) return;
  std::vector<std::string> nv;
  for (size_t i = 0; i < vars_.size(); ++i)
    if (used[i]) nv.push_back(vars_[i]);
  std::map<std::vector<int>, Scalar> nt;
  for (const auto& [e, c] : terms_) {
    std::vector<int> ne;
    for (size_t i = 0; i < vars_.size(); ++i)
      if (used[i]) ne.push_back(e[i]);
    nt.emplace(std::move(ne), c);
  }
  vars_ = std::move(nv);
  terms_ = std::move(nt);
}

MPoly MPoly::on_vars(const MPoly& p, const std::vector<std::string>& vs) {
  MPoly out;
  out.vars_ = vs;
  std::vector<int> pos(vs.size(), -1);
  for (size_t i = 0; i < vs.size(); ++i) {
    auto it = std::find(p.vars_.begin(), p.vars_.end(), vs[i]);
    if (it != p.vars_.end()) pos[i] = static_cast<int>(it - p.vars_.begin());
  }
  for (const auto& [e, c] : p.terms_) {
    std::vector<int> ne(vs.size(), 0);
    for (size_t i = 0; i < vs.size(); ++i)
      if (pos[i] >= 0) ne[i] = e[pos[i]];
    out.terms_.emplace(std::move(ne), c);
  }
  return out;
}

namespace {
std::vector<std::string> sorted_union(const std::vector<std::string>& a,
                                      const std::vector<std::string>& b) {
  std::vector<std::string> vs = a;
  vs.insert(vs.end(), b.begin(), b.end());
  std::sort(vs.begin(), vs.end());
  vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
  return vs;
}
}  // namespace

MPoly MPoly::operator-() const { return scaled(Scalar(-1)); }

MPoly MPoly::scaled(const Scalar& s) const {
  MPoly out;
  if (s.is_zero()) return out;
  out.vars_ = vars_;
  for (const auto& [e, c] : terms_) out.terms_.emplace(e, c * s);
  return out;
}

MPoly operator+(const MPoly& a, const MPoly& b) {
  auto vs = sorted_union(a.vars_, b.vars_);
  MPoly aa = MPoly::on_vars(a, vs);
  MPoly bb = MPoly::on_vars(b, vs);
  for (const auto& [e, c] : bb.terms_) {
    auto it = aa.terms_.find(e);
    if (it == aa.terms_.end())
      aa.terms_.emplace(e, c);
    else
      it->second = it->second + c;
  }
  aa.normalize();
  return aa;
}

MPoly operator-(const MPoly& a, const MPoly& b) { return a + (-b); }

MPoly operator*(const MPoly& a, const MPoly& b) {
  auto vs = sorted_union(a.vars_, b.vars_);
  MPoly aa = MPoly::on_vars(a, vs);
  MPoly bb = MPoly::on_vars(b, vs);
  MPoly out;
  out.vars_ = vs;
  std::vector<int> e(vs.size());
  for (const auto& [ea, ca] : aa.terms_)
    for (const auto& [eb, cb] : bb.terms_) {
      for (size_t i = 0; i < vs.size(); ++i) e[i] = ea[i] + eb[i];
      Scalar prod = ca * cb;
      auto it = out.terms_.find(e);
      if (it == out.terms_.end())
        out.terms_.emplace(e, prod);
      else
        it->second = it->second + prod;
    }
  out.normalize();
  return out;
}

MPoly MPoly::pow(int e) const {
  if (e < 0) throw InputError("MPoly::pow: negative exponent");
  MPoly r(Scalar(1));
  MPoly base = *this;
  while (e > 0) {
    if (e & 1) r = r * base;
    base = base * base;
    e >>= 1;
  }
  return r;
}

MPoly MPoly::coeff_of(const std::string& var, int k) const {
  auto it = std::find(vars_.begin(), vars_.end(), var);
  if (it == vars_.end()) {
    if (k == 0) return *this;
    return MPoly();
  }
  const size_t i = it - vars_.begin();
  MPoly out;
  out.vars_ = vars_;
  for (const auto& [e, c] : terms_) {
    if (e[i] != k) continue;
    std::vector<int> ne = e;
    ne[i] = 0;
    out.terms_.emplace(std::move(ne), c);
  }
  out.normalize();
  return out;
}

MPoly MPoly::substituted(const std::map<std::string, MPoly>& repl) const {
  MPoly out;
  for (const auto& [e, c] : terms_) {
    MPoly term(c);
    for (size_t i = 0; i < vars_.size(); ++i) {
      if (e[i] == 0) continue;
      auto it = repl.find(vars_[i]);
      MPoly base = (it == repl.end()) ? variable(vars_[i]) : it->second;
      term = term * base.pow(e[i]);
    }
    out = out + term;
  }
  return out;
}

MPoly MPoly::derivative(const std::string& var) const {
  auto it = std::find(vars_.begin(), vars_.end(), var);
  if (it == vars_.end()) return MPoly();
  const size_t i = it - vars_.begin();
  MPoly out;
  out.vars_ = vars_;
  for (const auto& [e, c] : terms_) {
    if (e[i] == 0) continue;
    std::vector<int> ne = e;
    ne[i] -= 1;
    out.terms_.emplace(std::move(ne), c * Scalar(e[i]));
  }
  out.normalize();
  return out;
}

MPoly MPoly::substituted_q(const Scalar& v) const {
  MPoly out;
  out.vars_ = vars_;
  for (const auto& [e, c] : terms_) {
    Scalar nc = c.substitute_q(v);
    if (!nc.is_zero()) out.terms_.emplace(e, std::move(nc));
  }
  out.normalize();
  return out;
}

Series<Scalar> MPoly::to_series(const std::vector<std::string>& order) const {
  for (const std::string& v : vars_)
    if (std::find(order.begin(), order.end(), v) == order.end())
      throw InputError("MPoly::to_series: order misses variable '" + v + "'");
  std::vector<int> pos(order.size(), -1);
  for (size_t i = 0; i < order.size(); ++i) {
    auto it = std::find(vars_.begin(), vars_.end(), order[i]);
    if (it != vars_.end()) pos[i] = static_cast<int>(it - vars_.begin());
  }
  std::vector<Range> r(order.size(), Range{0, 0});
  for (size_t i = 0; i < order.size(); ++i) {
    if (pos[i] < 0) continue;
    r[i] = Range{min_degree(order[i]), std::max(0, degree(order[i]))};
  }
  auto out = Series<Scalar>::exact(order, Window(std::move(r)));
  for (const auto& [e, c] : terms_) {
    std::vector<int> ne(order.size(), 0);
    for (size_t i = 0; i < order.size(); ++i)
      if (pos[i] >= 0) ne[i] = e[pos[i]];
    out.coeffs.emplace(std::move(ne), c);
  }
  return out;
}

std::string MPoly::str() const {
  if (is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    bool printed = false;
    if (!c.is_one() || std::all_of(e.begin(), e.end(), [](int x) { return x == 0; })) {
      os << "(" << c.str() << ")";
      printed = true;
    }
    for (size_t i = 0; i < vars_.size(); ++i) {
      if (e[i] == 0) continue;
      if (printed) os << "*";
      os << vars_[i];
      if (e[i] != 1) os << "^" << e[i];
      printed = true;
    }
  }
  return os.str();
}

}  // namespace qvc
