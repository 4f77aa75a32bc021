#include "qvc/qpoly.hpp"

#include <sstream>

namespace qvc {

QPoly::QPoly(const mpq_class& c) {
  if (c != 0) c_.push_back(c);
}

QPoly::QPoly(long c) {
  if (c != 0) c_.push_back(mpq_class(c));
}

QPoly::QPoly(std::vector<mpq_class> coeffs) : c_(std::move(coeffs)) { strip(); }

QPoly QPoly::variable(int power) {
  if (power < 0) throw InputError("QPoly::variable: negative power");
  QPoly p;
  p.c_.assign(power + 1, mpq_class(0));
  p.c_[power] = 1;
  return p;
}

void QPoly::strip() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

mpq_class QPoly::coeff(int i) const {
  if (i < 0 || i >= static_cast<int>(c_.size())) return mpq_class(0);
  return c_[i];
}

const mpq_class& QPoly::leading() const {
  if (c_.empty()) throw DomainError("QPoly::leading: zero polynomial");
  return c_.back();
}

QPoly QPoly::operator-() const {
  QPoly r(*this);
  for (auto& x : r.c_) x = -x;
  return r;
}

QPoly& QPoly::operator+=(const QPoly& o) {
  if (c_.size() < o.c_.size()) c_.resize(o.c_.size(), mpq_class(0));
  for (size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
  strip();
  return *this;
}

QPoly& QPoly::operator-=(const QPoly& o) {
  if (c_.size() < o.c_.size()) c_.resize(o.c_.size(), mpq_class(0));
  for (size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
  strip();
  return *this;
}

QPoly operator*(const QPoly& a, const QPoly& b) {
  if (a.is_zero() || b.is_zero()) return QPoly();
  QPoly r;
  r.c_.assign(a.c_.size() + b.c_.size() - 1, mpq_class(0));
  for (size_t i = 0; i < a.c_.size(); ++i) {
    if (a.c_[i] == 0) continue;
    for (size_t j = 0; j < b.c_.size(); ++j) {
      if (b.c_[j] == 0) continue;
      r.c_[i + j] += a.c_[i] * b.c_[j];
    }
  }
  r.strip();
  return r;
}

QPoly QPoly::scaled(const mpq_class& s) const {
  if (s == 0) return QPoly();
  QPoly r(*this);
  for (auto& x : r.c_) x *= s;
  return r;
}

std::pair<QPoly, QPoly> QPoly::divmod(const QPoly& a, const QPoly& b) {
  if (b.is_zero()) throw DomainError("QPoly::divmod: division by zero polynomial");
  QPoly rem = a, quot;
  const int db = b.degree();
  if (rem.degree() >= db)
    quot.c_.assign(rem.degree() - db + 1, mpq_class(0));
  while (!rem.is_zero() && rem.degree() >= db) {
    const int k = rem.degree() - db;
    const mpq_class f = rem.leading() / b.leading();
    quot.c_[k] += f;
    for (int i = 0; i <= db; ++i) rem.c_[k + i] -= f * b.c_[i];
    rem.strip();
  }
  quot.strip();
  return {quot, rem};
}

QPoly QPoly::gcd(QPoly a, QPoly b) {
  while (!b.is_zero()) {
    QPoly r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.is_zero() && a.leading() != 1) {
    const mpq_class inv = 1 / a.leading();
    a = a.scaled(inv);
  }
  return a;
}

mpq_class QPoly::eval(const mpq_class& q0) const {
  mpq_class acc(0);
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * q0 + *it;
  return acc;
}

std::string QPoly::str() const {
  if (is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int i = degree(); i >= 0; --i) {
    const mpq_class& c = c_[i];
    if (c == 0) continue;
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    first = false;
    const mpq_class a = abs(c);
    if (i == 0 || a != 1) os << a.get_str();
    if (i > 0) {
      if (a != 1) os << "*";
      os << "q";
      if (i > 1) os << "^" << i;
    }
  }
  return os.str();
}

}  // namespace qvc
