#include "qvc/scalar.hpp"

#include <sstream>

namespace qvc {

Scalar::Scalar(QPoly num) : num_(std::move(num)), den_(QPoly(1L)) {}

Scalar::Scalar(QPoly num, QPoly den) : num_(std::move(num)), den_(std::move(den)) {
  if (den_.is_zero()) throw DomainError("Scalar: zero denominator");
  reduce();
}

Scalar Scalar::q(int power) {
  if (power >= 0) return Scalar(QPoly::variable(power));
  return Scalar(QPoly(1L), QPoly::variable(-power));
}

void Scalar::reduce() {
  if (num_.is_zero()) {
    den_ = QPoly(1L);
    return;
  }
  if (!den_.is_one()) {
    QPoly g = QPoly::gcd(num_, den_);
    if (!g.is_one()) {
      num_ = QPoly::divmod(num_, g).first;
      den_ = QPoly::divmod(den_, g).first;
    }
    if (den_.leading() != 1) {
      const mpq_class inv = 1 / den_.leading();
      num_ = num_.scaled(inv);
      den_ = den_.scaled(inv);
    }
  }
}

Scalar Scalar::operator-() const {
  Scalar r(*this);
  r.num_ = -r.num_;
  return r;
}

Scalar operator+(const Scalar& a, const Scalar& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.den_.is_one() && b.den_.is_one()) return Scalar(a.num_ + b.num_);
  return Scalar(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

Scalar operator-(const Scalar& a, const Scalar& b) { return a + (-b); }

Scalar operator*(const Scalar& a, const Scalar& b) {
  if (a.is_zero() || b.is_zero()) return Scalar();
  if (a.den_.is_one() && b.den_.is_one()) return Scalar(a.num_ * b.num_);
  return Scalar(a.num_ * b.num_, a.den_ * b.den_);
}

Scalar operator/(const Scalar& a, const Scalar& b) {
  if (b.is_zero()) throw DomainError("Scalar: division by zero");
  if (a.is_zero()) return Scalar();
  return Scalar(a.num_ * b.den_, a.den_ * b.num_);
}

Scalar Scalar::inv() const {
  if (is_zero()) throw DomainError("Scalar::inv: zero");
  return Scalar(den_, num_);
}

Scalar Scalar::pow(int e) const {
  if (e == 0) return Scalar(1);
  if (is_zero()) {
    if (e < 0) throw DomainError("Scalar::pow: negative power of zero");
    return Scalar();
  }
  Scalar base = e > 0 ? *this : inv();
  unsigned long k = e > 0 ? e : -static_cast<long>(e);
  Scalar acc(1);
  while (k) {
    if (k & 1) acc *= base;
    base *= base;
    k >>= 1;
  }
  return acc;
}

mpq_class Scalar::evaluate_at(const mpq_class& q0) const {
  const mpq_class d = den_.eval(q0);
  if (d == 0) {
    // The representation is reduced, so a vanishing denominator is a
    // genuine pole.
    throw DomainError("Scalar::evaluate_at: pole at q = " + q0.get_str());
  }
  return num_.eval(q0) / d;
}

Scalar Scalar::substitute_q(const Scalar& v) const {
  auto eval_poly = [&v](const QPoly& p) {
    Scalar acc(0);
    for (int i = p.degree(); i >= 0; --i) acc = acc * v + Scalar(p.coeff(i));
    return acc;
  };
  const Scalar d = eval_poly(den_);
  if (d.is_zero()) throw DomainError("Scalar::substitute_q: pole");
  return eval_poly(num_) / d;
}

std::string Scalar::str() const {
  if (den_.is_one()) return num_.str();
  std::ostringstream os;
  os << "(" << num_.str() << ")/(" << den_.str() << ")";
  return os.str();
}

}  // namespace qvc
