#pragma once

#include <gmpxx.h>

#include <string>

#include "qvc/qpoly.hpp"

namespace qvc {

// Element of the field Q(q): a reduced fraction of polynomials in q.
// Canonical form: gcd(num, den) = 1, den monic, zero stored as 0/1.
// Equal field elements have identical representations.
class Scalar {
 public:
  Scalar() : num_(), den_(QPoly(1L)) {}
  Scalar(long n) : Scalar(QPoly(n)) {}                  // NOLINT: implicit
  Scalar(const mpq_class& n) : Scalar(QPoly(n)) {}      // NOLINT: implicit
  explicit Scalar(QPoly num);
  Scalar(QPoly num, QPoly den);

  static Scalar q(int power = 1);  // q^power, any sign

  const QPoly& num() const { return num_; }
  const QPoly& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_one() const { return num_.is_one() && den_.is_one(); }
  bool is_constant() const { return num_.is_constant() && den_.is_one(); }

  Scalar operator-() const;
  friend Scalar operator+(const Scalar& a, const Scalar& b);
  friend Scalar operator-(const Scalar& a, const Scalar& b);
  friend Scalar operator*(const Scalar& a, const Scalar& b);
  friend Scalar operator/(const Scalar& a, const Scalar& b);
  Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
  Scalar& operator-=(const Scalar& o) { return *this = *this - o; }
  Scalar& operator*=(const Scalar& o) { return *this = *this * o; }
  Scalar& operator/=(const Scalar& o) { return *this = *this / o; }

  friend bool operator==(const Scalar& a, const Scalar& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

  Scalar inv() const;
  Scalar pow(int e) const;  // e may be negative; 0^0 = 1, 0^negative throws

  // Substitutes a rational number for q.  Throws DomainError at a pole.
  mpq_class evaluate_at(const mpq_class& q0) const;

  // Substitutes a scalar for q (used to specialize symbolic data).
  Scalar substitute_q(const Scalar& v) const;

  std::string str() const;

 private:
  QPoly num_, den_;
  void reduce();
};

}  // namespace qvc
