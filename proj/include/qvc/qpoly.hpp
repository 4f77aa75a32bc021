#pragma once

#include <gmpxx.h>

#include <string>
#include <utility>
#include <vector>

#include "qvc/errors.hpp"

namespace qvc {

// Dense polynomial in the quantum parameter q over Q.  c_[i] is the
// coefficient of q^i.  Invariant: no trailing zero coefficients; the zero
// polynomial has an empty coefficient vector.
class QPoly {
 public:
  QPoly() = default;
  explicit QPoly(const mpq_class& c);
  explicit QPoly(long c);
  QPoly(std::vector<mpq_class> coeffs);

  static QPoly variable(int power = 1);  // q^power, power >= 0

  int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1: zero
  bool is_zero() const { return c_.empty(); }
  bool is_one() const { return c_.size() == 1 && c_[0] == 1; }
  bool is_constant() const { return c_.size() <= 1; }
  mpq_class coeff(int i) const;
  const mpq_class& leading() const;

  QPoly operator-() const;
  QPoly& operator+=(const QPoly& o);
  QPoly& operator-=(const QPoly& o);
  friend QPoly operator+(QPoly a, const QPoly& b) { return a += b; }
  friend QPoly operator-(QPoly a, const QPoly& b) { return a -= b; }
  friend QPoly operator*(const QPoly& a, const QPoly& b);
  friend bool operator==(const QPoly& a, const QPoly& b) { return a.c_ == b.c_; }
  friend bool operator!=(const QPoly& a, const QPoly& b) { return !(a == b); }

  QPoly scaled(const mpq_class& s) const;

  // Euclidean division: returns {quotient, remainder} with
  // a == quotient*b + remainder and deg remainder < deg b.  b must be nonzero.
  static std::pair<QPoly, QPoly> divmod(const QPoly& a, const QPoly& b);

  // Monic gcd; gcd(0,0) = 0.
  static QPoly gcd(QPoly a, QPoly b);

  mpq_class eval(const mpq_class& q0) const;

  std::string str() const;  // e.g. "q^2 - 1"

 private:
  std::vector<mpq_class> c_;
  void strip();
};

}  // namespace qvc
