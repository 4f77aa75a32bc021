#pragma once

#include <map>
#include <string>

#include "qvc/mpoly.hpp"

namespace qvc {

// Quotient of multivariate polynomials.  No canonical form is attempted
// (multivariate gcd is not worth its weight here); equality is decided by
// cross-multiplication, which is exact.
class RationalFunction {
 public:
  RationalFunction() : num_(), den_(MPoly(1L)) {}
  RationalFunction(MPoly num, MPoly den);
  explicit RationalFunction(const MPoly& num) : num_(num), den_(MPoly(1L)) {}
  explicit RationalFunction(const Scalar& c) : num_(MPoly(c)), den_(MPoly(1L)) {}

  const MPoly& num() const { return num_; }
  const MPoly& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }

  RationalFunction operator-() const { return {-num_, den_}; }
  friend RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) {
    return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_};
  }
  friend RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) {
    return a + (-b);
  }
  friend RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
    return {a.num_ * b.num_, a.den_ * b.den_};
  }
  friend RationalFunction operator/(const RationalFunction& a, const RationalFunction& b);
  RationalFunction inv() const;
  RationalFunction pow(int e) const;  // any sign

  friend bool operator==(const RationalFunction& a, const RationalFunction& b) {
    return (a.num_ * b.den_) == (b.num_ * a.den_);
  }
  friend bool operator!=(const RationalFunction& a, const RationalFunction& b) {
    return !(a == b);
  }

  RationalFunction substituted(const std::map<std::string, MPoly>& repl) const;
  RationalFunction derivative(const std::string& var) const;
  RationalFunction substituted_q(const Scalar& v) const;

  std::string str() const;

 private:
  MPoly num_, den_;
};

}  // namespace qvc
