#pragma once

#include <map>
#include <string>
#include <vector>

#include "qvc/scalar.hpp"
#include "qvc/series.hpp"

namespace qvc {

// Multivariate polynomial over the scalar field, nonnegative exponents.
// Canonical form: variable list sorted, every listed variable actually
// occurring, no zero coefficients stored.  Equal polynomials have identical
// representations.
class MPoly {
 public:
  MPoly() = default;
  explicit MPoly(const Scalar& c);
  explicit MPoly(long c) : MPoly(Scalar(c)) {}
  static MPoly variable(const std::string& name, int power = 1);
  static MPoly monomial(const Scalar& c, const std::vector<std::pair<std::string, int>>& vp);

  const std::vector<std::string>& vars() const { return vars_; }
  const std::map<std::vector<int>, Scalar>& terms() const { return terms_; }

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const { return vars_.empty(); }
  // The constant term (the polynomial's value when every variable is 0).
  Scalar constant_term() const;

  int degree(const std::string& var) const;      // -1 on zero; 0 on absent var
  int min_degree(const std::string& var) const;  // 0 on zero or absent var

  MPoly operator-() const;
  friend MPoly operator+(const MPoly& a, const MPoly& b);
  friend MPoly operator-(const MPoly& a, const MPoly& b);
  friend MPoly operator*(const MPoly& a, const MPoly& b);
  friend bool operator==(const MPoly& a, const MPoly& b) {
    return a.vars_ == b.vars_ && a.terms_ == b.terms_;
  }
  friend bool operator!=(const MPoly& a, const MPoly& b) { return !(a == b); }

  MPoly scaled(const Scalar& s) const;
  MPoly pow(int e) const;  // e >= 0

  // Coefficient of var^k, a polynomial in the remaining variables.
  MPoly coeff_of(const std::string& var, int k) const;

  // Simultaneous substitution of polynomials for variables; unlisted
  // variables stay themselves.
  MPoly substituted(const std::map<std::string, MPoly>& repl) const;

  MPoly derivative(const std::string& var) const;

  // Replace q throughout the coefficients (poles in a coefficient raise
  // DomainError via Scalar).
  MPoly substituted_q(const Scalar& v) const;

  // Exact windowed series on the given variable order (a superset of vars()).
  Series<Scalar> to_series(const std::vector<std::string>& order) const;

  std::string str() const;

 private:
  std::vector<std::string> vars_;  // sorted
  std::map<std::vector<int>, Scalar> terms_;
  void normalize();
  static MPoly on_vars(const MPoly& p, const std::vector<std::string>& vs);
  friend class RationalFunction;
};

}  // namespace qvc
