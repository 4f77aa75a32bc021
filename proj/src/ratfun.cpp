#include "qvc/ratfun.hpp"

#include "qvc/errors.hpp"

namespace qvc {

RationalFunction::RationalFunction(MPoly num, MPoly den)
    : num_(std::move(num)), den_(std::move(den)) {
  if (den_.is_zero()) throw DomainError("RationalFunction: zero denominator");
}

RationalFunction operator/(const RationalFunction& a, const RationalFunction& b) {
  if (b.is_zero()) throw DomainError("RationalFunction: division by zero");
  return {a.num_ * b.den_, a.den_ * b.num_};
}

RationalFunction RationalFunction::inv() const {
  if (is_zero()) throw DomainError("RationalFunction::inv: zero");
  return {den_, num_};
}

RationalFunction RationalFunction::pow(int e) const {
  if (e < 0) return inv().pow(-e);
  return {num_.pow(e), den_.pow(e)};
}

RationalFunction RationalFunction::substituted(const std::map<std::string, MPoly>& repl) const {
  MPoly d = den_.substituted(repl);
  if (d.is_zero())
    throw DomainError("RationalFunction::substituted: denominator vanishes identically");
  return {num_.substituted(repl), std::move(d)};
}

RationalFunction RationalFunction::derivative(const std::string& var) const {
  // (n/d)' = (n'd - nd')/d^2
  return {num_.derivative(var) * den_ - num_ * den_.derivative(var), den_ * den_};
}

RationalFunction RationalFunction::substituted_q(const Scalar& v) const {
  MPoly d = den_.substituted_q(v);
  if (d.is_zero())
    throw DomainError("RationalFunction::substituted_q: denominator vanishes at the point");
  return {num_.substituted_q(v), std::move(d)};
}

std::string RationalFunction::str() const {
  if (den_ == MPoly(1L)) return num_.str();
  return "(" + num_.str() + ") / (" + den_.str() + ")";
}

}  // namespace qvc
