#pragma once

#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qvc/scalar.hpp"
#include "qvc/series.hpp"

namespace qvc {

// Finite-dimensional-per-degree graded coefficient space, truncated at a
// degree cap.  Components beyond the cap are unrepresented: out of budget,
// never zero.
class GradedSpace {
 public:
  enum class Base { Plain, TModule };

  GradedSpace(std::vector<std::vector<std::string>> basis_by_degree, Base base,
              int t_floor = 0);

  Base base() const { return base_; }
  int degree_cap() const { return static_cast<int>(basis_.size()) - 1; }
  int dim(int degree) const;
  const std::vector<std::string>& labels(int degree) const;
  bool has_basis(int degree, const std::string& label) const;

  // t-module encoding: degree d holds the coefficient of t^(d + t_floor).
  int t_floor() const { return t_floor_; }

 private:
  std::vector<std::vector<std::string>> basis_;  // basis_[d] = labels at degree d
  Base base_;
  int t_floor_ = 0;
};

// Vector with finitely many known components plus a taint degree: components
// at degrees >= unknown_from are out of budget.  Stored support stays below
// the taint degree.
class SpaceVector {
 public:
  static constexpr int kFullyKnown = std::numeric_limits<int>::max();

  std::map<std::pair<int, std::string>, Scalar> comps;
  int unknown_from = kFullyKnown;

  SpaceVector() = default;
  static SpaceVector unit(int degree, const std::string& label);
  static SpaceVector unknown_above(int degree);

  bool tainted() const { return unknown_from != kFullyKnown; }
  bool provably_zero() const { return comps.empty() && !tainted(); }

  // Reading inside the unknown region raises; absent known components are 0.
  Scalar component(int degree, const std::string& label) const;
  void add_component(int degree, const std::string& label, const Scalar& c);

  SpaceVector scaled(const Scalar& s) const;
  SpaceVector operator-() const { return scaled(Scalar(-1)); }
  friend SpaceVector operator+(const SpaceVector& a, const SpaceVector& b);
  friend SpaceVector operator-(const SpaceVector& a, const SpaceVector& b) { return a + (-b); }

  // Decidable equality only: true/false when certain, BudgetError when the
  // verdict would depend on out-of-budget components.
  friend bool operator==(const SpaceVector& a, const SpaceVector& b);
  friend bool operator!=(const SpaceVector& a, const SpaceVector& b) { return !(a == b); }

  std::string str() const;
};

// Coefficient hooks so Series<SpaceVector> works; scalar series multiply
// vector series from either side.
inline bool coeff_trivial(const SpaceVector& v) { return v.provably_zero(); }
inline SpaceVector coeff_add(const SpaceVector& a, const SpaceVector& b) { return a + b; }
inline SpaceVector coeff_scale(const SpaceVector& v, const Scalar& s) { return v.scaled(s); }
inline SpaceVector coeff_mul(const Scalar& s, const SpaceVector& v) { return v.scaled(s); }
inline SpaceVector coeff_mul(const SpaceVector& v, const Scalar& s) { return v.scaled(s); }
inline std::string coeff_str(const SpaceVector& v) { return v.str(); }

// Element of E(W) = Hom(W, W((x))): per-basis action coefficients with a
// certified per-degree support floor.  Immutable after construction.
//
//   action(d, label, e): coefficient vector of x^e in a(x)(basis vector)
//   lower_bound(d):      least possibly-nonzero x-exponent on degree-d input
//   upper_bound(d):      greatest possibly-nonzero x-exponent, when one exists
//   uniform_lower/upper: degree-independent support bounds valid on every
//                        input, including out-of-budget degrees (identity: 0/0)
//   weight_floor:        if set, the mode at x-exponent e shifts degree by at
//                        least e + *weight_floor (drives taint propagation);
//                        unset means no bound is claimed.
struct QuantumField {
  std::string name;
  std::shared_ptr<const GradedSpace> space;
  std::function<SpaceVector(int, const std::string&, int)> action;
  std::function<int(int)> lower_bound;
  std::function<std::optional<int>(int)> upper_bound;
  std::optional<int> uniform_lower;
  std::optional<int> uniform_upper;
  std::optional<int> weight_floor;
};

QuantumField identity_field(std::shared_ptr<const GradedSpace> space);
QuantumField zero_field(std::shared_ptr<const GradedSpace> space);
QuantumField field_scaled(const QuantumField& a, const Scalar& s);
QuantumField field_sum(const QuantumField& a, const QuantumField& b);

// a(x)w materialized on a window, with certificates derived from the field's
// support bounds (only claimed when the input is fully known).
Series<SpaceVector> field_apply(const QuantumField& a, const SpaceVector& w,
                                const std::string& var, Range r);

// a(x1)(b(x2)w) on a box.  Per-column iterated structure: the x2 certificates
// come from b, the x1 certificates are only claimed when every nonzero column
// provably lies inside the box and is fully known.
Series<SpaceVector> field_compose(const QuantumField& a, const QuantumField& b,
                                  const SpaceVector& w, const std::string& var1,
                                  const std::string& var2, Range r1, Range r2);

// The C((t))-action f(t)a(x) = f(x)a(x): multiply every basis action by f,
// t renamed to the field variable.  f must be bounded below; coefficients of
// f beyond its certified window raise when actually needed.
QuantumField ct_action(const Series<Scalar>& f, const QuantumField& a);

// Field backed by explicit per-basis series (each bounded below).  Reads
// outside a stored window follow that window's certificates.
QuantumField make_table_field(
    const std::string& name, std::shared_ptr<const GradedSpace> space,
    std::map<std::pair<int, std::string>, Series<SpaceVector>> table);

// Free-boson Fock space truncated at degree_cap, with the generating field
// alpha(x) = sum_n alpha_n x^{-n-1}, [alpha_m, alpha_n] = m*level*delta_{m+n,0},
// alpha_n vac = 0 for n >= 0.  Basis at degree n: partitions of n.
std::pair<std::shared_ptr<const GradedSpace>, QuantumField>
build_heisenberg_fock(const Scalar& level, int degree_cap);

// ---------------------------------------------------------------------------
// t-module spaces
// ---------------------------------------------------------------------------
// A free module over windowed Laurent series in t, of finite rank, at desk
// scale: degree d encodes the coefficient of t^(d + t_floor) per rank label.
// Content above the degree cap is out of budget (taint, never zero); content
// below the representable floor cannot be stored and raises instead.

// Rank labels "u1", ..., "u<rank>" at every degree; representable t-exponents
// run over [t_floor, t_cap].
std::shared_ptr<const GradedSpace> build_free_t_module(int rank, int t_floor, int t_cap);

// The vector f(t)*(rank label) for a one-variable windowed series f.  An
// uncapped window taints the result above its top.
SpaceVector t_series_vector(const Series<Scalar>& f, const std::string& label,
                            const GradedSpace& space);

// Multiplication by t^m.  Components pushed above the degree cap become
// out-of-budget taint; components pushed below degree 0 raise.
SpaceVector t_shift_vector(const SpaceVector& w, int m, const GradedSpace& space);

// Multiplication by a one-variable windowed series g(t).  g needs
// certificates on both sides (a Laurent polynomial); taint on w propagates.
SpaceVector t_multiply(const Series<Scalar>& g, const SpaceVector& w,
                       const GradedSpace& space);

// Field acting as multiplication by a two-variable series m(t, x), with t
// acting as the module shift.  m must carry both t-certificates and an
// x-floor; an uncapped x-window refuses reads beyond its top.
QuantumField multiplication_field(const std::string& name,
                                  std::shared_ptr<const GradedSpace> space,
                                  const Series<Scalar>& m);

// The shifted action on fields over a t-module: the multiplier expands as a
// Taylor series f(t+x) = sum_j f_j(t) x^j nonnegative in x, each f_j(t)
// acting by module shifts.  f must carry certificates on both sides.
QuantumField ct1_action(const Series<Scalar>& f, const QuantumField& a);

}  // namespace qvc
