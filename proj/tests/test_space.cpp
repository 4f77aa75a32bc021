#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "oracles.hpp"
#include "qvc/space.hpp"

using namespace qvc;

namespace {

// Convert an oracle state into a SpaceVector, or report that it exceeds cap.
SpaceVector from_oracle(const oracle::Fock& f, int cap) {
  SpaceVector v;
  for (const auto& [parts, c] : f) {
    int deg = 0;
    for (int p : parts) deg += p;
    REQUIRE(deg <= cap);
    std::ostringstream os;
    for (size_t i = 0; i < parts.size(); ++i) {
      if (i) os << ".";
      os << parts[i];
    }
    v.add_component(deg, parts.empty() ? "vac" : os.str(), c);
  }
  return v;
}

int oracle_degree_max(const oracle::Fock& f) {
  int m = 0;
  for (const auto& [parts, c] : f) {
    int deg = 0;
    for (int p : parts) deg += p;
    m = std::max(m, deg);
  }
  return m;
}

}  // namespace

TEST_CASE("graded space shape: partition dimensions and label hygiene") {
  auto [space, alpha] = build_heisenberg_fock(Scalar(1), 6);
  CHECK(space->degree_cap() == 6);
  for (int n = 0; n <= 6; ++n)
    CHECK(space->dim(n) == oracle::partition_count(n, n == 0 ? 1 : n));
  CHECK(space->dim(3) == 3);
  CHECK(space->dim(7) == 0);
  CHECK(space->has_basis(0, "vac"));
  CHECK(space->has_basis(3, "2.1"));
  CHECK_FALSE(space->has_basis(3, "1.2"));  // labels are descending

  CHECK_THROWS_AS(GradedSpace({{"a", "a"}}, GradedSpace::Base::Plain), InputError);
  CHECK_THROWS_AS(build_heisenberg_fock(Scalar(1), 0), InputError);
}

TEST_CASE("vector semantics: components, taint, and decidable equality") {
  SpaceVector v = SpaceVector::unit(2, "2");
  v.add_component(1, "1", Scalar::q());
  CHECK(v.component(2, "2") == Scalar(1));
  CHECK(v.component(0, "vac") == Scalar(0));

  SpaceVector t = SpaceVector::unknown_above(2);
  CHECK(t.tainted());
  CHECK_FALSE(t.provably_zero());
  CHECK(t.component(1, "1") == Scalar(0));
  CHECK_THROWS_AS(t.component(2, "2"), UnknownCoefficientError);
  CHECK_THROWS_AS(t.component(5, "x"), UnknownCoefficientError);

  // Adding: knowledge intersects; entries in the unknown region are dropped.
  SpaceVector sum = v + t;
  CHECK(sum.unknown_from == 2);
  CHECK(sum.component(1, "1") == Scalar::q());
  CHECK_THROWS_AS(sum.component(2, "2"), UnknownCoefficientError);

  // Scaling by exact zero erases the unknown region.
  CHECK(t.scaled(Scalar(0)).provably_zero());
  CHECK_FALSE(t.scaled(Scalar(2)).provably_zero());

  // Equality: certain answers where decidable, BudgetError otherwise.
  CHECK(v == v);
  CHECK_FALSE(v == SpaceVector::unit(2, "2"));
  CHECK_THROWS_AS(static_cast<void>(sum == sum), BudgetError);
  SpaceVector w = SpaceVector::unit(1, "1").scaled(Scalar::q()) + t;
  CHECK_THROWS_AS(static_cast<void>(sum == w), BudgetError);  // equal known parts
  SpaceVector x = SpaceVector::unit(1, "1") + t;
  CHECK_FALSE(sum == x);  // differs below every unknown region
}

TEST_CASE("identity and zero fields are exact") {
  auto [space, alpha] = build_heisenberg_fock(Scalar(1), 4);
  auto one = identity_field(space);
  auto zero = zero_field(space);
  SpaceVector w = SpaceVector::unit(2, "1.1").scaled(Scalar::q()) + SpaceVector::unit(1, "1");

  auto s = field_apply(one, w, "x", {-3, 3});
  CHECK(s.floored == std::vector<char>{1});
  CHECK(s.capped == std::vector<char>{1});
  CHECK(s.coeff({0}) == w);
  CHECK(s.coeff({1}).provably_zero());
  CHECK(s.coeff({100}).provably_zero());  // certified far outside

  auto z = field_apply(zero, w, "x", {-3, 3});
  CHECK(z.floored == std::vector<char>{1});
  CHECK(z.capped == std::vector<char>{1});
  CHECK(z.coeffs.empty());
}

TEST_CASE("generating field matches the recursive-commutation oracle") {
  Scalar level = Scalar::q(2);  // a nontrivial central value
  const int cap = 6;
  auto [space, alpha] = build_heisenberg_fock(level, cap);

  for (int d = 0; d <= cap; ++d) {
    for (const auto& lbl : space->labels(d)) {
      // Recover the part list from the label for the oracle.
      std::vector<int> parts;
      if (lbl != "vac") {
        size_t pos = 0;
        while (pos < lbl.size()) {
          size_t dot = lbl.find('.', pos);
          if (dot == std::string::npos) dot = lbl.size();
          parts.push_back(std::stoi(lbl.substr(pos, dot - pos)));
          pos = dot + 1;
        }
      }
      oracle::Fock state = oracle::fock_unit(parts);
      for (int e = -cap - 2; e <= cap - d - 1; ++e) {
        oracle::Fock expect = oracle::alpha_coeff(e, state, level);
        SpaceVector got = alpha.action(d, lbl, e);
        if (oracle_degree_max(expect) <= cap && !got.tainted()) {
          CHECK(got == from_oracle(expect, cap));
        }
      }
      // Creation beyond the cap is out of budget, not zero.
      SpaceVector over = alpha.action(d, lbl, cap - d);
      CHECK(over.tainted());
      CHECK(over.unknown_from == cap + 1);
    }
  }
}

TEST_CASE("lower truncation: certified floors hold pointwise") {
  auto [space, alpha] = build_heisenberg_fock(Scalar(1), 5);
  for (int d = 0; d <= 5; ++d)
    for (const auto& lbl : space->labels(d)) {
      CHECK(alpha.lower_bound(d) == -d - 1);
      for (int e = -d - 4; e < -d - 1; ++e)
        CHECK(alpha.action(d, lbl, e).provably_zero());
    }

  // Spec of the applied series: alpha(x)vac starts at x^0 with the one-part
  // state; the alpha_0 coefficient vanishes.
  auto s = field_apply(alpha, SpaceVector::unit(0, "vac"), "x", {-3, 3});
  CHECK(s.floored == std::vector<char>{1});
  CHECK(s.capped == std::vector<char>{0});
  CHECK(s.coeff({-1}).provably_zero());
  CHECK(s.coeff({0}) == SpaceVector::unit(1, "1"));
  CHECK(s.coeff({2}) == SpaceVector::unit(3, "3"));
  CHECK_THROWS_AS(s.coeff({4}), UnknownCoefficientError);
}

TEST_CASE("field application is linear in the vector") {
  Scalar level(3);
  auto [space, alpha] = build_heisenberg_fock(level, 6);
  SpaceVector w1 = SpaceVector::unit(2, "2");
  SpaceVector w2 = SpaceVector::unit(2, "1.1");
  SpaceVector mix = w1.scaled(Scalar(2)) - w2.scaled(Scalar::q());

  auto s1 = field_apply(alpha, w1, "x", {-4, 3});
  auto s2 = field_apply(alpha, w2, "x", {-4, 3});
  auto sm = field_apply(alpha, mix, "x", {-4, 3});
  auto expect = sub(s1.scaled(Scalar(2)), s2.scaled(Scalar::q()));
  CHECK_FALSE(first_difference(sm, expect, sm.window).has_value());
}

TEST_CASE("two-field composition matches the oracle, central term included") {
  Scalar level = Scalar(2);
  const int cap = 8;
  auto [space, alpha] = build_heisenberg_fock(level, cap);
  SpaceVector vac = SpaceVector::unit(0, "vac");

  auto comp = field_compose(alpha, alpha, vac, "x1", "x2", {-4, 3}, {-4, 3});
  // The commutator [alpha_1, alpha_{-1}] = level lands at (x1, x2) = (-2, 0).
  CHECK(comp.coeff({-2, 0}) == vac.scaled(level));

  for (int e1 = -4; e1 <= 3; ++e1)
    for (int e2 = -4; e2 <= 3; ++e2) {
      oracle::Fock expect = oracle::alpha_coeff(
          e1, oracle::alpha_coeff(e2, oracle::fock_unit({}), level), level);
      CHECK(comp.coeff({e1, e2}) == from_oracle(expect, cap));
    }

  // x2 certificates come from the generator's bounds on vac; x1 has no global
  // floor (deep x2 creations feed ever-lower x1 modes).
  CHECK(comp.floored == std::vector<char>{0, 1});
  CHECK(comp.capped == std::vector<char>{0, 0});
}

TEST_CASE("composition with the identity collapses to application") {
  auto [space, alpha] = build_heisenberg_fock(Scalar(1), 6);
  SpaceVector w = SpaceVector::unit(1, "1");

  auto right = field_compose(alpha, identity_field(space), w, "x1", "x2", {-3, 3}, {-2, 2});
  auto applied = field_apply(alpha, w, "x1", {-3, 3});
  for (int e1 = -3; e1 <= 3; ++e1)
    for (int e2 = -2; e2 <= 2; ++e2) {
      if (e2 == 0) {
        CHECK(right.coeff({e1, e2}) == applied.coeff({e1}));
      } else {
        CHECK(right.coeff({e1, e2}).provably_zero());
      }
    }
  // Identity columns are exactly known, so even the x1 flags are certified.
  CHECK(right.floored == std::vector<char>{1, 1});
  CHECK(right.capped == std::vector<char>{0, 1});

  auto left = field_compose(identity_field(space), alpha, w, "x1", "x2", {-1, 1}, {-3, 3});
  for (int e1 = -1; e1 <= 1; ++e1)
    for (int e2 = -3; e2 <= 3; ++e2) {
      if (e1 == 0) {
        CHECK(left.coeff({e1, e2}) == field_apply(alpha, w, "x2", {-3, 3}).coeff({e2}));
      } else {
        CHECK(left.coeff({e1, e2}).provably_zero());
      }
    }
  CHECK(left.floored == std::vector<char>{1, 1});
  CHECK(left.capped == std::vector<char>{1, 0});
}

TEST_CASE("degree budget: taint flows through composition honestly") {
  auto [space, alpha] = build_heisenberg_fock(Scalar(1), 2);  // tiny cap
  SpaceVector vac = SpaceVector::unit(0, "vac");

  auto s = field_apply(alpha, vac, "x", {0, 3});
  CHECK_FALSE(s.coeff({1}).tainted());   // degree 2 fits
  CHECK(s.coeff({2}).tainted());         // degree 3 exceeds the cap
  CHECK_THROWS_AS(s.coeff({2}).component(3, "3"), UnknownCoefficientError);

  // Composition columns that pass through out-of-budget degrees lose the x1
  // certificates, and comparisons on them refuse rather than lie.  (The x2
  // floor is also unclaimed: the certified bound -1 sits below this window.)
  auto comp = field_compose(alpha, alpha, vac, "x1", "x2", {-4, 0}, {0, 3});
  CHECK(comp.floored == std::vector<char>{0, 0});
  // alpha_3 alpha_{-3} vac = 3*vac needs degree 3 in the middle: cap 2 taints
  // the result even though the endpoints fit.
  CHECK(comp.coeff({-4, 2}).tainted());
  CHECK_THROWS_AS(static_cast<void>(comp.coeff({-4, 2}) == vac.scaled(Scalar(3))),
                  BudgetError);
  // The weight floor localizes the damage: low output degrees stay known.
  CHECK(comp.coeff({-4, 2}).unknown_from == 0);  // 3 + (-4) + 1
}

TEST_CASE("scalar-series action on fields: shift, multiply, window discipline") {
  Scalar level(1);
  auto [space, alpha] = build_heisenberg_fock(level, 6);
  SpaceVector vac = SpaceVector::unit(0, "vac");

  // f = 1 leaves the action untouched.
  auto onef = Series<Scalar>::monomial({"t"}, {0}, Scalar(1));
  auto same = ct_action(onef, alpha);
  for (int e = -3; e <= 3; ++e) CHECK(same.action(0, "vac", e) == alpha.action(0, "vac", e));
  CHECK(same.lower_bound(2) == alpha.lower_bound(2));

  // f = t^2: a pure shift by two.
  auto t2 = Series<Scalar>::monomial({"t"}, {2}, Scalar(1));
  auto shifted = ct_action(t2, identity_field(space));
  CHECK(shifted.action(1, "1", 2) == SpaceVector::unit(1, "1"));
  CHECK(shifted.action(1, "1", 0).provably_zero());
  CHECK(shifted.lower_bound(1) == 2);
  CHECK(*shifted.upper_bound(1) == 2);

  // f = t^{-1} + 1 against the windowed-series product oracle.
  auto f = Series<Scalar>::exact({"t"}, Window::uniform(1, -1, 0));
  f.set({-1}, Scalar(1));
  f.set({0}, Scalar(1));
  auto acted = ct_action(f, alpha);
  auto lhs = field_apply(acted, vac, "x", {-2, 4});
  auto rhs = mul(f.renamed("t", "x"), field_apply(alpha, vac, "x", {-2, 5}));
  CHECK_FALSE(first_difference(lhs, rhs, Window(std::vector<Range>{{-2, 4}})).has_value());
  CHECK(acted.lower_bound(0) == -2);
  CHECK(acted.weight_floor.has_value());
  CHECK(*acted.weight_floor == 1);  // 1 - f.hi = 1 - 0

  // An uncapped multiplier leaves the needed tail unknown: reads refuse.
  auto open = Series<Scalar>(std::vector<std::string>{"t"},
                             Window(std::vector<Range>{{0, 1}}));
  open.floored = {1};
  open.set({0}, Scalar(1));
  auto risky = ct_action(open, alpha);
  CHECK_THROWS_AS(risky.action(0, "vac", 1), UnknownCoefficientError);
  // Within reach of the certified window the sum is fine.
  CHECK(risky.action(0, "vac", -1) == alpha.action(0, "vac", -1));

  // Multiplier must be bounded below.
  auto unfloored = Series<Scalar>(std::vector<std::string>{"t"},
                                  Window(std::vector<Range>{{0, 1}}));
  CHECK_THROWS_AS(ct_action(unfloored, alpha), InputError);
}

TEST_CASE("field sums and scalings act pointwise") {
  auto [space, alpha] = build_heisenberg_fock(Scalar(1), 5);
  SpaceVector w = SpaceVector::unit(1, "1");
  auto one = identity_field(space);
  auto mixed = field_sum(alpha, field_scaled(one, Scalar::q()));

  auto lhs = field_apply(mixed, w, "x", {-3, 3});
  auto rhs = add(field_apply(alpha, w, "x", {-3, 3}),
                 field_apply(one, w, "x", {-3, 3}).scaled(Scalar::q()));
  CHECK_FALSE(first_difference(lhs, rhs, lhs.window).has_value());
  CHECK(mixed.lower_bound(1) == -2);
  CHECK(*mixed.weight_floor == 0);  // min of 1 and 0
  CHECK_FALSE(mixed.upper_bound(1).has_value());
}

TEST_CASE("table-backed fields reproduce their source within windows") {
  Scalar level = Scalar::q();
  const int cap = 4;
  auto [space, alpha] = build_heisenberg_fock(level, cap);

  std::map<std::pair<int, std::string>, Series<SpaceVector>> table;
  for (int d = 0; d <= cap; ++d)
    for (const auto& lbl : space->labels(d))
      table.emplace(std::make_pair(d, lbl),
                    field_apply(alpha, SpaceVector::unit(d, lbl), "x", {-d - 1, cap - d - 1}));
  auto tf = make_table_field("alpha-table", space, table);

  for (int d = 0; d <= cap; ++d)
    for (const auto& lbl : space->labels(d)) {
      for (int e = -d - 1; e <= cap - d - 1; ++e)
        CHECK(tf.action(d, lbl, e) == alpha.action(d, lbl, e));
      // Below the stored window the floor certificate answers zero.
      CHECK(tf.action(d, lbl, -d - 3).provably_zero());
      // Above it, the window is uncapped: the read refuses.
      CHECK_THROWS_AS(tf.action(d, lbl, cap - d), UnknownCoefficientError);
      CHECK(tf.lower_bound(d) <= -d - 1);
    }
  // Every stored mode shifts degree by exactly one: the derived floor is 1.
  CHECK(tf.weight_floor.has_value());
  CHECK(*tf.weight_floor == 1);

  // Partial tables construct, but reads on a missing basis vector refuse
  // instead of guessing zero.
  table.erase(std::make_pair(0, std::string("vac")));
  auto partial = make_table_field("partial", space, table);
  CHECK_THROWS_AS(partial.action(0, "vac", -1), InputError);
  CHECK(partial.action(1, "1", -2) == alpha.action(1, "1", -2));
  std::map<std::pair<int, std::string>, Series<SpaceVector>> none;
  CHECK_THROWS_AS(make_table_field("empty", space, none), InputError);
}

TEST_CASE("t-module spaces: shifts, series vectors, and the shifted action") {
  // Rank-1 free module, representable t-exponents [-4, 8].
  auto tmod = build_free_t_module(1, -4, 8);
  CHECK(tmod->base() == GradedSpace::Base::TModule);
  CHECK(tmod->t_floor() == -4);
  CHECK(tmod->degree_cap() == 12);
  CHECK(tmod->dim(5) == 1);

  // Degree d holds t^(d-4): the constant vector t^0 u1 sits at degree 4.
  auto one = Series<Scalar>::monomial({"t"}, {0}, Scalar(1));
  SpaceVector w = t_series_vector(one, "u1", *tmod);
  CHECK(w == SpaceVector::unit(4, "u1"));

  // Laurent-polynomial content lands per exponent; uncapped windows taint.
  auto lp = Series<Scalar>::exact({"t"}, Window::uniform(1, -2, 3));
  lp.set({-2}, Scalar(5));
  lp.set({3}, Scalar(-1));
  SpaceVector lv = t_series_vector(lp, "u1", *tmod);
  CHECK(lv.component(2, "u1") == Scalar(5));
  CHECK(lv.component(7, "u1") == Scalar(-1));
  CHECK_FALSE(lv.tainted());
  auto open = Series<Scalar>(std::vector<std::string>{"t"},
                             Window(std::vector<Range>{{0, 2}}));
  open.floored = {1};
  open.set({0}, Scalar(1));
  SpaceVector ov = t_series_vector(open, "u1", *tmod);
  CHECK(ov.tainted());
  CHECK(ov.unknown_from == 7);  // t^3 and beyond unknown

  // Shifts: above the cap taints, below the floor raises.
  CHECK(t_shift_vector(w, 3, *tmod) == SpaceVector::unit(7, "u1"));
  CHECK(t_shift_vector(w, 8, *tmod) == SpaceVector::unit(12, "u1"));
  CHECK(t_shift_vector(w, 9, *tmod).tainted());
  CHECK(t_shift_vector(w, -4, *tmod) == SpaceVector::unit(0, "u1"));
  CHECK_THROWS_AS(t_shift_vector(w, -5, *tmod), BudgetError);

  // Multiplication field m(t, x) = 1 + t*x.
  auto m = Series<Scalar>::exact({"t", "x"}, Window::uniform(2, 0, 1));
  m.set({0, 0}, Scalar(1));
  m.set({1, 1}, Scalar(1));
  QuantumField mf = multiplication_field("m", tmod, m);
  CHECK(mf.action(4, "u1", 0) == SpaceVector::unit(4, "u1"));
  CHECK(mf.action(4, "u1", 1) == SpaceVector::unit(5, "u1"));
  CHECK(mf.action(4, "u1", 2).provably_zero());
  CHECK(mf.lower_bound(4) == 0);
  CHECK(*mf.upper_bound(4) == 1);

  // Shifted action, f = 1: unchanged.
  auto same = ct1_action(one, mf);
  for (int e = 0; e <= 2; ++e) CHECK(same.action(4, "u1", e) == mf.action(4, "u1", e));

  // f = t: the multiplier expands as t + x, so on the identity the value at
  // x^0 is t*w and at x^1 is w itself.
  auto t1 = Series<Scalar>::monomial({"t"}, {1}, Scalar(1));
  auto lin = ct1_action(t1, identity_field(tmod));
  CHECK(lin.action(4, "u1", 0) == SpaceVector::unit(5, "u1"));
  CHECK(lin.action(4, "u1", 1) == SpaceVector::unit(4, "u1"));
  CHECK(lin.action(4, "u1", 2).provably_zero());

  // f = t^{-1} against the geometric-expansion oracle: the multiplier is
  // sum_j c_j t^{-1-j} x^j where the c_j satisfy the clearing recurrence
  // c_0 = 1, c_j + c_{j-1} = 0 (so that (t + x) * expansion = 1).
  auto tinv = Series<Scalar>::monomial({"t"}, {-1}, Scalar(1));
  auto geo = ct1_action(tinv, identity_field(tmod));
  Scalar c(1);
  for (int j = 0; j <= 3; ++j) {
    SpaceVector got = geo.action(4, "u1", j);
    CHECK(got == t_shift_vector(w, -1 - j, *tmod).scaled(c));
    c = -c;  // oracle recurrence
  }
  // Deep Taylor tail eventually drops below the representable floor.
  CHECK_THROWS_AS(geo.action(4, "u1", 4), BudgetError);

  // Guards: shifted action demands a t-module and two-sided certificates.
  auto [fock, alpha] = build_heisenberg_fock(Scalar(1), 4);
  CHECK_THROWS_AS(ct1_action(one, alpha), InputError);
  CHECK_THROWS_AS(ct1_action(open, identity_field(tmod)), InputError);
}
