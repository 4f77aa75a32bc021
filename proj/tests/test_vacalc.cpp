#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qvc/series.hpp"
#include "qvc/space.hpp"
#include "qvc/vacalc.hpp"

using namespace qvc;

namespace {

std::string label_of(const std::vector<int>& parts) {
  if (parts.empty()) return "vac";
  std::string s;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) s += ".";
    s += std::to_string(parts[i]);
  }
  return s;
}

int degree_of(const std::vector<int>& parts) {
  int d = 0;
  for (int p : parts) d += p;
  return d;
}

// The library vector must carry exactly the oracle's components.
void require_matches(const SpaceVector& got, const oracle::Fock& want) {
  REQUIRE(!got.tainted());
  size_t known = 0;
  for (const auto& [parts, c] : want) {
    if (c.is_zero()) continue;
    CAPTURE(label_of(parts));
    CHECK(got.component(degree_of(parts), label_of(parts)) == c);
    ++known;
  }
  CHECK(got.comps.size() == known);
}

void gen_parts(int n, int maxp, std::vector<int>& cur,
               std::vector<BasisRef>& out, int degree) {
  if (n == 0) {
    out.emplace_back(degree, label_of(cur));
    return;
  }
  for (int p = std::min(n, maxp); p >= 1; --p) {
    cur.push_back(p);
    gen_parts(n - p, p, cur, out, degree);
    cur.pop_back();
  }
}

std::vector<BasisRef> labels_up_to(int dmax) {
  std::vector<BasisRef> out;
  for (int d = 0; d <= dmax; ++d) {
    std::vector<int> cur;
    gen_parts(d, d, cur, out, d);
  }
  return out;
}

// Normal-ordered pair field coefficient: sum over ordered splits a + b = -m-2
// of alpha_a alpha_b with the annihilating half applied first.  Independent of
// the product pipeline.
oracle::Fock normal_pair(int m, const oracle::Fock& v, const Scalar& level,
                         int bound) {
  oracle::Fock out;
  for (int b = -bound; b <= bound; ++b) {
    const int a = -m - 2 - b;
    if (a < -bound || a > bound) continue;
    oracle::Fock t = oracle::alpha_mode(std::max(a, b), v, level);
    t = oracle::alpha_mode(std::min(a, b), t, level);
    for (const auto& [parts, c] : t) oracle::fock_add(out, parts, c);
  }
  return out;
}

MPoly diff_power(int k) {
  const MPoly d = MPoly::variable("x1") - MPoly::variable("x2");
  return d.pow(k);
}

Window square(Range r) { return Window(std::vector<Range>{r, r}); }

}  // namespace

TEST_CASE("identity pair certifies trivially") {
  auto [space, alpha] = build_heisenberg_fock(Scalar(1), 6);
  const QuantumField one = identity_field(space);
  const auto cert = check_compatible(one, one, MPoly(1L), square(Range{-4, 4}),
                                     {{0, "vac"}});
  CHECK(cert.pass);
  CHECK(!cert.witness.has_value());
}

TEST_CASE("free boson pair: squared difference passes, bare product fails") {
  auto [space, alpha] = build_heisenberg_fock(Scalar(1), 6);
  const std::vector<BasisRef> tvs{{0, "vac"}, {1, "1"}};
  const Window win = square(Range{-4, 4});

  const auto good = check_compatible(alpha, alpha, diff_power(2), win, tvs);
  CHECK(good.pass);

  const auto bad = check_compatible(alpha, alpha, MPoly(1L), win, tvs);
  CHECK(!bad.pass);
  REQUIRE(bad.witness.has_value());
  // The raw composition escapes along the pairing staircase e1 = -e2 - 2; the
  // deepest probed cell is (-6, 4) with value 5 * level * vac.
  CHECK(bad.witness->e1 == -6);
  CHECK(bad.witness->e2 == 4);
  CHECK(bad.witness->degree == 0);
  CHECK(bad.witness->label == "vac");
  CHECK(bad.witness->test_degree == 0);
  CHECK(bad.witness->test_label == "vac");
}

TEST_CASE("clearing search finds the squared difference, reports exhaustion") {
  auto [space, alpha] = build_heisenberg_fock(Scalar(1), 6);
  const std::vector<BasisRef> tvs{{0, "vac"}, {1, "1"}};
  const Window win = square(Range{-4, 4});

  const auto found =
      search_compat_poly(alpha, alpha, win, tvs, {Scalar(1)}, 3);
  CHECK(found.pass);
  CHECK(found.p == diff_power(2));

  const auto id_cert = search_compat_poly(identity_field(space), alpha, win,
                                          tvs, {Scalar(1)}, 2);
  CHECK(id_cert.pass);
  CHECK(id_cert.p == MPoly(1L));

  // Shifted-diagonal roots never clear the boson pairing; exhaustion is
  // reported as not-found, not as a refutation.
  const auto missed =
      search_compat_poly(alpha, alpha, win, {{0, "vac"}}, {Scalar::q(2)}, 2);
  CHECK(!missed.pass);
  CHECK(missed.p.is_zero());
  CHECK(missed.note.find("not a refutation") != std::string::npos);
}

TEST_CASE("left identity product reproduces the right factor exactly") {
  auto [space, alpha] = build_heisenberg_fock(Scalar(1), 8);
  const QuantumField one = identity_field(space);
  const std::vector<BasisRef> tvs{{0, "vac"}, {1, "1"}};
  const Range r{-3, 3};
  const auto cert = check_compatible(one, alpha, MPoly(1L), square(r), tvs);
  REQUIRE(cert.pass);
  const auto y = ye_product(one, alpha, cert, -3, 1, r, tvs);
  CHECK(y.vanish_from == 0);
  CHECK(y.covered.size() == 2);

  CHECK(fields_agree(y.modes.at(-1), alpha, tvs, r).equal);
  const QuantumField zero = zero_field(space);
  for (int n : {-3, -2, 0, 1})
    CHECK(fields_agree(y.modes.at(n), zero, tvs, r).equal);
}

TEST_CASE("right identity product gives the translation tower") {
  auto [space, alpha] = build_heisenberg_fock(Scalar(1), 8);
  const QuantumField one = identity_field(space);
  const std::vector<BasisRef> tvs{{0, "vac"}, {1, "1"}};
  const Range r{-3, 3};
  const auto cert = check_compatible(alpha, one, MPoly(1L), square(r), tvs);
  REQUIRE(cert.pass);
  const auto y = ye_product(alpha, one, cert, -2, 1, r, tvs);

  CHECK(fields_agree(y.modes.at(-1), alpha, tvs, r).equal);
  for (int n : {0, 1})
    CHECK(fields_agree(y.modes.at(n), zero_field(space), tvs, r).equal);

  // Mode -2 applied to a vector is the x-derivative of the factor's series.
  const Series<SpaceVector> d =
      field_apply(y.modes.at(-2), SpaceVector::unit(0, "vac"), "x", r);
  for (int m = r.lo; m <= r.hi; ++m) {
    oracle::Fock want;
    if (m + 1 >= 1)
      oracle::fock_add(want, {m + 2}, Scalar(m + 1));  // (m+1) alpha(m+1) vac
    require_matches(d.coeff({m}), want);
  }
}

TEST_CASE("free boson modes match the normal-ordering oracle") {
  const Scalar level(2);
  auto [space, alpha] = build_heisenberg_fock(level, 16);
  const std::vector<BasisRef> tvs{{0, "vac"}, {1, "1"}, {2, "2"}, {2, "1.1"}};
  const Range r{-2, 2};
  // The probe window must reach the fields' own floors on the deepest test
  // vector: degree 2 puts support at exponent -3.
  const auto cert =
      check_compatible(alpha, alpha, diff_power(2), square(Range{-4, 4}), tvs);
  REQUIRE(cert.pass);
  const auto y = ye_product(alpha, alpha, cert, -2, 3, r, tvs);
  CHECK(y.vanish_from == 2);
  CHECK(y.covered.size() == tvs.size());

  // Modes >= 2 vanish identically; mode 1 is level * identity; mode 0 is 0.
  const QuantumField zero = zero_field(space);
  CHECK(fields_agree(y.modes.at(2), zero, tvs, r).equal);
  CHECK(fields_agree(y.modes.at(3), zero, tvs, r).equal);
  CHECK(fields_agree(y.modes.at(0), zero, tvs, r).equal);
  CHECK(fields_agree(y.modes.at(1),
                     field_scaled(identity_field(space), level), tvs, r)
            .equal);

  // Mode -1 is the normal-ordered pair, checked against the oracle on every
  // basis vector and exponent.
  for (const auto& ref : tvs) {
    const SpaceVector w = SpaceVector::unit(ref.first, ref.second);
    const Series<SpaceVector> got = field_apply(y.modes.at(-1), w, "x", r);
    oracle::Fock wf;
    std::vector<int> parts;
    if (ref.second != "vac") {
      size_t pos = 0;
      std::string s = ref.second;
      while (pos < s.size()) {
        size_t dot = s.find('.', pos);
        if (dot == std::string::npos) dot = s.size();
        parts.push_back(std::stoi(s.substr(pos, dot - pos)));
        pos = dot + 1;
      }
    }
    wf = oracle::fock_unit(parts);
    for (int m = r.lo; m <= r.hi; ++m) {
      CAPTURE(ref.second);
      CAPTURE(m);
      require_matches(got.coeff({m}),
                      normal_pair(m, wf, level, ref.first + 8));
    }
  }

  // Mode -2 on the vacuum: frozen low-order values of the derivative-ordered
  // pair (regular at the origin, state 2.1 at order zero).
  const Series<SpaceVector> d2 =
      field_apply(y.modes.at(-2), SpaceVector::unit(0, "vac"), "x", r);
  CHECK(d2.coeff({-1}).provably_zero());
  CHECK(d2.coeff({-2}).provably_zero());
  {
    oracle::Fock want;
    oracle::fock_add(want, {2, 1}, Scalar(1));
    require_matches(d2.coeff({0}), want);
  }
  {
    oracle::Fock want;
    oracle::fock_add(want, {3, 1}, Scalar(2));
    oracle::fock_add(want, {2, 2}, Scalar(1));
    require_matches(d2.coeff({1}), want);
  }
}

TEST_CASE("products are independent of the clearing polynomial") {
  auto [space, alpha] = build_heisenberg_fock(Scalar(1), 16);
  const std::vector<BasisRef> tvs{{0, "vac"}, {1, "1"}};
  const Range r{-2, 2};

  const auto cmp = ye_p_independence(alpha, alpha, diff_power(2),
                                     diff_power(3), square(r), -2, 1, r, tvs);
  CHECK(cmp.equal);

  const auto refl = ye_p_independence(alpha, alpha, diff_power(2),
                                      diff_power(2), square(r), -1, 1, r, tvs);
  CHECK(refl.equal);

  const QuantumField one = identity_field(space);
  const auto idcmp = ye_p_independence(one, alpha, MPoly(1L), diff_power(1),
                                       square(r), -2, 0, r, tvs);
  CHECK(idcmp.equal);
}

TEST_CASE("mode tables skip basis vectors beyond the degree budget") {
  auto [space, alpha] = build_heisenberg_fock(Scalar(1), 6);
  const std::vector<BasisRef> tvs{{0, "vac"}, {3, "3"}};
  const Range r{-1, 1};
  const auto cert =
      check_compatible(alpha, alpha, diff_power(2), square(Range{-4, 4}), tvs);
  REQUIRE(cert.pass);
  const auto y = ye_product(alpha, alpha, cert, -1, -1, r, tvs);
  REQUIRE(y.covered.size() == 1);
  CHECK(y.covered[0] == BasisRef{0, "vac"});
  REQUIRE(y.skipped.size() == 1);
  CHECK(y.skipped[0].first == BasisRef{3, "3"});
  CHECK(y.skipped[0].second.find("budget") != std::string::npos);

  // The produced field refuses the uncovered vector instead of guessing.
  CHECK_THROWS_AS(
      field_apply(y.modes.at(-1), SpaceVector::unit(3, "3"), "x", r),
      InputError);

  // With no coverable vector at all, the product itself refuses.
  CHECK_THROWS_AS(ye_product(alpha, alpha, cert, -1, -1, r, {{3, "3"}}),
                  BudgetError);
}

TEST_CASE("closure generation is budgeted, deduplicating, honest about gaps") {
  auto [space, alpha] = build_heisenberg_fock(Scalar(1), 16);
  const std::vector<BasisRef> tvs{{0, "vac"}};
  const Range r{-2, 2};
  const auto tbl = closure_generate(space, {alpha}, 2, -2, 1, r, tvs,
                                    {Scalar(1)}, 2);

  REQUIRE(tbl.find("1") != nullptr);
  REQUIRE(tbl.find(alpha.name) != nullptr);
  const std::string an = alpha.name;
  const TableEntry* nn = tbl.find("(" + an + ")_{-1}(" + an + ")");
  REQUIRE(nn != nullptr);
  CHECK(nn->depth == 1);

  // At level one the first positive mode equals the vacuum entry, so it
  // deduplicates away instead of reappearing under its own name.
  CHECK(tbl.find("(" + an + ")_{1}(" + an + ")") == nullptr);

  // The normal-ordered entry matches the oracle at order zero.
  const Series<SpaceVector> s =
      field_apply(nn->field, SpaceVector::unit(0, "vac"), "x", r);
  require_matches(s.coeff({0}), normal_pair(0, oracle::fock_unit({}), Scalar(1), 8));

  // Every entry satisfies the vacuum regularity axiom on the window: no
  // negative exponent acts on the vacuum.
  for (const auto& e : tbl.entries) {
    CAPTURE(e.name);
    CHECK(e.depth <= 2);
    const Series<SpaceVector> av =
        field_apply(e.field, SpaceVector::unit(0, "vac"), "x", r);
    for (int m = r.lo; m <= -1; ++m) CHECK(av.coeff({m}).provably_zero());
  }

  // Budget refusals are reported, not silently dropped: the deeper pairs need
  // clearing degrees past the search bound.
  bool refused = false;
  for (const auto& note : tbl.notes)
    if (note.find("no clearing polynomial") != std::string::npos ||
        note.find("not a refutation") != std::string::npos)
      refused = true;
  CHECK(refused);
}

TEST_CASE("translation operator: values and the derivation property") {
  auto [space, alpha] = build_heisenberg_fock(Scalar(1), 24);
  const std::vector<BasisRef> deep = labels_up_to(12);
  const Range r{-2, 2};

  // D(1) = 0.
  const QuantumField done = d_operator(identity_field(space), r, {{0, "vac"}});
  CHECK(fields_agree(done, zero_field(space), {{0, "vac"}}, r).equal);

  // D of a polynomial multiple of the identity differentiates the polynomial.
  const Series<Scalar> t2 = Series<Scalar>::monomial({"t"}, {2}, Scalar(1));
  const QuantumField x2one = ct_action(t2, identity_field(space));
  const QuantumField dx2 = d_operator(x2one, r, {{0, "vac"}});
  const Series<SpaceVector> sd =
      field_apply(dx2, SpaceVector::unit(0, "vac"), "x", r);
  for (int m = r.lo; m <= r.hi; ++m) {
    oracle::Fock want;
    if (m == 1) oracle::fock_add(want, {}, Scalar(2));
    require_matches(sd.coeff({m}), want);
  }

  // D is a derivation across the product: D(a_n b) = (Da)_n b + a_n (Db).
  const QuantumField da = d_operator(alpha, Range{-8, 8}, deep);
  const auto cert_aa =
      check_compatible(alpha, alpha, diff_power(2), square(Range{-4, 4}),
                       {{0, "vac"}});
  REQUIRE(cert_aa.pass);
  const QuantumField nn =
      ye_product(alpha, alpha, cert_aa, -1, -1, Range{-4, 4}, {{0, "vac"}})
          .modes.at(-1);
  const QuantumField dnn = d_operator(nn, r, {{0, "vac"}});

  const auto cert_da =
      search_compat_poly(da, alpha, square(r), {{0, "vac"}}, {Scalar(1)}, 3);
  REQUIRE(cert_da.pass);
  const QuantumField lhs1 =
      ye_product(da, alpha, cert_da, -1, -1, r, {{0, "vac"}}).modes.at(-1);
  const auto cert_ad =
      search_compat_poly(alpha, da, square(r), {{0, "vac"}}, {Scalar(1)}, 3);
  REQUIRE(cert_ad.pass);
  const QuantumField lhs2 =
      ye_product(alpha, da, cert_ad, -1, -1, r, {{0, "vac"}}).modes.at(-1);

  const QuantumField sum = field_sum(lhs1, lhs2);
  CHECK(fields_agree(dnn, sum, {{0, "vac"}}, r).equal);

  // Anchor both sides against the hand value at order zero: twice the state
  // with parts 2.1.
  const SpaceVector at0 =
      field_apply(sum, SpaceVector::unit(0, "vac"), "x", r).coeff({0});
  CHECK(at0.component(3, "2.1") == Scalar(2));
}

TEST_CASE("multi-point evaluation and the vector-function exchange") {
  auto [space, alpha] = build_heisenberg_fock(Scalar(1), 12);
  const std::vector<BasisRef> tvs{{0, "vac"}};
  const Range r{-3, 3};

  // Constant case: the identity factor with f = 1 is the constant vacuum.
  const Series<SpaceVector> z1 =
      zn_evaluate({identity_field(space)}, RationalFunction(MPoly(1L)), {"x1"},
                  {0, "vac"}, r, tvs);
  for (int ex = r.lo; ex <= r.hi; ++ex)
    for (int e1 = r.lo; e1 <= r.hi; ++e1) {
      oracle::Fock want;
      if (ex == 0 && e1 == 0) oracle::fock_add(want, {}, Scalar(1));
      require_matches(z1.coeff({ex, e1}), want);
    }

  // Creation case: coefficient of x^m x1^k is binom(m+k, k) alpha(m+k) vac.
  const Series<SpaceVector> za =
      zn_evaluate({alpha}, RationalFunction(MPoly(1L)), {"x1"}, {0, "vac"}, r,
                  tvs);
  {
    oracle::Fock want;
    oracle::fock_add(want, {1}, Scalar(1));
    require_matches(za.coeff({0, 0}), want);
  }
  {
    oracle::Fock want;
    oracle::fock_add(want, {3}, Scalar(2));
    require_matches(za.coeff({1, 1}), want);
  }
  {
    oracle::Fock want;
    oracle::fock_add(want, {3}, Scalar(1));
    require_matches(za.coeff({2, 0}), want);
  }
  require_matches(za.coeff({-1, 2}), {});

  // Exchange: the scalar action on the vector slot equals the polynomial in
  // the function slot.
  const Series<Scalar> t1 = Series<Scalar>::monomial({"t"}, {1}, Scalar(1));
  const QuantumField talpha = ct_action(t1, alpha);
  const Series<SpaceVector> lhs = zn_evaluate(
      {talpha}, RationalFunction(MPoly(1L)), {"x1"}, {0, "vac"}, r, tvs);
  const Series<SpaceVector> rhs =
      zn_evaluate({alpha}, RationalFunction(MPoly::variable("x1")), {"x1"},
                  {0, "vac"}, r, tvs);
  for (int ex = r.lo; ex <= r.hi; ++ex)
    for (int e1 = r.lo; e1 <= r.hi; ++e1) {
      if (!lhs.window.contains({ex, e1}) || !rhs.window.contains({ex, e1}))
        continue;
      const SpaceVector d = lhs.coeff({ex, e1}) - rhs.coeff({ex, e1});
      CAPTURE(ex);
      CAPTURE(e1);
      CHECK(d.comps.empty());
    }
}

TEST_CASE("kernel probe: evidence, refutation, and span independence") {
  auto [space, alpha] = build_heisenberg_fock(Scalar(1), 12);
  const std::vector<BasisRef> tvs{{0, "vac"}};
  const Range r{-3, 3};

  const ZnRow row_one{{identity_field(space)}, RationalFunction(MPoly(1L))};
  const ZnRow row_a{{alpha}, RationalFunction(MPoly(1L))};
  const ZnRow row_ax{{alpha}, RationalFunction(MPoly::variable("x1"))};

  const auto single = zn_kernel_probe({row_one}, {"x1"}, tvs, r, tvs);
  CHECK(!single.kernel_found);
  CHECK(single.rank == 1);

  const auto dup = zn_kernel_probe({row_one, row_one}, {"x1"}, tvs, r, tvs);
  REQUIRE(dup.kernel_found);
  CHECK(dup.rank == 1);
  REQUIRE(dup.combo.has_value());
  CHECK(!((*dup.combo)[0].is_zero() && (*dup.combo)[1].is_zero()));
  CHECK(((*dup.combo)[0] + (*dup.combo)[1]).is_zero());

  const auto span =
      zn_kernel_probe({row_one, row_a, row_ax}, {"x1"}, tvs, r, tvs);
  CHECK(!span.kernel_found);
  CHECK(span.rank == 3);
}

TEST_CASE("window enlargement refines, never contradicts") {
  auto [space, alpha] = build_heisenberg_fock(Scalar(1), 16);
  const std::vector<BasisRef> tvs{{0, "vac"}};
  const Range small{-1, 1};
  const Range big{-2, 2};

  const auto cs = check_compatible(alpha, alpha, diff_power(2), square(small), tvs);
  const auto cb = check_compatible(alpha, alpha, diff_power(2), square(big), tvs);
  CHECK(cs.pass);
  CHECK(cb.pass);

  const auto ys = ye_product(alpha, alpha, cs, -1, -1, small, tvs);
  const auto yb = ye_product(alpha, alpha, cb, -1, -1, big, tvs);
  CHECK(fields_agree(ys.modes.at(-1), yb.modes.at(-1), tvs, small).equal);
}

TEST_CASE("randomized clearing-polynomial independence") {
  auto [space, alpha] = build_heisenberg_fock(Scalar(1), 16);
  const std::vector<BasisRef> tvs{{0, "vac"}, {1, "1"}};
  const Range r{-2, 2};
  std::mt19937 rng(20260817u);
  for (int round = 0; round < 5; ++round) {
    const int k1 = 2 + static_cast<int>(rng() % 2);
    const int k2 = k1 + static_cast<int>(rng() % 2);
    CAPTURE(round);
    CAPTURE(k1);
    CAPTURE(k2);
    const auto cmp = ye_p_independence(alpha, alpha, diff_power(k1),
                                       diff_power(k2), square(r), -1, k1, r,
                                       tvs);
    CHECK(cmp.equal);
  }
}
