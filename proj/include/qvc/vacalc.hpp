#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qvc/iota.hpp"
#include "qvc/mpoly.hpp"
#include "qvc/ratfun.hpp"
#include "qvc/space.hpp"

namespace qvc {

// A basis vector reference: (degree, label).
using BasisRef = std::pair<int, std::string>;

// ---------------------------------------------------------------------------
// Compatibility detection
// ---------------------------------------------------------------------------

// A concrete nonzero coefficient of p(x1,x2) * a(x1)(b(x2)w) found below the
// window corner in at least one coordinate.
struct CompatibilityWitness {
  int e1 = 0, e2 = 0;      // offending (x1, x2) exponent pair
  int degree = 0;          // output component where the value is nonzero
  std::string label;
  int test_degree = 0;     // the test vector w
  std::string test_label;
};

// Verdict for an ordered field pair (a, b) against a clearing polynomial p:
// on pass, every coefficient of p(x1,x2)*a(x1)(b(x2)w) that was computable at
// the budget lies in [lo1,oo) x [lo2,oo), i.e. in the window corner's
// translate of N^2 -- the probe extends below the window floor as far as the
// fields' certified support bounds reach, so escaping support inside that
// region cannot hide.  The verdict is window-relative: coefficients beyond
// the budget are skipped (and noted), never assumed zero.  On fail, a witness
// is recorded.
struct CompatibilityCertificate {
  std::string a_name, b_name;
  MPoly p;                 // clearing polynomial in the pair variables x1, x2
  Window window;           // the checked (x1, x2) box
  bool pass = false;
  std::optional<CompatibilityWitness> witness;
  std::string note;        // skipped-cell reports, search summaries
};

CompatibilityCertificate check_compatible(const QuantumField& a, const QuantumField& b,
                                          const MPoly& p, const Window& window,
                                          const std::vector<BasisRef>& test_vectors);

// Candidate roots c for clearing factors (x1 - c*x2); covers the diagonal and
// the q-shifted diagonals that arise in the intended applications.
std::vector<Scalar> default_root_candidates();

// Try p = prod_i (x1 - c_i x2) over multisets of root candidates in order of
// increasing total degree (degree 0 gives p = 1).  Returns the first passing
// certificate; on exhaustion, a non-pass certificate whose p is zero and
// whose note records that exhaustion is not a refutation.
CompatibilityCertificate search_compat_poly(const QuantumField& a, const QuantumField& b,
                                            const Window& window,
                                            const std::vector<BasisRef>& test_vectors,
                                            const std::vector<Scalar>& root_candidates,
                                            int max_total_degree);

// ---------------------------------------------------------------------------
// The operator product on E(W)
// ---------------------------------------------------------------------------

// Modes a(x)_n b(x) for n in [n_lo, n_hi], computed per basis vector by
// clearing with p, substituting x1 = x + x0, and multiplying by the
// re-expansion of 1/p(x+x0,x) with x outermost; the mode n field is the
// coefficient of x0^{-n-1}.  Each mode is materialized down to its certified
// support floor (which may lie below the requested range) and up to
// x_range.hi.  Basis vectors whose pipeline exceeds the degree budget are
// skipped with a reason; the resulting table fields refuse them at read time.
struct YeProduct {
  std::map<int, QuantumField> modes;
  int vanish_from = 0;     // every mode n >= vanish_from is identically zero
  std::vector<BasisRef> covered;
  std::vector<std::pair<BasisRef, std::string>> skipped;
};

YeProduct ye_product(const QuantumField& a, const QuantumField& b,
                     const CompatibilityCertificate& cert, int n_lo, int n_hi,
                     Range x_range, const std::vector<BasisRef>& labels);

// ---------------------------------------------------------------------------
// Comparisons
// ---------------------------------------------------------------------------

// First provable disagreement between two fields on the given test vectors
// over an exponent range; cells that are out of budget on either side are
// skipped and noted (the comparison, like every verdict here, is
// window-relative).
struct FieldDiff {
  BasisRef w;              // test vector
  int x_exp = 0;
  int degree = 0;          // disagreeing component
  std::string label;
  Scalar lhs, rhs;
  std::string context;     // e.g. which mode, for aggregate comparisons
};

struct FieldComparison {
  bool equal = true;
  std::optional<FieldDiff> diff;
  std::string note;
};

FieldComparison fields_agree(const QuantumField& f, const QuantumField& g,
                             const std::vector<BasisRef>& test_vectors, Range r);

// Both polynomials must certify (a, b); the two mode families are then
// compared mode by mode on the labels both products cover.
FieldComparison ye_p_independence(const QuantumField& a, const QuantumField& b,
                                  const MPoly& p1, const MPoly& p2, const Window& window,
                                  int n_lo, int n_hi, Range x_range,
                                  const std::vector<BasisRef>& labels);

// ---------------------------------------------------------------------------
// Partial closure generation
// ---------------------------------------------------------------------------

struct TableEntry {
  std::string name;
  QuantumField field;
  std::string history;     // "vacuum", "generator", or the producing mode
  int depth = 0;
};

// Breadth-first closure approximation: every entry is the vacuum 1_W, a
// generator, or a mode of two earlier entries.  The true generated closure is
// infinite; this table is an explicitly partial cut at the stated budget, and
// notes record every pair or entry the budget refused.
struct ProductTable {
  std::vector<TableEntry> entries;
  int depth_budget = 0;
  int n_lo = 0, n_hi = 0;
  Range x_range{0, 0};
  std::vector<std::string> notes;

  const TableEntry* find(const std::string& name) const;
};

ProductTable closure_generate(std::shared_ptr<const GradedSpace> space,
                              const std::vector<QuantumField>& generators, int depth,
                              int n_lo, int n_hi, Range x_range,
                              const std::vector<BasisRef>& labels,
                              const std::vector<Scalar>& root_candidates,
                              int max_total_degree);

// ---------------------------------------------------------------------------
// The translation operator and multi-point evaluation
// ---------------------------------------------------------------------------

// D(a) = a_{-2}1_W, computed through the (a, 1_W) product with p = 1.
QuantumField d_operator(const QuantumField& a, Range x_range,
                        const std::vector<BasisRef>& labels);

// The evaluation series
//     iota_{x,x1,...,xn} f(x+x1,...,x+xn) Y(v1,x1)...Y(vn,xn)1_W
// applied to the test vector w, as a series in (x, x1, ..., xn) where x is
// the E(W) variable (the scalar action of t).  Every variable is materialized
// on x_range.  Denominators are supported for n = 1 (two-variable expansion);
// for n >= 2, f must be polynomial up to a constant denominator.
Series<SpaceVector> zn_evaluate(const std::vector<QuantumField>& factors,
                                const RationalFunction& f,
                                const std::vector<std::string>& xvars, BasisRef w,
                                Range x_range, const std::vector<BasisRef>& labels);

// Finite-span kernel probe for the evaluation maps: evaluates each row on the
// test vectors and row-reduces the extracted coefficients over the scalar
// field.  No kernel is evidence (never a certificate) of injectivity on the
// span; a kernel element is a refutation candidate to retry at a larger
// window.  Cells that are out of budget in any row are excluded from the
// comparison.
struct ZnRow {
  std::vector<QuantumField> factors;
  RationalFunction f;
};

struct ZnProbeReport {
  bool kernel_found = false;
  int rank = 0;
  std::optional<std::vector<Scalar>> combo;  // coefficients of a vanishing combination
  std::string note;
};

ZnProbeReport zn_kernel_probe(const std::vector<ZnRow>& span,
                              const std::vector<std::string>& xvars,
                              const std::vector<BasisRef>& test_vectors, Range x_range,
                              const std::vector<BasisRef>& labels);

}  // namespace qvc
