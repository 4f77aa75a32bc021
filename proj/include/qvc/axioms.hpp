#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qvc/mpoly.hpp"
#include "qvc/series.hpp"
#include "qvc/space.hpp"
#include "qvc/vacalc.hpp"

namespace qvc {

struct SMapData;

// Outcome of an axiom check.  Pass and Fail are decided on every requested
// coefficient cell; Inconclusive means the verification could not be carried
// out inside the stated budgets (no certificate found, a window could not be
// covered, ...) and says nothing about the law itself.
enum class Verdict { Pass, Fail, Inconclusive };

std::string verdict_name(Verdict v);

// First concrete disagreement found by a failing check: the exponent cell,
// the test vector, and the basis component where the two sides differ.
struct AxiomWitness {
  std::vector<std::string> vars;
  std::vector<int> exponent;
  BasisRef test_vector;
  int degree = 0;
  std::string label;
  Scalar lhs, rhs;
};

struct AxiomReport {
  std::string axiom;     // which law was checked
  std::string subjects;  // the fields / vectors involved
  std::string params;    // multipliers, clearing exponents, ...
  Window window;         // requested comparison region
  Verdict verdict = Verdict::Inconclusive;
  std::optional<AxiomWitness> witness;  // set exactly when verdict == Fail
  int skipped_cells = 0;  // cells left undecided inside the region
  std::string note;

  bool pass() const { return verdict == Verdict::Pass; }
};

// Weak associativity: for a large enough clearing exponent l,
//   (x0 + x2)^l a(x0 + x2) b(x2) w  ==  (x0 + x2)^l (ab)(x0, x2) w
// where (ab) is the operator product and the binomials expand in nonnegative
// powers of the second variable.  If l is not supplied, exponents 0..6 are
// tried and exhaustion yields Inconclusive.  A prebuilt operator-product
// table may be supplied (e.g. to check a deliberately corrupted one);
// otherwise the product is derived from a compatibility certificate.
AxiomReport weak_assoc_check(const QuantumField& a, const QuantumField& b,
                             const BasisRef& w, std::optional<int> l,
                             const Window& window /* (x0, x2) */,
                             const YeProduct* product = nullptr);

// Quasi variant: the clearing multiplier is an arbitrary nonzero polynomial
// p(x1, x2), applied as p(x0 + x2, x2) on both sides.
AxiomReport quasi_module_check(const QuantumField& a, const QuantumField& b,
                               const BasisRef& w, const MPoly& p /* (x1, x2) */,
                               const Window& window /* (x0, x2) */,
                               const YeProduct* product = nullptr);

// Multiplier compatibility of the operator product:
//   (f a)(x) applied to (g v-side)  ==  f(t + x) g(t) (a b)(x) ...
// concretely, with fields a, b over a plain graded space and Laurent
// polynomials f, g in t:
//   Y(f u, x0)(g-scaled b-side) agrees with f(t+x) g(t) Y(u, x0) after the
//   t-action is realised through the field variable.  Both operator products
//   are derived from certificates; the comparison runs over (x, x0).
AxiomReport ct_linearity_check(const QuantumField& a, const QuantumField& b,
                               const Series<Scalar>& f, const Series<Scalar>& g,
                               const Window& window /* (x, x0) */,
                               const std::vector<BasisRef>& test_vectors);

// Scalar-series module law on a plain space:  (f v)(x0) w == f(x0) v(x0) w.
AxiomReport vecC_module_check(const QuantumField& v, const Series<Scalar>& f,
                              const BasisRef& w, const Range& r /* x0 */);

// Module law over windowed scalar series on a t-module space:
//   (f v)(x0) (g w)  ==  f(t + x0) g(t) v(x0) w,
// with f, g Laurent polynomials in t and w a vector of the t-module.
AxiomReport vecCt_module_check(const QuantumField& v, const Series<Scalar>& f,
                               const Series<Scalar>& g, const SpaceVector& w,
                               const Range& r /* x0 */);

// Weak braided three-term kernel identity.  With S the braiding datum for
// the ordered pair (a, b) and the algebra variable identified with the
// extra output variable x, the check compares
//   x0^{-1} d((x1-x2)/x0) a(x1) b(x2) w
//     - x0^{-1} d((x2-x1)/-x0) sum_i f_i(x + x1, x + x2) b_i(x2) a_i(x1) w
// against
//   x2^{-1} d((x1-x0)/x2) (a b)(x0, x2) w
// on the requested (x0, x1, x2) box, for every test vector.  Coefficients
// f_i must expand to polynomials up to a constant denominator; otherwise the
// check is Inconclusive.  Constant braiding data never references x and the
// x-window degenerates to the single exponent 0.
AxiomReport jacobi_check(const QuantumField& a, const QuantumField& b,
                         const SMapData& sdata,
                         const Window& window /* (x0, x1, x2) */,
                         const std::vector<BasisRef>& test_vectors);

}  // namespace qvc
