#include "qvc/delta.hpp"

namespace qvc {

mpq_class generalized_binom(int n, int k) {
  if (k < 0) return 0;
  mpq_class r = 1;
  for (int i = 1; i <= k; ++i) {
    r *= n - i + 1;
    r /= i;
  }
  return r;
}

int delta_pinned_var(DeltaKind kind) {
  switch (kind) {
    case DeltaKind::JacobiPlus: return 2;
    case DeltaKind::JacobiMinus: return 1;
    case DeltaKind::Iterate: return 0;
  }
  throw InputError("delta_pinned_var: bad kind");
}

Scalar delta_coeff(DeltaKind kind, int e0, int e1, int e2) {
  if (e0 + e1 + e2 != -1) return Scalar(0);
  switch (kind) {
    case DeltaKind::JacobiPlus: {
      // sum_n (u1-u2)^n u0^{-n-1}, (u1-u2)^n through nonnegative powers of u2.
      if (e2 < 0) return Scalar(0);
      const int n = -e0 - 1;
      mpq_class v = generalized_binom(n, e2);
      if (e2 % 2) v = -v;
      return Scalar(v);
    }
    case DeltaKind::JacobiMinus: {
      // sum_n (-1)^n (u2-u1)^n u0^{-n-1}, (u2-u1)^n through nonnegative
      // powers of u1.
      if (e1 < 0) return Scalar(0);
      const int n = -e0 - 1;
      mpq_class v = generalized_binom(n, e1);
      if ((n + e1) % 2) v = -v;
      return Scalar(v);
    }
    case DeltaKind::Iterate: {
      // sum_n (u1-u0)^n u2^{-n-1}, (u1-u0)^n through nonnegative powers of u0.
      if (e0 < 0) return Scalar(0);
      const int n = -e2 - 1;
      mpq_class v = generalized_binom(n, e0);
      if (e0 % 2) v = -v;
      return Scalar(v);
    }
  }
  throw InputError("delta_coeff: bad kind");
}

Series<Scalar> delta_kernel(DeltaKind kind, const std::array<std::string, 3>& vars,
                            const Window& w) {
  if (w.size() != 3) throw InputError("delta_kernel: window arity mismatch");
  const int pin = delta_pinned_var(kind);
  std::vector<Range> r{w[0], w[1], w[2]};
  bool pin_floored = false;
  if (r[pin].hi < 0) {
    // The pinned variable's support starts at 0: such a box holds only zeros.
    Series<Scalar> out({vars[0], vars[1], vars[2]}, Window(std::move(r)));
    out.floored[pin] = 1;
    return out;
  }
  if (r[pin].lo <= 0) {
    r[pin].lo = 0;
    pin_floored = true;
  }
  Series<Scalar> out({vars[0], vars[1], vars[2]}, Window(std::move(r)));
  out.floored[pin] = pin_floored ? 1 : 0;
  for (int e0 = out.window[0].lo; e0 <= out.window[0].hi; ++e0) {
    for (int e1 = out.window[1].lo; e1 <= out.window[1].hi; ++e1) {
      const int e2 = -1 - e0 - e1;
      if (e2 < out.window[2].lo || e2 > out.window[2].hi) continue;
      Scalar c = delta_coeff(kind, e0, e1, e2);
      if (!c.is_zero()) out.coeffs.emplace(std::vector<int>{e0, e1, e2}, std::move(c));
    }
  }
  return out;
}

}  // namespace qvc
