#pragma once

#include <string>
#include <vector>

#include "qvc/errors.hpp"

namespace qvc {

// Inclusive exponent range for one variable.
struct Range {
  int lo = 0;
  int hi = 0;
  bool contains(int e) const { return lo <= e && e <= hi; }
  int span() const { return hi - lo; }
  friend bool operator==(const Range& a, const Range& b) {
    return a.lo == b.lo && a.hi == b.hi;
  }
};

// Per-variable validity box for a windowed series, aligned positionally with
// the owning series' variable list.
class Window {
 public:
  Window() = default;
  explicit Window(std::vector<Range> r) : r_(std::move(r)) { validate(); }
  static Window uniform(int nvars, int lo, int hi) {
    return Window(std::vector<Range>(nvars, Range{lo, hi}));
  }

  int size() const { return static_cast<int>(r_.size()); }
  const Range& operator[](int i) const { return r_[i]; }
  Range& operator[](int i) { return r_[i]; }

  bool contains(const std::vector<int>& e) const {
    for (size_t i = 0; i < r_.size(); ++i)
      if (!r_[i].contains(e[i])) return false;
    return true;
  }

  std::string str() const;

 private:
  std::vector<Range> r_;
  void validate() const {
    for (const Range& x : r_)
      if (x.lo > x.hi) throw InputError("Window: empty range " + std::to_string(x.lo) + ".." + std::to_string(x.hi));
  }
};

}  // namespace qvc
