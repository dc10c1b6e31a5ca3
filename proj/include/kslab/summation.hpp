#pragma once

#include <cmath>

namespace kslab {

// Neumaier-compensated running sum. Mass totals over 10^5 cells stay within
// a few ulps, which the 1e-12 mass-conservation checks rely on.
class CompensatedSum {
 public:
  CompensatedSum& operator+=(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace kslab
