#ifndef ROBORD_NUMERIC_HPP
#define ROBORD_NUMERIC_HPP

#include <cmath>

namespace robord {

/// Neumaier-compensated accumulator. Row sums across a dataset come out
/// correctly rounded for the magnitudes seen here, which makes symmetric
/// reductions independent of row order.
class NeumaierSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// p^a with the convention 0^a = 0 for a > 0 (exact tails, no floor).
inline double pow_or_zero(double p, double a) {
  return p > 0.0 ? std::pow(p, a) : 0.0;
}

}  // namespace robord

#endif  // ROBORD_NUMERIC_HPP
