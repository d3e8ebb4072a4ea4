#ifndef TESTROLL_SRC_SUMMATION_HPP
#define TESTROLL_SRC_SUMMATION_HPP

#include <cmath>

namespace testroll::detail {

// Neumaier's compensated accumulator: like Kahan summation but also
// correct when a new term exceeds the running sum in magnitude.
class CompensatedSum {
   public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

   private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace testroll::detail

#endif  // TESTROLL_SRC_SUMMATION_HPP
