#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ltlab {

using Complex = std::complex<double>;

/// Bad user input: malformed config, out-of-range parameter, unknown name.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine could not deliver its contract (non-convergence,
/// contour too close to a zero, all sweep points failed, ...).
class ComputationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      correction_ += (sum_ - t) + x;
    } else {
      correction_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + correction_; }

 private:
  double sum_ = 0.0;
  double correction_ = 0.0;
};

/// Parses command-line complex tokens: "0+1i", "-2", "1.5-0.25i", "3i", "-i".
Complex parse_complex_token(std::string_view token);

/// Shortest round-trippable formatting at 17 significant digits.
std::string format_double(double x);

/// "re+imi" form accepted by parse_complex_token.
std::string format_complex_token(Complex z);

}  // namespace ltlab
