#include "veinforge/detmath.hpp"

namespace vf {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kHalfPi = 0.5 * kPi;

}  // namespace

// Taylor series to x^15 on [-pi/2, pi/2] (error < 1e-15 there), reached by
// range reduction. Angles in this codebase stay small (|x| < ~30), so the
// naive reduction loses no precision that matters.
double det_sin(double x) {
  // reduce to [-pi, pi]
  double k = std::floor((x + kPi) / kTwoPi);
  double r = x - k * kTwoPi;
  if (r > kPi) r -= kTwoPi;
  if (r < -kPi) r += kTwoPi;
  // fold into [-pi/2, pi/2]
  if (r > kHalfPi) r = kPi - r;
  else if (r < -kHalfPi) r = -kPi - r;
  double x2 = r * r;
  double p = -1.0 / 1307674368000.0;             // -1/15!
  p = p * x2 + 1.0 / 6227020800.0;               // +1/13!
  p = p * x2 - 1.0 / 39916800.0;                 // -1/11!
  p = p * x2 + 1.0 / 362880.0;                   // +1/9!
  p = p * x2 - 1.0 / 5040.0;                     // -1/7!
  p = p * x2 + 1.0 / 120.0;                      // +1/5!
  p = p * x2 - 1.0 / 6.0;                        // -1/3!
  return r + r * x2 * p;
}

double det_cos(double x) { return det_sin(x + kHalfPi); }

// exp(-x) = 2^(-x/ln2); split into integer and fractional parts, evaluate
// 2^-f on [0,1) by a degree-10 Taylor of exp(-f*ln2), scale by ldexp (exact).
double det_exp_neg(double x) {
  if (x <= 0.0) return 1.0;
  if (x > 745.0) return 0.0;
  constexpr double kLn2 = 0.6931471805599453094172321214581766;
  double t = x / kLn2;
  double n = std::floor(t);
  double f = (t - n) * kLn2;  // in [0, ln2)
  // exp(-f), f in [0, 0.694): Taylor to f^12, error < 1e-17
  double p = 1.0 / 479001600.0;                  // 1/12!
  p = p * -f + 1.0 / 39916800.0;
  p = p * -f + 1.0 / 3628800.0;
  p = p * -f + 1.0 / 362880.0;
  p = p * -f + 1.0 / 40320.0;
  p = p * -f + 1.0 / 5040.0;
  p = p * -f + 1.0 / 720.0;
  p = p * -f + 1.0 / 120.0;
  p = p * -f + 1.0 / 24.0;
  p = p * -f + 1.0 / 6.0;
  p = p * -f + 0.5;
  p = p * -f + 1.0;
  p = p * -f + 1.0;
  return std::ldexp(p, -static_cast<int>(n));
}

}  // namespace vf
