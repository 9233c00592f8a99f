#include "wrlda/special.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace wrlda {

namespace {

constexpr double kAsymptoticThreshold = 10.0;

// B_{2k} for k = 1..7.
constexpr double kBernoulli[] = {1.0 / 6.0,  -1.0 / 30.0,     1.0 / 42.0, -1.0 / 30.0,
                                 5.0 / 66.0, -691.0 / 2730.0, 7.0 / 6.0};

void check_domain(double x, const char* name) {
  if (!(x > 0.0)) {
    throw std::domain_error(std::string(name) + ": argument must be positive, got " +
                            std::to_string(x));
  }
}

double digamma_asymptotic(double x) {
  const double inv2 = 1.0 / (x * x);
  double series = 0.0;
  double power = inv2;
  for (int k = 1; k <= 7; ++k) {
    series += kBernoulli[k - 1] / (2.0 * k) * power;
    power *= inv2;
  }
  return std::log(x) - 0.5 / x - series;
}

double trigamma_asymptotic(double x) {
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double series = 0.0;
  double power = inv2 * inv;
  for (double b : kBernoulli) {
    series += b * power;
    power *= inv2;
  }
  return inv + 0.5 * inv2 + series;
}

}  // namespace

double digamma(double x) {
  check_domain(x, "digamma");
  if (std::isinf(x)) return x;

  // For x < 1 the 1/x term dominates; split it into a rounded head and an
  // exact-ish tail so that only the final subtraction rounds.
  double head = 0.0;
  double tail = 0.0;
  if (x < 1.0) {
    head = 1.0 / x;
    tail = std::fma(-head, x, 1.0) / x;
    x += 1.0;
  }
  double shift = 0.0;
  while (x < kAsymptoticThreshold) {
    shift += 1.0 / x;
    x += 1.0;
  }
  return ((digamma_asymptotic(x) - shift) - tail) - head;
}

double trigamma(double x) {
  check_domain(x, "trigamma");
  if (std::isinf(x)) return 0.0;

  double shift = 0.0;
  double small = 0.0;
  if (x < 1.0) {
    small = 1.0 / (x * x);
    x += 1.0;
  }
  while (x < kAsymptoticThreshold) {
    shift += 1.0 / (x * x);
    x += 1.0;
  }
  return (trigamma_asymptotic(x) + shift) + small;
}

double log_gamma(double x) {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

}  // namespace wrlda
