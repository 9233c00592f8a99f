#pragma once

namespace wrlda {

/// Digamma function, the derivative of log Gamma.
///
/// Uses the recurrence psi(x) = psi(x + 1) - 1/x to shift the argument to
/// x >= 10 and the Bernoulli asymptotic series above that. The 1/x term for
/// x < 1 is carried with a correction so the result is correctly rounded to
/// within about half an ulp even for tiny arguments. Throws std::domain_error
/// for x <= 0 or NaN.
double digamma(double x);

/// Trigamma function psi'(x); same argument reduction as digamma.
double trigamma(double x);

/// log Gamma(x) for x > 0. Reentrant, unlike std::lgamma on glibc.
double log_gamma(double x);

}  // namespace wrlda
