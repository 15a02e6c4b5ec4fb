#pragma once

namespace coimpact {

/// Gamma function for x > 0 (Lanczos approximation, g = 7, 9 terms).
/// Throws DomainError for x <= 0.
double gamma_fn(double x);

/// log Gamma(x) for x > 0.
double log_gamma_fn(double x);

/// Kummer's confluent hypergeometric function 1F1(a; b; z) for z >= 0.
/// Throws NumericalError if the result overflows a double; use the scaled
/// form for large z.
double kummer_1f1(double a, double b, double z);

/// exp(-z) * 1F1(a; b; z), finite for all z >= 0.
///
/// Ascending series with term-ratio stopping for z <= 30, the large-z
/// asymptotic expansion above. Throws DomainError when b is a non-positive
/// integer or z < 0, NumericalError when neither expansion converges.
double kummer_1f1_scaled(double a, double b, double z);

}  // namespace coimpact
