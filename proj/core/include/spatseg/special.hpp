#pragma once

namespace spatseg {

// Modified Bessel function of the second kind K_nu(x) for real order.
// Temme's series for x < 2 and a Thompson-Barnett continued fraction for
// x >= 2, followed by stable upward recurrence in the order. Relative
// accuracy is ~1e-13 over nu in [0, 10], x in [1e-6, 50].
// Throws std::domain_error for x <= 0 or non-finite input.
double bessel_k(double nu, double x);

double norm_pdf(double x);
double norm_cdf(double x);

} // namespace spatseg
