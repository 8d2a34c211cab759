#pragma once

namespace skplane::dist {

/// Regularized lower incomplete gamma P(a, x). Power series below x = a + 1,
/// modified-Lentz continued fraction for Q above it.
[[nodiscard]] double gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), computed
/// directly in the tail so small probabilities keep full relative accuracy.
[[nodiscard]] double gamma_q(double a, double x);

/// Regularized incomplete beta I_x(a, b) via its continued fraction, using
/// the symmetry I_x(a, b) = 1 - I_{1-x}(b, a) where the fraction converges
/// slowly.
[[nodiscard]] double beta_inc(double a, double b, double x);

/// Upper tail of chi-square with `df` degrees of freedom.
[[nodiscard]] double chi2_sf(double x, double df);

/// Upper tail of F(d1, d2).
[[nodiscard]] double f_sf(double f, double d1, double d2);

/// P(|T| > |t|) for Student t with `df` degrees of freedom.
[[nodiscard]] double t_two_sided(double t, double df);

/// P(|Z| > |z|) for the standard normal.
[[nodiscard]] double normal_two_sided(double z);

}  // namespace skplane::dist
