#pragma once

namespace sbstlab::stats {

/// Regularized incomplete beta I_x(a, b). Continued fraction (Lentz) with
/// the symmetry fallback; relative error well under 1e-10 over the tested
/// domain.
double reg_inc_beta(double a, double b, double x);

/// Regularized lower incomplete gamma P(a, x) and upper Q(a, x) = 1 - P.
/// Series for x < a + 1, continued fraction otherwise.
double reg_inc_gamma_lower(double a, double x);
double reg_inc_gamma_upper(double a, double x);

/// Upper tail of the F distribution: P[F(df1, df2) > f].
double f_upper_tail(double f, double df1, double df2);

/// Upper tail of the chi-square distribution: P[chi2(df) > x].
double chi2_upper_tail(double x, double df);

/// Two-sided tail of Student's t with `df` degrees of freedom.
double t_two_tail(double t, double df);

/// Kolmogorov asymptotic tail Q(lambda) = 2 * sum_j (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_q(double lambda);

/// Standard normal CDF.
double normal_cdf(double z);

} // namespace sbstlab::stats
