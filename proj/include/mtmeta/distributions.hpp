#pragma once

namespace mtmeta {

/// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);

/// Student-t cumulative distribution P(T <= t) with `df` degrees of freedom.
double student_t_cdf(double t, double df);

/// P(T >= t), computed without 1 - cdf cancellation for large t.
double student_t_upper_tail(double t, double df);

/// P(|T| >= |t|).
double student_t_two_sided(double t, double df);

/// Standard normal upper tail P(Z >= z).
double normal_upper_tail(double z);

}  // namespace mtmeta
