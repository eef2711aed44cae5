#pragma once

namespace gazelink::stats {

/// Regularized incomplete beta I_x(a, b), evaluated by a modified-Lentz
/// continued fraction. Requires a > 0, b > 0, 0 <= x <= 1.
double regularized_incomplete_beta(double a, double b, double x);

/// P(T <= t) for Student's t with `df` degrees of freedom.
double student_t_cdf(double t, double df);

/// P(|T| >= |t|).
double student_t_two_tailed_p(double t, double df);

/// P(F >= f) for the F distribution with (d1, d2) degrees of freedom.
double f_upper_tail_p(double f, double d1, double d2);

}  // namespace gazelink::stats
