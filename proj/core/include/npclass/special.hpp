#pragma once

#include <cstdint>
#include <span>

namespace npc {

// Regularized lower and upper incomplete gamma functions P(a,x), Q(a,x).
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

// x with Pr[chi2_dof > x] = eps.
double chi2_upper_quantile(int dof, double eps);

// ln( n! / prod c_i! ).
double log_multinomial(std::span<const std::int64_t> counts);

}  // namespace npc

namespace npc {

// Two-sided 95% Clopper-Pearson upper limit for zero successes in `trials` draws.
double clopper_pearson_upper_zero(std::int64_t trials);

}  // namespace npc
