#include "npclass/special.hpp"

#include <cmath>
#include <limits>

#include "npclass/errors.hpp"

namespace npc {

namespace {

constexpr double kEps = 1e-16;

// Series for P(a,x), convergent for x < a + 1.
double gamma_p_series(double a, double x) {
    double term = 1.0 / a, sum = term;
    for (int n = 1; n < 10000; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Lentz continued fraction for Q(a,x), convergent for x >= a + 1.
double gamma_q_fraction(double a, double x) {
    constexpr double tiny = std::numeric_limits<double>::min() / kEps;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

void check(double a, double x) {
    if (!(a > 0.0) || !(x >= 0.0)) throw InvalidArgument("incomplete gamma: need a > 0 and x >= 0");
}

}  // namespace

double regularized_gamma_p(double a, double x) {
    check(a, x);
    if (x == 0.0) return 0.0;
    return x < a + 1.0 ? gamma_p_series(a, x) : 1.0 - gamma_q_fraction(a, x);
}

double regularized_gamma_q(double a, double x) {
    check(a, x);
    if (x == 0.0) return 1.0;
    return x < a + 1.0 ? 1.0 - gamma_p_series(a, x) : gamma_q_fraction(a, x);
}

double chi2_upper_quantile(int dof, double eps) {
    if (dof < 1) throw InvalidArgument("chi-squared quantile: dof must be >= 1");
    if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("chi-squared quantile: eps must lie in (0,1)");
    const double a = 0.5 * dof;
    auto survival = [&](double x) { return regularized_gamma_q(a, 0.5 * x); };
    double lo = 0.0, hi = std::max(1.0, 2.0 * dof);
    while (survival(hi) > eps) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (survival(mid) > eps) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

double log_multinomial(std::span<const std::int64_t> counts) {
    std::int64_t n = 0;
    double s = 0.0;
    for (auto c : counts) {
        n += c;
        s -= std::lgamma(static_cast<double>(c) + 1.0);
    }
    return s + std::lgamma(static_cast<double>(n) + 1.0);
}

}  // namespace npc

namespace npc {

double clopper_pearson_upper_zero(std::int64_t trials) {
    if (trials < 1) throw InvalidArgument("Clopper-Pearson: trials must be >= 1");
    return -std::expm1(std::log(0.025) / static_cast<double>(trials));
}

}  // namespace npc
