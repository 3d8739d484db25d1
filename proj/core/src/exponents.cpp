#include "npclass/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace npc {

namespace {

constexpr int kMaxIter = 200;

std::vector<double> logs(const Distribution& p) {
    std::vector<double> out(p.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::log(p[i]);
    return out;
}

// Exponential family with logits base + t*dir.
struct Moments {
    double logz;
    double mean;  // E_t[dir]
    double var;   // Var_t[dir]
};

Moments family_moments(std::span<const double> base, std::span<const double> dir, double t,
                       std::vector<double>* q = nullptr) {
    const std::size_t k = base.size();
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < k; ++i) mx = std::max(mx, base[i] + t * dir[i]);
    double z = 0.0, m1 = 0.0, m2 = 0.0;
    // Small alphabets: two passes over k entries are cheaper than allocating.
    for (std::size_t i = 0; i < k; ++i) {
        const double w = std::exp(base[i] + t * dir[i] - mx);
        z += w;
        m1 += w * dir[i];
    }
    const double mean = m1 / z;
    for (std::size_t i = 0; i < k; ++i) {
        const double w = std::exp(base[i] + t * dir[i] - mx);
        const double c = dir[i] - mean;
        m2 += w * c * c;
    }
    if (q) {
        q->resize(k);
        for (std::size_t i = 0; i < k; ++i) (*q)[i] = std::exp(base[i] + t * dir[i] - mx) / z;
    }
    return {mx + std::log(z), mean, m2 / z};
}

// Root of a monotone f on [lo, hi] given f and f' (safeguarded Newton inside a bisection bracket).
// sign_lo is the sign of f at lo.
template <class F>
double solve_bracketed(F&& f_and_df, double lo, double hi, double start, bool positive_at_lo, double ftol) {
    double t = start;
    for (int it = 0; it < kMaxIter; ++it) {
        const auto [f, df] = f_and_df(t);
        if (std::abs(f) <= ftol) return t;
        if ((f > 0) == positive_at_lo) lo = t; else hi = t;
        if (hi - lo <= 1e-15) return t;
        double next = (df != 0.0 && std::isfinite(df)) ? t - f / df : lo - 1.0;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        t = next;
    }
    return t;
}

void check_pair(const Distribution& a, const Distribution& b, const char* what) {
    if (a.size() != b.size()) throw InvalidArgument(std::string(what) + ": dimension mismatch");
}

void check_beta(double beta) {
    if (!(beta > 0.0 && beta <= 1.0)) throw InvalidArgument("beta must lie in (0,1]");
}

// Tangent directions (sum zero, unit norm) covering the sphere of the simplex's tangent space.
std::vector<std::vector<double>> tangent_directions(std::size_t k, int count) {
    std::vector<std::vector<double>> basis;
    for (std::size_t j = 0; j + 1 < k; ++j) {
        std::vector<double> v(k, 0.0);
        v[j] = 1.0;
        v[k - 1] = -1.0;
        for (const auto& b : basis) {
            double dot = 0.0;
            for (std::size_t i = 0; i < k; ++i) dot += v[i] * b[i];
            for (std::size_t i = 0; i < k; ++i) v[i] -= dot * b[i];
        }
        double nrm = 0.0;
        for (double x : v) nrm += x * x;
        nrm = std::sqrt(nrm);
        for (double& x : v) x /= nrm;
        basis.push_back(std::move(v));
    }
    auto combine = [&](const std::vector<double>& coef) {
        std::vector<double> d(k, 0.0);
        for (std::size_t j = 0; j < basis.size(); ++j)
            for (std::size_t i = 0; i < k; ++i) d[i] += coef[j] * basis[j][i];
        return d;
    };
    std::vector<std::vector<double>> dirs;
    const std::size_t dim = k - 1;
    if (dim == 1) {
        dirs.push_back(combine({1.0}));
        dirs.push_back(combine({-1.0}));
    } else if (dim == 2) {
        for (int j = 0; j < count; ++j) {
            const double a = 2.0 * std::numbers::pi * j / count;
            dirs.push_back(combine({std::cos(a), std::sin(a)}));
        }
    } else if (dim == 3) {
        // Fibonacci sphere.
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (int j = 0; j < count; ++j) {
            const double z = 1.0 - 2.0 * (j + 0.5) / count;
            const double rad = std::sqrt(1.0 - z * z);
            dirs.push_back(combine({rad * std::cos(golden * j), rad * std::sin(golden * j), z}));
        }
    } else {
        RandomStream rng(0x5eedULL + k);
        for (int j = 0; j < count; ++j) {
            std::vector<double> c(dim);
            double nrm = 0.0;
            for (double& x : c) {
                // Box-Muller keeps the stream self-contained.
                const double u1 = 1.0 - rng.uniform(), u2 = rng.uniform();
                x = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
                nrm += x * x;
            }
            for (double& x : c) x /= std::sqrt(nrm);
            dirs.push_back(combine(c));
        }
    }
    return dirs;
}

// Largest step along d that keeps P1 + t d strictly inside the simplex.
double max_step(const Distribution& P1, const std::vector<double>& d) {
    double t = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < d.size(); ++i)
        if (d[i] < 0.0) t = std::min(t, P1[i] / -d[i]);
    return t;
}

std::vector<double> along(const Distribution& P1, const std::vector<double>& d, double t) {
    std::vector<double> q(d.size());
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = P1[i] + t * d[i];
    return q;
}

// Step t with D(P1 + t d || P1) = r; r must be below the boundary value along d.
double step_at_radius(const Distribution& P1, const std::vector<double>& d, double r) {
    double lo = 0.0, hi = max_step(P1, d) * (1.0 - 1e-12);
    for (int it = 0; it < kMaxIter && hi - lo > 1e-16 * (1.0 + hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (kl_divergence(along(P1, d, mid), P1.span()) < r) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

double mismatched_extended(const Distribution& P0, const Distribution& P1, const std::vector<double>& q1, double E0,
                           double beta) {
    const Distribution Q1(q1);
    return detail::exponent_for_gamma(P0, P1, Q1, detail::threshold_gamma_extended(P0, Q1, E0, beta), beta);
}

}  // namespace

namespace detail {

RadiusTilt radius_tilt(std::span<const double> logp0, std::span<const double> logq1, double E0,
                       std::vector<double>* q) {
    const std::size_t k = logp0.size();
    std::vector<double> dir(k);
    for (std::size_t i = 0; i < k; ++i) dir[i] = logp0[i] - logq1[i];
    // D(Q_s||P0) = (s-1) E_s[dir] - log Z(s), decreasing in s with slope (s-1) Var_s[dir].
    auto f = [&](double s) {
        const Moments m = family_moments(logq1, dir, s);
        return std::pair{(s - 1.0) * m.mean - m.logz - E0, (s - 1.0) * m.var};
    };
    const double s = solve_bracketed(f, 0.0, 1.0, 0.5, true, 1e-14 * std::max(1.0, E0));
    const Moments m = family_moments(logq1, dir, s, q);
    return {s, std::max(s * m.mean - m.logz, 0.0)};
}

double threshold_gamma_extended(const Distribution& P0, const Distribution& Q1, double E0, double beta) {
    if (kl_divergence(Q1, P0) <= E0) return -E0;
    return threshold_gamma(P0, Q1, E0, beta);
}

double exponent_for_gamma(const Distribution& P0, const Distribution& P1, const Distribution& Q1, double gamma,
                          double beta) {
    check_beta(beta);
    const auto lp0 = logs(P0), lp1 = logs(P1), lq1 = logs(Q1);
    const std::size_t k = lp0.size();
    auto constraint = [&](std::span<const double> q) {
        double c = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            if (q[i] <= 0.0) continue;
            const double lq = std::log(q[i]);
            c += q[i] * (beta * (lq - lq1[i]) - (lq - lp0[i]));
        }
        return c;
    };
    if (constraint(P1.span()) >= gamma) return 0.0;

    if (beta == 1.0) {
        // Linear constraint E_Q[ln(P0/Q1)] >= gamma: the projection is P1 tilted along ln(P0/Q1).
        std::vector<double> dir(k);
        for (std::size_t i = 0; i < k; ++i) dir[i] = lp0[i] - lq1[i];
        double hi = 1.0;
        while (family_moments(lp1, dir, hi).mean < gamma) {
            hi *= 2.0;
            if (hi > 1e18) throw DomainError("mismatched exponent: constraint unreachable on the tilted family");
        }
        auto f = [&](double t) {
            const Moments m = family_moments(lp1, dir, t);
            return std::pair{m.mean - gamma, m.var};
        };
        const double t = solve_bracketed(f, 0.0, hi, 0.5 * hi, false, 1e-15 * std::max(1.0, std::abs(gamma)));
        const Moments m = family_moments(lp1, dir, t);
        return std::max(t * m.mean - m.logz, 0.0);
    }

    // Non-convex constraint: stationary points lie on the family
    // Q ~ exp((ln P1 - eta beta ln Q1 + eta ln P0) / (1 + eta - eta beta)).
    std::vector<double> q(k);
    auto member = [&](double eta) {
        const double c = 1.0 / (1.0 + eta - eta * beta);
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < k; ++i) {
            q[i] = c * (lp1[i] - eta * beta * lq1[i] + eta * lp0[i]);
            mx = std::max(mx, q[i]);
        }
        double z = 0.0;
        for (double& x : q) z += (x = std::exp(x - mx));
        for (double& x : q) x /= z;
        return constraint(q) - gamma;
    };
    constexpr int kGrid = 1000;
    const double lmin = std::log(1e-6), lmax = std::log(1e8);
    double best = std::numeric_limits<double>::infinity();
    double prev_l = -std::numeric_limits<double>::infinity();
    double prev_r = member(0.0);
    for (int j = 0; j < kGrid; ++j) {
        const double l = lmin + (lmax - lmin) * j / (kGrid - 1);
        const double r = member(std::exp(l));
        if ((prev_r < 0.0) != (r < 0.0)) {
            double a = prev_l, b = l;
            const bool neg_at_a = prev_r < 0.0;
            for (int it = 0; it < kMaxIter; ++it) {
                const double mid = std::isinf(a) ? b - 30.0 : 0.5 * (a + b);
                const double rm = member(std::exp(mid));
                if ((rm < 0.0) == neg_at_a) a = mid; else b = mid;
                if (!std::isinf(a) && b - a <= 1e-14) break;
            }
            // Land on the feasible side of the boundary.
            member(std::exp(neg_at_a ? b : a));
            best = std::min(best, kl_divergence(q, P1.span()));
        }
        prev_l = l;
        prev_r = r;
    }
    if (!std::isfinite(best)) throw DomainError("mismatched exponent: no feasible stationary point found");
    return best;
}

}  // namespace detail

TiltSolution solve_tilt_radius(const Distribution& P0, const Distribution& Q1, double E0) {
    check_pair(P0, Q1, "solve_tilt_radius");
    if (!(E0 > 0.0)) throw DomainError("solve_tilt_radius: E0 must be > 0");
    if (E0 >= kl_divergence(Q1, P0)) throw DomainError("ball contains alternative: E0 >= D(Q1||P0)");
    std::vector<double> q;
    const auto sol = detail::radius_tilt(logs(P0), logs(Q1), E0, &q);
    return {sol.s, Distribution(std::move(q)), sol.value};
}

TiltSolution solve_tilt_hyperplane(const Distribution& P0, const Distribution& P1, double gamma) {
    check_pair(P0, P1, "solve_tilt_hyperplane");
    const double lo_g = -kl_divergence(P0, P1), hi_g = kl_divergence(P1, P0);
    if (!(gamma >= lo_g - 1e-15 && gamma <= hi_g + 1e-15)) throw DomainError("threshold outside achievable band");
    const auto lp0 = logs(P0), lp1 = logs(P1);
    std::vector<double> dir(lp0.size());
    for (std::size_t i = 0; i < dir.size(); ++i) dir[i] = lp0[i] - lp1[i];
    double s;
    if (gamma >= hi_g) {
        s = 0.0;
    } else if (gamma <= lo_g) {
        s = 1.0;
    } else {
        // D(Q||P0) - D(Q||P1) = -E_s[dir], decreasing in s.
        auto f = [&](double t) {
            const Moments m = family_moments(lp1, dir, t);
            return std::pair{-m.mean - gamma, -m.var};
        };
        s = solve_bracketed(f, 0.0, 1.0, 0.5, true, 1e-15 * std::max(1.0, std::abs(gamma)));
    }
    std::vector<double> q;
    const Moments m = family_moments(lp1, dir, s, &q);
    return {s, Distribution(std::move(q)), std::max((s - 1.0) * m.mean - m.logz, 0.0)};
}

double threshold_gamma(const Distribution& P0, const Distribution& Q1, double E0, double beta) {
    check_beta(beta);
    return beta * solve_tilt_radius(P0, Q1, E0).value - E0;
}

TradeoffPoint optimal_tradeoff(const Distribution& P0, const Distribution& P1, double E0) {
    check_pair(P0, P1, "optimal_tradeoff");
    if (!(E0 >= 0.0)) throw DomainError("optimal_tradeoff: E0 must be >= 0");
    if (E0 == 0.0) {
        const double e1 = kl_divergence(P0, P1);
        return {0.0, e1, -e1, 1.0};
    }
    if (E0 >= kl_divergence(P1, P0)) return {E0, 0.0, E0, 0.0};
    const auto sol = detail::radius_tilt(logs(P0), logs(P1), E0);
    return {E0, sol.value, E0 - sol.value, sol.s};
}

double mismatched_exponent(const Distribution& P0, const Distribution& P1, const Distribution& Q1, double E0,
                           double beta) {
    check_pair(P0, P1, "mismatched_exponent");
    check_pair(P0, Q1, "mismatched_exponent");
    return detail::exponent_for_gamma(P0, P1, Q1, threshold_gamma(P0, Q1, E0, beta), beta);
}

double worst_case_exponent(const Distribution& P0, const Distribution& P1, double E0, double beta, double r,
                           int grid_resolution) {
    check_pair(P0, P1, "worst_case_exponent");
    check_beta(beta);
    if (!(r >= 0.0)) throw InvalidArgument("worst_case_exponent: r must be >= 0");
    if (grid_resolution < 4) throw InvalidArgument("worst_case_exponent: grid_resolution must be >= 4");
    if (r >= r_critical(P1)) throw DomainError("radius reaches simplex boundary");
    const double e1_star = mismatched_extended(P0, P1, P1.probs(), E0, beta);
    if (r == 0.0) return e1_star;

    const std::size_t k = P1.size();
    const int ndirs = k == 2 ? 2 : std::max(8, static_cast<int>(std::lround(std::sqrt(grid_resolution))));
    const int nrad = std::max(2, grid_resolution / ndirs);
    double best = e1_star;
    for (const auto& d : tangent_directions(k, ndirs)) {
        const double t_r = step_at_radius(P1, d, r);
        auto eval = [&](double t) { return mismatched_extended(P0, P1, along(P1, d, t), E0, beta); };
        int arg = 0;
        double dir_best = e1_star;
        for (int j = 1; j <= nrad; ++j) {
            const double v = eval(t_r * j / nrad);
            if (v < dir_best) dir_best = v, arg = j;
        }
        if (arg > 0) {
            // Golden-section refinement between the neighbours of the best grid point.
            double a = t_r * (arg - 1) / nrad, b = t_r * std::min(arg + 1, nrad) / nrad;
            const double g = (std::sqrt(5.0) - 1.0) / 2.0;
            double c = b - g * (b - a), e = a + g * (b - a);
            double fc = eval(c), fe = eval(e);
            for (int it = 0; it < 60 && b - a > 1e-14; ++it) {
                if (fc < fe) b = e, e = c, fe = fc, c = b - g * (b - a), fc = eval(c);
                else a = c, c = e, fc = fe, e = a + g * (b - a), fe = eval(e);
            }
            dir_best = std::min({dir_best, fc, fe});
        }
        best = std::min(best, dir_best);
    }
    return best;
}

double alpha_star_numeric(const Distribution& P0, const Distribution& P1, double E0, double beta,
                          int grid_resolution) {
    check_pair(P0, P1, "alpha_star_numeric");
    check_beta(beta);
    if (P1.size() > 4) throw InvalidArgument("alpha_star_numeric: alphabet size must be <= 4");
    if (!(E0 > 0.0 && E0 < kl_divergence(P1, P0))) throw DomainError("alpha_star_numeric: need 0 < E0 < D(P1||P0)");
    const double rc = r_critical(P1);
    const double e1_star = optimal_tradeoff(P0, P1, E0).E1;

    constexpr int kR = 400;
    std::vector<double> radii(kR);
    for (int j = 0; j < kR; ++j) radii[j] = rc * 1e-6 * std::pow((1.0 - 1e-3) / 1e-6, static_cast<double>(j) / (kR - 1));

    std::vector<double> profile(kR, e1_star);
    for (const auto& d : tangent_directions(P1.size(), std::max(grid_resolution, 4))) {
        for (int j = 0; j < kR; ++j) {
            const double v = mismatched_extended(P0, P1, along(P1, d, step_at_radius(P1, d, radii[j])), E0, beta);
            profile[j] = std::min(profile[j], v);
        }
    }
    double best = e1_star / rc;
    double running = e1_star;
    for (int j = 0; j < kR; ++j) {
        running = std::min(running, profile[j]);
        best = std::max(best, (e1_star - running) / radii[j]);
    }
    return best;
}

SteinExponents stein_exponents(const Distribution& P0, const Distribution& P1, double alpha) {
    check_pair(P0, P1, "stein_exponents");
    if (!(alpha > 0.0)) throw InvalidArgument("stein_exponents: alpha must be > 0");
    return {kl_divergence(P0, P1), renyi_divergence(alpha / (1.0 + alpha), P1, P0)};
}

double r_critical(const Distribution& P1) { return -std::log1p(-P1.min_prob()); }

}  // namespace npc
