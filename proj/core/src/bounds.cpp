#include "npclass/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "npclass/exponents.hpp"

namespace npc {

SymmetricMatrix::SymmetricMatrix(std::size_t dim, std::vector<double> entries) : dim_(dim), a_(std::move(entries)) {
    if (dim_ == 0 || a_.size() != dim_ * dim_) throw InvalidArgument("symmetric matrix: entry count must be dim^2");
    for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t j = i + 1; j < dim_; ++j) {
            const double x = a_[i * dim_ + j], y = a_[j * dim_ + i];
            if (std::abs(x - y) > 1e-12 * std::max(1.0, std::max(std::abs(x), std::abs(y))))
                throw InvalidArgument("symmetric matrix: asymmetry beyond tolerance");
        }
}

SymmetricMatrix SymmetricMatrix::zeros(std::size_t dim) { return SymmetricMatrix(dim, std::vector<double>(dim * dim)); }

std::vector<double> SymmetricMatrix::apply(const std::vector<double>& x) const {
    std::vector<double> y(dim_, 0.0);
    for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t j = 0; j < dim_; ++j) y[i] += a_[i * dim_ + j] * x[j];
    return y;
}

std::vector<double> eigenvalues_symmetric(const SymmetricMatrix& m) {
    const std::size_t n = m.dim();
    if (n == 1) return {m(0, 0)};
    if (n == 2) {
        const double a = m(0, 0), b = m(0, 1), d = m(1, 1);
        const double mean = 0.5 * (a + d), rad = std::hypot(0.5 * (a - d), b);
        return {mean - rad, mean + rad};
    }
    std::vector<double> a = m.entries();
    auto A = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
    auto off_mass = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) s += A(i, j) * A(i, j);
        return std::sqrt(s);
    };
    for (int sweep = 0; sweep < 100 && off_mass() > 1e-13; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = A(p, q);
                if (apq == 0.0) continue;
                const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
                const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = A(k, p), akq = A(k, q);
                    A(k, p) = c * akp - s * akq;
                    A(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = A(p, k), aqk = A(q, k);
                    A(p, k) = c * apk - s * aqk;
                    A(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = A(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

double min_eigen_symmetric(const SymmetricMatrix& m) { return eigenvalues_symmetric(m).front(); }

namespace {

struct Projection {
    double eta1;
    double eta_beta;
    std::vector<double> q;
    std::vector<double> l;      // ln(Q/P0)
    std::vector<double> omega;  // beta ln(P1/P0) + (1-beta) ln(Q/P0)
};

Projection projection(const Distribution& P0, const Distribution& P1, double E0, double beta) {
    if (!(beta > 0.0 && beta <= 1.0)) throw InvalidArgument("beta must lie in (0,1]");
    if (P0.size() != P1.size()) throw InvalidArgument("bounds: dimension mismatch");
    const auto tilt = solve_tilt_radius(P0, P1, E0);
    Projection p;
    p.eta1 = tilt.multiplier;
    p.eta_beta = p.eta1 / (1.0 - p.eta1 * (1.0 - beta));
    p.q = tilt.distribution.probs();
    const std::size_t k = p.q.size();
    p.l.resize(k);
    p.omega.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        p.l[i] = std::log(p.q[i] / P0[i]);
        p.omega[i] = beta * std::log(P1[i] / P0[i]) + (1.0 - beta) * p.l[i];
    }
    return p;
}

double checked_sqrt(double var) {
    if (!(var > 1e-14)) throw DomainError("degenerate pair: direction variance underflows");
    return std::sqrt(var);
}

LowerBoundTerms assemble(const Projection& p, const Distribution& P1, double beta, const std::vector<double>& v,
                         const std::vector<double>& w) {
    const std::size_t k = p.q.size();
    auto H = SymmetricMatrix::zeros(k);
    const double scale = beta * p.eta_beta;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i; j < k; ++j) {
            double m = p.q[i] * p.q[j] + p.eta1 * v[i] * v[j] + (1.0 - p.eta1) * w[i] * w[j];
            if (i == j) m -= p.q[i];
            const double h = scale * m / std::sqrt(P1[i] * P1[j]);
            H.at(i, j) = h;
            H.at(j, i) = h;
        }
    }
    return {p.eta1, p.eta_beta, p.q, std::move(H)};
}

}  // namespace

LowerBoundTerms hessian_displayed(const Distribution& P0, const Distribution& P1, double E0, double beta) {
    const auto p = projection(P0, P1, E0, beta);
    const std::size_t k = p.q.size();
    double sl = 0.0, so = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        sl += p.q[i] * p.l[i] * p.l[i];
        so += p.q[i] * p.omega[i] * p.omega[i];
    }
    const double nl = checked_sqrt(sl), no = checked_sqrt(so);
    std::vector<double> v(k), w(k);
    for (std::size_t i = 0; i < k; ++i) {
        w[i] = (p.q[i] * p.l[i] - E0) / nl;
        v[i] = p.q[i] * p.omega[i] / no;
    }
    return assemble(p, P1, beta, v, w);
}

LowerBoundTerms hessian_centered(const Distribution& P0, const Distribution& P1, double E0, double beta) {
    const auto p = projection(P0, P1, E0, beta);
    const std::size_t k = p.q.size();
    double ml = 0.0, mo = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        ml += p.q[i] * p.l[i];
        mo += p.q[i] * p.omega[i];
    }
    double vl = 0.0, vo = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        vl += p.q[i] * (p.l[i] - ml) * (p.l[i] - ml);
        vo += p.q[i] * (p.omega[i] - mo) * (p.omega[i] - mo);
    }
    const double sl = checked_sqrt(vl), so = checked_sqrt(vo);
    std::vector<double> v(k), w(k);
    for (std::size_t i = 0; i < k; ++i) {
        w[i] = p.q[i] * (p.l[i] - ml) / sl;
        v[i] = p.q[i] * (p.omega[i] - mo) / so;
    }
    return assemble(p, P1, beta, v, w);
}

double alpha_lower(const Distribution& P0, const Distribution& P1, double E0, double beta) {
    if (!(E0 > 0.0 && E0 < kl_divergence(P1, P0))) throw DomainError("alpha_lower: need 0 < E0 < D(P1||P0)");
    return std::max(-min_eigen_symmetric(hessian_displayed(P0, P1, E0, beta).H), 0.0);
}

double alpha_lower_simplified(const Distribution& P0, const Distribution& P1, double E0, double beta) {
    if (P1.size() < 6) throw InvalidArgument("simplified bound requires |X| >= 6");
    const auto p = projection(P0, P1, E0, beta);
    std::vector<double> ratio(p.q.size());
    for (std::size_t i = 0; i < ratio.size(); ++i) ratio[i] = p.q[i] / P1[i];
    std::sort(ratio.begin(), ratio.end(), std::greater<>());
    return beta * p.eta_beta * ratio[2];
}

double dual_objective(const Distribution& P0, const Distribution& P1, const Distribution& Q1, double gamma, double nu) {
    double s = 0.0;
    for (std::size_t i = 0; i < P0.size(); ++i) s += std::pow(P0[i], nu) * P1[i] * std::pow(Q1[i], -nu);
    return nu * gamma - std::log(s);
}

UpperBoundTerms alpha_upper_terms(const Distribution& P0, const Distribution& P1, double E0) {
    if (P0.size() != P1.size()) throw InvalidArgument("alpha_upper: dimension mismatch");
    if (!(E0 > 0.0 && E0 < kl_divergence(P1, P0))) throw DomainError("alpha_upper: need 0 < E0 < D(P1||P0)");
    const double e1 = optimal_tradeoff(P0, P1, E0).E1;
    const double gamma = e1 - E0;  // beta E1 - E0 at beta = 1
    // Golden-section on the concave dual over [0, 1].
    auto g = [&](double nu) { return dual_objective(P0, P1, P1, gamma, nu); };
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = 0.0, b = 1.0, c = b - phi * (b - a), d = a + phi * (b - a);
    double gc = g(c), gd = g(d);
    for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
        if (gc > gd) b = d, d = c, gd = gc, c = b - phi * (b - a), gc = g(c);
        else a = c, c = d, gc = gd, d = a + phi * (b - a), gd = g(d);
    }
    UpperBoundTerms t{};
    t.nu = 0.5 * (a + b);
    t.lambda = 1.0 - t.nu;
    t.E1 = e1;
    t.kappa = std::sqrt(e1 / (t.lambda * (4.0 + t.lambda)));
    t.p1_min = P1.min_prob();
    t.value = t.lambda * (4.0 + t.lambda) * (1.0 + t.kappa) / (t.p1_min * t.p1_min);
    return t;
}

double alpha_upper(const Distribution& P0, const Distribution& P1, double E0) {
    return alpha_upper_terms(P0, P1, E0).value;
}

AlphaBounds alpha_bounds(const Distribution& P0, const Distribution& P1, double E0, double beta) {
    AlphaBounds b{alpha_lower(P0, P1, E0, beta), alpha_upper(P0, P1, E0), std::nullopt};
    if (P1.size() >= 6) b.lower_simplified = alpha_lower_simplified(P0, P1, E0, beta);
    return b;
}

}  // namespace npc
