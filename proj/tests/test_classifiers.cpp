#include <doctest.h>

#include <cmath>
#include <random>

#include "npclass/classifiers.hpp"
#include "npclass/errors.hpp"
#include "npclass/exponents.hpp"
#include "npclass/special.hpp"

#ifdef NPCLASS_HAVE_BOOST
#include <boost/math/special_functions/gamma.hpp>
#endif

using namespace npc;
using doctest::Approx;

namespace {

const Distribution kP0 = Distribution::bernoulli(0.3);
const Distribution kP1 = Distribution::bernoulli(0.4);

FixedClassifierConfig interp_cfg(double beta, double e0) {
    FixedClassifierConfig c;
    c.beta = beta;
    c.E0 = e0;
    return c;
}

// Sum over every sequence of length len on an alphabet of size a; fn(counts, prob weight under p).
template <class Fn>
void for_each_sequence(int len, const Distribution& p, Fn fn) {
    const std::size_t a = p.size();
    std::vector<std::size_t> seq(len, 0);
    while (true) {
        std::vector<std::int64_t> counts(a, 0);
        double w = 1.0;
        for (std::size_t s : seq) {
            ++counts[s];
            w *= p[s];
        }
        fn(EmpiricalType(counts), w);
        int i = 0;
        while (i < len && ++seq[i] == a) seq[i++] = 0;
        if (i == len) break;
    }
}

// Direct threshold by grid over the ternary simplex restricted to the E0 ball.
double grid_gamma(const Distribution& P0, const std::vector<double>& t, double e0, double beta) {
    double best = 1e9;
    const int m = 1500;
    for (int i = 0; i <= m; ++i)
        for (int j = 0; i + j <= m; ++j) {
            const std::vector<double> q = {double(i) / m, double(j) / m, double(m - i - j) / m};
            if (kl_divergence(q, P0.span()) <= e0) best = std::min(best, kl_divergence(q, t));
        }
    return beta * best - e0;
}

}  // namespace

TEST_SUITE("classifiers") {
    TEST_CASE("lrt_decide") {
        const double d01 = kl_divergence(kP0, kP1), d10 = kl_divergence(kP1, kP0);
        CHECK(lrt_decide(EmpiricalType({7, 3}), kP0, kP1, -d01 + 1e-3).hypothesis == 0);
        CHECK(lrt_decide(EmpiricalType({6, 4}), kP0, kP1, d10 - 1e-3).hypothesis == 1);
        // [.5,.5]: 0.5 ln(.5/.7) + 0.5 ln(.5/.3) - 0.5 ln(.5/.6) - 0.5 ln(.5/.4) = 0.5 ln(.24/.21) > 0.
        const auto d = lrt_decide(EmpiricalType({2, 2}), kP0, kP1, 0.0);
        CHECK(d.statistic == Approx(0.5 * std::log(0.24 / 0.21)).epsilon(1e-12));
        CHECK(d.hypothesis == 1);
        // Tie goes to 1.
        CHECK(lrt_decide(EmpiricalType({2, 2}), kP0, kP1, d.statistic).hypothesis == 1);
    }

    TEST_CASE("glrt_decide") {
        CHECK(glrt_decide(EmpiricalType({7, 3}), kP0, 0.01).hypothesis == 0);
        const auto half = Distribution::uniform(2);
        const double at = kl_divergence(std::vector<double>{0.9, 0.1}, half.span());
        CHECK(at == Approx(0.368064).epsilon(1e-5));
        CHECK(glrt_decide(EmpiricalType({9, 1}), half, 0.1).hypothesis == 1);
        const double exact = glrt_decide(EmpiricalType({9, 1}), half, 0.1).statistic;
        CHECK(exact == Approx(at).epsilon(1e-12));
        CHECK(glrt_decide(EmpiricalType({9, 1}), half, exact).hypothesis == 0);
    }

    TEST_CASE("interp_decide") {
        const auto cfg = interp_cfg(1.0, 0.005);
        const EmpiricalType tX({60, 40});
        CHECK(kl_divergence(perturb_type(tX, default_delta(10)), kP0) > 0.005);
        CHECK(interp_decide(EmpiricalType({7, 3}), tX, kP0, cfg).hypothesis == 0);
        CHECK(interp_decide(EmpiricalType({6, 4}), EmpiricalType({6, 4}), kP0, cfg).hypothesis == 1);
        // Training inside the ball falls back to 0.
        CHECK(interp_decide(EmpiricalType({0, 10}), EmpiricalType({70, 30}), kP0, cfg).hypothesis == 0);
        CHECK_THROWS_AS(interp_decide(EmpiricalType({0, 0}), tX, kP0, cfg), InvalidArgument);

        // Ternary case against a grid-based threshold.
        const Distribution P0({0.3, 0.3, 0.4}), P1({0.35, 0.35, 0.3});
        RandomStream rs(41);
        int checked = 0;
        for (int trial = 0; trial < 30; ++trial) {
            const auto tXt = sample_type(P1, 20, rs);
            const auto tx = sample_type(P1, 10, rs);
            const auto tp = perturb_type(tXt, default_delta(10));
            if (kl_divergence(tp, P0) <= 0.005) continue;
            const auto d = interp_decide(tx, tXt, P0, cfg);
            const double g = grid_gamma(P0, tp.probs(), 0.005, 1.0);
            // Grid points are feasible, so the grid minimum sits slightly above the exact one.
            CHECK(g - d.threshold >= -1e-12);
            CHECK(g - d.threshold < 5e-4);
            if (std::abs(d.statistic - g) > 5e-4) CHECK(d.hypothesis == (d.statistic <= g ? 1 : 0));
            if (++checked == 5) break;
        }
        CHECK(checked == 5);
    }

    TEST_CASE("chi-squared quantile") {
        CHECK(std::abs(chi2_upper_quantile(1, 0.05) - 3.841459) < 1e-5);
        CHECK(std::abs(chi2_upper_quantile(2, 0.1) - (-2.0 * std::log(0.1))) < 1e-9);
        for (int dof = 1; dof <= 6; ++dof)
            for (double eps : {0.01, 0.1, 0.5, 0.9}) {
                const double x = chi2_upper_quantile(dof, eps);
                CHECK(regularized_gamma_q(0.5 * dof, 0.5 * x) == Approx(eps).epsilon(1e-10));
#ifdef NPCLASS_HAVE_BOOST
                CHECK(regularized_gamma_q(0.5 * dof, 0.5 * x) ==
                      Approx(boost::math::gamma_q(0.5 * dof, 0.5 * x)).epsilon(1e-12));
                CHECK(regularized_gamma_p(0.5 * dof, 0.5 * x + 3.0) ==
                      Approx(boost::math::gamma_p(0.5 * dof, 0.5 * x + 3.0)).epsilon(1e-12));
#endif
            }
    }

    TEST_CASE("gutman_decide") {
        CHECK(gutman_decide(EmpiricalType({70, 30}), EmpiricalType({70, 30}), 1.0, 0.1).hypothesis == 1);
        CHECK_THROWS_AS(gutman_decide(EmpiricalType({70, 30}), EmpiricalType({70, 30}), 1.0, 1.0), InvalidArgument);
        CHECK_THROWS_AS(gutman_decide(EmpiricalType({70, 30}), EmpiricalType({7, 3}), 1.0, 0.1), InvalidArgument);

        // Slide the training counts away from [70,30] until the decision flips.
        const EmpiricalType tx({70, 30});
        const double thr = chi2_upper_quantile(1, 0.1) / 200.0;
        int flipped = -1;
        for (int c = 70; c >= 0; --c) {
            const EmpiricalType tX({c, 100 - c});
            const double g = gjs_divergence(1.0, tx.frequencies(), tX.frequencies());
            const auto d = gutman_decide(tx, tX, 1.0, 0.1);
            CHECK(d.statistic == Approx(g).epsilon(1e-14));
            if (g > thr) {
                flipped = c;
                CHECK(d.hypothesis == 0);
                CHECK(gutman_decide(tx, EmpiricalType({c + 1, 99 - c}), 1.0, 0.1).hypothesis == 1);
                break;
            }
        }
        CHECK(flipped > 0);
    }

    TEST_CASE("gutman threshold positive and decreasing in n") {
        double prev = 1e9;
        for (int n = 10; n <= 1000; n += 10) {
            const double t = gutman_decide(EmpiricalType({n / 2, n - n / 2}), EmpiricalType({n / 2, n - n / 2}), 1.0, 0.05)
                                 .threshold;
            CHECK(t > 0.0);
            CHECK(t < prev);
            prev = t;
        }
    }

    TEST_CASE("make_rule contract") {
        CHECK_THROWS_AS(make_rule("nope", {}, kP0, kP1), InvalidArgument);
        CHECK_THROWS_AS(make_rule("glrt", {{"e0", 0.1}, {"beta", 1.0}}, kP0, kP1), InvalidArgument);
        CHECK_THROWS_AS(make_rule("glrt", {}, kP0, kP1), InvalidArgument);
        CHECK_THROWS_AS(make_rule("lrt", {{"e0", 0.1}, {"gamma", 0.0}}, kP0, kP1), InvalidArgument);
        CHECK(make_rule("interp", {{"e0", 0.005}}, kP0, kP1)->name() == "interp");
        CHECK_FALSE(make_rule("always1", {}, kP0, kP1)->uses_training());
    }

    TEST_CASE("compositions") {
        const auto c = compositions(3, 3);
        CHECK(c.size() == 10);
        CHECK(composition_count(3, 3) == 10.0);
        CHECK(composition_count(1500, 2) == 1501.0);
        for (const auto& v : c) CHECK(v[0] + v[1] + v[2] == 3);
        CHECK(c.front() == std::vector<std::int64_t>{3, 0, 0});
        CHECK(c.back() == std::vector<std::int64_t>{0, 0, 3});
    }

    TEST_CASE("exact_error_probs examples") {
        const auto a0 = exact_error_probs(*make_rule("always0", {}, kP0, kP1), kP0, kP1, 12, 5);
        CHECK(a0.eps0 == 0.0);
        CHECK(a0.eps1 == Approx(1.0).epsilon(1e-14));
        const auto a1 = exact_error_probs(*make_rule("always1", {}, kP0, kP1), kP0, kP1, 12, 5);
        CHECK(a1.eps0 == Approx(1.0).epsilon(1e-14));
        CHECK(a1.eps1 == 0.0);

        const auto lrt = make_rule("lrt", {{"gamma", 0.0}}, kP0, kP1);
        const auto ex = exact_error_probs(*lrt, kP0, kP1, 8, 1);
        double e0 = 0.0, e1 = 0.0;
        for_each_sequence(8, kP0, [&](const EmpiricalType& t, double w) {
            if (lrt_decide(t, kP0, kP1, 0.0).hypothesis == 1) e0 += w;
        });
        for_each_sequence(8, kP1, [&](const EmpiricalType& t, double w) {
            if (lrt_decide(t, kP0, kP1, 0.0).hypothesis == 0) e1 += w;
        });
        CHECK(std::abs(ex.eps0 - e0) <= 1e-12);
        CHECK(std::abs(ex.eps1 - e1) <= 1e-12);

        CHECK_THROWS_AS(exact_error_probs(*lrt, Distribution::uniform(8), Distribution::uniform(8), 60, 60), DomainError);
    }

    TEST_CASE("property: decide-1 mass consistency against sequence enumeration") {
        const Distribution P0({0.3, 0.3, 0.4}), P1({0.2, 0.5, 0.3});
        for (const char* name : {"interp", "gutman"}) {
            const RuleParams params = std::string(name) == "interp" ? RuleParams{{"e0", 0.02}, {"beta", 0.6}}
                                                                   : RuleParams{{"alpha", 1.0}, {"epsilon", 0.2}};
            const auto rule = make_rule(name, params, P0, P1);
            const auto ex = exact_error_probs(*rule, P0, P1, 4, 4);
            double m0 = 0.0, m1 = 0.0;
            for_each_sequence(4, P1, [&](const EmpiricalType& tX, double wX) {
                const auto b = rule->bind(tX, 4);
                for_each_sequence(4, P0, [&](const EmpiricalType& t, double w) { m0 += wX * w * b->decide(t).hypothesis; });
                for_each_sequence(4, P1, [&](const EmpiricalType& t, double w) { m1 += wX * w * b->decide(t).hypothesis; });
            });
            CHECK(std::abs(ex.eps0 - m0) <= 1e-12);
            CHECK(std::abs((1.0 - ex.eps1) - m1) <= 1e-12);
        }
    }

    TEST_CASE("property: interp decide-0 region grows with beta") {
        std::mt19937_64 g(8);
        const Distribution P0({0.3, 0.3, 0.4});
        RandomStream rs(9);
        std::uniform_real_distribution<double> u(0.01, 1.0);
        for (int i = 0; i < 200; ++i) {
            const auto tx = sample_type(Distribution({0.2, 0.4, 0.4}), 30, rs);
            const auto tX = sample_type(Distribution({0.2, 0.5, 0.3}), 30, rs);
            for (int j = 0; j < 10; ++j) {
                double b1 = u(g), b2 = u(g);
                if (b1 > b2) std::swap(b1, b2);
                if (interp_decide(tx, tX, P0, interp_cfg(b1, 0.01)).hypothesis == 0)
                    REQUIRE(interp_decide(tx, tX, P0, interp_cfg(b2, 0.01)).hypothesis == 0);
            }
        }
    }

    TEST_CASE("property: GLRT type-I exponent approaches E0 from above") {
        const double e0 = 0.05;
        const auto glrt = make_rule("glrt", {{"e0", e0}}, kP0, kP1);
        auto rate = [&](int n) { return -std::log(exact_error_probs(*glrt, kP0, kP1, n, 1).eps0) / n; };
        const double r20 = rate(20), r200 = rate(200);
        for (int n = 20; n <= 200; n += 20) CHECK(rate(n) > e0);
        CHECK(r200 - e0 < r20 - e0);
    }

    TEST_CASE("config validation") {
        auto c = interp_cfg(1.0, 0.01);
        CHECK_NOTHROW(c.validate());
        c.delta_rule = [](std::int64_t n) { return 1.0 / double(n); };
        CHECK_THROWS_AS(c.validate(), InvalidArgument);
        CHECK_THROWS_AS(interp_cfg(0.0, 0.01).validate(), InvalidArgument);
        CHECK(default_delta(1) == 0.5);
        CHECK(default_delta(1000) == 1e-6);
    }
}
