#include <doctest.h>

#include <cmath>

#include "npclass/exponents.hpp"
#include "npclass/simulation.hpp"
#include "npclass/special.hpp"

using namespace npc;
using doctest::Approx;

namespace {

ExperimentConfig mini(std::vector<RuleSpec> rules, std::int64_t trials, int workers = 1) {
    ExperimentConfig c;
    c.P0 = Distribution({0.3, 0.3, 0.4});
    c.P1 = Distribution({0.35, 0.35, 0.3});
    c.n_grid = {6, 9};
    c.alpha = 2.0;
    c.trials = trials;
    c.rules = std::move(rules);
    c.master_seed = 12345;
    c.e0 = 0.005;
    c.workers = workers;
    return c;
}

}  // namespace

TEST_SUITE("simulation") {
    TEST_CASE("constant rule tallies") {
        auto c = mini({{"always0", {}}}, 1);
        const auto r = run_fixed_experiment(c);
        REQUIRE(r.rows.size() == 2);
        CHECK(r.rows[0].eps0 == 0.0);
        CHECK(r.rows[0].eps1 == 1.0);
        CHECK(r.rows[0].censored0);
        CHECK(r.rows[0].k == 12);
    }

    TEST_CASE("Monte Carlo agrees with exact enumeration") {
        const std::vector<RuleSpec> rules = {{"lrt", {}}, {"glrt", {}}, {"interp", {{"beta", 0.5}}},
                                             {"gutman", {{"epsilon", 0.2}}}};
        auto c = mini(rules, 40000);
        const auto r = run_fixed_experiment(c);
        std::size_t idx = 0;
        for (auto n : c.n_grid) {
            for (const auto& spec : rules) {
                auto params = spec.params;
                if (spec.name == "gutman") params["alpha"] = c.alpha;
                else params["e0"] = c.e0;
                const auto rule = make_rule(spec.name, params, c.P0, c.P1);
                const auto ex = exact_error_probs(*rule, c.P0, c.P1, n, std::llround(c.alpha * double(n)));
                const auto& row = r.rows[idx++];
                CHECK(row.rule == spec.name);
                CHECK(row.n == n);
                const double s0 = std::sqrt(ex.eps0 * (1 - ex.eps0) / double(c.trials));
                const double s1 = std::sqrt(ex.eps1 * (1 - ex.eps1) / double(c.trials));
                CHECK(std::abs(row.eps0 - ex.eps0) <= 4.0 * s0 + 1e-12);
                CHECK(std::abs(row.eps1 - ex.eps1) <= 4.0 * s1 + 1e-12);
                CHECK(row.se0 == Approx(std::sqrt(row.eps0 * (1 - row.eps0) / double(c.trials))));
            }
        }
    }

    TEST_CASE("partition independence and common random numbers") {
        const std::vector<RuleSpec> rules = {{"lrt", {{"gamma", 0.001}}}, {"lrt", {{"gamma", 0.001 + 1e-12}}},
                                             {"interp", {}}};
        const auto a = run_fixed_experiment(mini(rules, 5000, 1));
        const auto b = run_fixed_experiment(mini(rules, 5000, 8));
        CHECK(to_csv(a) == to_csv(b));
        for (std::size_t i = 0; i < a.rows.size(); i += 3) {
            CHECK(a.rows[i].errors0 == a.rows[i + 1].errors0);
            CHECK(a.rows[i].errors1 == a.rows[i + 1].errors1);
        }
        auto other = mini(rules, 5000, 1);
        other.master_seed = 1;
        CHECK(to_csv(run_fixed_experiment(other)) != to_csv(a));
    }

    TEST_CASE("validation happens before sampling") {
        CHECK_THROWS_AS(run_fixed_experiment(mini({{"bogus", {}}}, 10)), InvalidArgument);
        auto c = mini({{"lrt", {}}}, 10);
        c.n_grid = {9, 6};
        CHECK_THROWS_AS(run_fixed_experiment(c), InvalidArgument);
        c = mini({{"lrt", {}}}, 0);
        CHECK_THROWS_AS(run_fixed_experiment(c), InvalidArgument);
    }

    TEST_CASE("csv schema") {
        const auto r = run_fixed_experiment(mini({{"glrt", {}}}, 100));
        const auto csv = to_csv(r);
        CHECK(csv.rfind("rule,n,k,trials,eps0,eps1,se0,se1,exp0,exp1,prefac0,prefac1,censored0,censored1\n", 0) == 0);
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
        CHECK(format_number(0.1) == "0.1");
        CHECK(format_number(1.0 / 3.0) == "0.333333333333");
    }

    TEST_CASE("prefactor_diagnostic") {
        const double E = 0.005;
        for (std::int64_t n : {10, 200, 1500})
            CHECK(std::abs(prefactor_diagnostic(std::exp(-n * E) / std::sqrt(double(n)), n, E)) < 1e-12);
        // Reference GLRT point at n = 1500: back out eps and reproduce the diagnostic.
        const double ln_eps = 3.65615 - 1500 * E - 0.5 * std::log(1500.0);
        CHECK(prefactor_diagnostic(std::exp(ln_eps), 1500, E) == Approx(3.65615).epsilon(1e-12));
        CHECK_THROWS_AS(prefactor_diagnostic(0.0, 10, E), DomainError);
        // Slope of an exact (|X|-2)/2 ln n model is 0.5.
        std::vector<double> x, y;
        for (int n = 200; n <= 1500; n += 100) {
            x.push_back(std::log(double(n)));
            y.push_back(0.5 * std::log(double(n)) + 1.0);
        }
        CHECK(regression_slope(x, y) == Approx(0.5).epsilon(1e-12));
    }

    TEST_CASE("run_alpha_sweep") {
        const auto P0 = Distribution::bernoulli(0.3), P1 = Distribution::bernoulli(0.4);
        const auto rows = run_alpha_sweep(P0, P1, 0.005, {0.25, 0.5, 0.75, 1.0});
        const double want[4] = {0.0064371, 0.0117359, 0.0164433, 0.0204974};
        REQUIRE(rows.size() == 4);
        for (int i = 0; i < 4; ++i) CHECK(std::abs(rows[i].second - want[i]) <= 1e-4);
        CHECK(run_alpha_sweep(P0, P1, 0.005, {0.5}).size() == 1);
        CHECK_THROWS_WITH_AS(run_alpha_sweep(P0, P1, 0.005, {1.0, 0.5}), "grid must be increasing", InvalidArgument);
    }

    TEST_CASE("censored rows use the Clopper-Pearson limit") {
        const auto r = run_fixed_experiment(mini({{"always1", {}}}, 500));
        CHECK(r.rows[0].censored1);
        CHECK(r.rows[0].exp1 == Approx(-std::log(clopper_pearson_upper_zero(500)) / 6.0));
        CHECK(clopper_pearson_upper_zero(500) == Approx(1.0 - std::pow(0.025, 1.0 / 500.0)));
    }
}
