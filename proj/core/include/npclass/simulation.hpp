#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "npclass/classifiers.hpp"
#include "npclass/distributions.hpp"

namespace npc {

struct RuleSpec {
    std::string name;
    RuleParams params;
};

struct ExperimentConfig {
    Distribution P0 = Distribution::uniform(2);
    Distribution P1 = Distribution::uniform(2);
    std::vector<std::int64_t> n_grid;
    double alpha = 1.0;  // k = round(alpha n)
    std::int64_t trials = 1;
    std::vector<RuleSpec> rules;
    std::uint64_t master_seed = 0;
    double e0 = 0.0;  // reference level for prefactors; default e0 for rules that need one
    int workers = 1;

    void validate() const;
};

struct ExperimentRow {
    std::string rule;
    std::int64_t n = 0, k = 0, trials = 0;
    std::int64_t errors0 = 0, errors1 = 0;
    double eps0 = 0, eps1 = 0, se0 = 0, se1 = 0;
    double exp0 = 0, exp1 = 0, prefac0 = 0, prefac1 = 0;
    bool censored0 = false, censored1 = false;
};

struct ExperimentResult {
    std::vector<ExperimentRow> rows;  // ordered by n, then by rule order in the config
};

ExperimentResult run_fixed_experiment(const ExperimentConfig& cfg);

// ln(eps) + n E + 0.5 ln(n).
double prefactor_diagnostic(double eps, std::int64_t n, double E);

// Header rule,n,k,trials,eps0,eps1,se0,se1,exp0,exp1,prefac0,prefac1,censored0,censored1.
std::string to_csv(const ExperimentResult& result);

// Rows (beta, alpha_lower) for an increasing grid in (0,1].
std::vector<std::pair<double, double>> run_alpha_sweep(const Distribution& P0, const Distribution& P1, double E0,
                                                       const std::vector<double>& beta_grid);

// Weighted least-squares slope of y on x; equal weights when w is empty.
double regression_slope(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& w = {});

// Decimal with 12 significant digits.
std::string format_number(double v);

}  // namespace npc
