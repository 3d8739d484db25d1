#include "npclass/simulation.hpp"

#include <cmath>
#include <cstdio>
#include <memory>
#include <sstream>

#include "npclass/bounds.hpp"
#include "npclass/exponents.hpp"
#include "npclass/special.hpp"
#include "parallel.hpp"

namespace npc {

void ExperimentConfig::validate() const {
    if (P0.size() != P1.size()) throw InvalidArgument("experiment: P0 and P1 alphabets differ");
    if (trials < 1) throw InvalidArgument("experiment: trials must be >= 1");
    if (n_grid.empty()) throw InvalidArgument("experiment: n_grid is empty");
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        if (n_grid[i] < 1) throw InvalidArgument("experiment: n values must be >= 1");
        if (i > 0 && n_grid[i] <= n_grid[i - 1]) throw InvalidArgument("experiment: n_grid must be strictly increasing");
    }
    if (!(alpha > 0.0)) throw InvalidArgument("experiment: alpha must be > 0");
    if (rules.empty()) throw InvalidArgument("experiment: no rules");
    if (!(e0 > 0.0)) throw InvalidArgument("experiment: e0 must be > 0");
    if (workers < 1) throw InvalidArgument("experiment: workers must be >= 1");
}

double prefactor_diagnostic(double eps, std::int64_t n, double E) {
    if (!(eps > 0.0 && eps <= 1.0)) throw DomainError("prefactor diagnostic needs eps in (0,1]");
    if (n < 1) throw InvalidArgument("prefactor diagnostic needs n >= 1");
    const double nn = static_cast<double>(n);
    return std::log(eps) + nn * E + 0.5 * std::log(nn);
}

namespace {

std::vector<std::unique_ptr<DecisionRule>> build_rules(const ExperimentConfig& cfg) {
    std::vector<std::unique_ptr<DecisionRule>> out;
    for (const auto& spec : cfg.rules) {
        RuleParams p = spec.params;
        if ((spec.name == "lrt" && !p.count("gamma")) || spec.name == "glrt" || spec.name == "interp") {
            p.try_emplace("e0", cfg.e0);
        }
        if (spec.name == "gutman") p.try_emplace("alpha", cfg.alpha);
        out.push_back(make_rule(spec.name, p, cfg.P0, cfg.P1));
    }
    return out;
}

void finish_side(std::int64_t errors, std::int64_t trials, std::int64_t n, double E, double& eps, double& se,
                 double& expo, double& prefac, bool& censored) {
    const double T = static_cast<double>(trials);
    eps = static_cast<double>(errors) / T;
    se = std::sqrt(eps * (1.0 - eps) / T);
    censored = errors == 0;
    const double p = censored ? clopper_pearson_upper_zero(trials) : eps;
    expo = -std::log(p) / static_cast<double>(n);
    prefac = prefactor_diagnostic(p, n, E);
}

}  // namespace

ExperimentResult run_fixed_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto rules = build_rules(cfg);
    const double e1_ref = optimal_tradeoff(cfg.P0, cfg.P1, cfg.e0).E1;
    constexpr std::uint64_t kDomain = 0xF1;
    const std::size_t R = rules.size();
    ExperimentResult result;
    for (const auto n : cfg.n_grid) {
        const auto k = std::max<std::int64_t>(1, std::llround(cfg.alpha * static_cast<double>(n)));
        // Per-worker tallies [worker][rule][side].
        std::vector<std::vector<std::int64_t>> tallies(static_cast<std::size_t>(cfg.workers),
                                                       std::vector<std::int64_t>(2 * R, 0));
        detail::parallel_blocks(cfg.trials, cfg.workers, [&](std::int64_t begin, std::int64_t end, int w) {
            auto& tally = tallies[static_cast<std::size_t>(w)];
            for (std::int64_t i = begin; i < end; ++i) {
                auto stream = RandomStream::derive(cfg.master_seed,
                                                   {kDomain, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(i)});
                const auto train = sample_type(cfg.P1, k, stream);
                const auto test0 = sample_type(cfg.P0, n, stream);
                const auto test1 = sample_type(cfg.P1, n, stream);
                for (std::size_t r = 0; r < R; ++r) {
                    const auto bound = rules[r]->bind(train, n);
                    if (bound->decide(test0).hypothesis == 1) ++tally[2 * r];
                    if (bound->decide(test1).hypothesis == 0) ++tally[2 * r + 1];
                }
            }
        });
        for (std::size_t r = 0; r < R; ++r) {
            ExperimentRow row;
            row.rule = cfg.rules[r].name;
            row.n = n;
            row.k = k;
            row.trials = cfg.trials;
            for (const auto& t : tallies) {
                row.errors0 += t[2 * r];
                row.errors1 += t[2 * r + 1];
            }
            finish_side(row.errors0, cfg.trials, n, cfg.e0, row.eps0, row.se0, row.exp0, row.prefac0, row.censored0);
            finish_side(row.errors1, cfg.trials, n, e1_ref, row.eps1, row.se1, row.exp1, row.prefac1, row.censored1);
            result.rows.push_back(std::move(row));
        }
    }
    return result;
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string to_csv(const ExperimentResult& result) {
    std::ostringstream os;
    os << "rule,n,k,trials,eps0,eps1,se0,se1,exp0,exp1,prefac0,prefac1,censored0,censored1\n";
    for (const auto& r : result.rows) {
        os << r.rule << ',' << r.n << ',' << r.k << ',' << r.trials << ',' << format_number(r.eps0) << ','
           << format_number(r.eps1) << ',' << format_number(r.se0) << ',' << format_number(r.se1) << ','
           << format_number(r.exp0) << ',' << format_number(r.exp1) << ',' << format_number(r.prefac0) << ','
           << format_number(r.prefac1) << ',' << (r.censored0 ? 1 : 0) << ',' << (r.censored1 ? 1 : 0) << '\n';
    }
    return os.str();
}

std::vector<std::pair<double, double>> run_alpha_sweep(const Distribution& P0, const Distribution& P1, double E0,
                                                       const std::vector<double>& beta_grid) {
    if (beta_grid.empty()) throw InvalidArgument("beta grid is empty");
    for (std::size_t i = 0; i < beta_grid.size(); ++i) {
        if (!(beta_grid[i] > 0.0 && beta_grid[i] <= 1.0)) throw InvalidArgument("beta grid values must lie in (0,1]");
        if (i > 0 && beta_grid[i] <= beta_grid[i - 1]) throw InvalidArgument("grid must be increasing");
    }
    std::vector<std::pair<double, double>> out;
    for (double b : beta_grid) out.emplace_back(b, alpha_lower(P0, P1, E0, b));
    return out;
}

double regression_slope(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& w) {
    if (x.size() != y.size() || x.size() < 2 || (!w.empty() && w.size() != x.size()))
        throw InvalidArgument("regression: need matching vectors with at least two points");
    double sw = 0, sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double wi = w.empty() ? 1.0 : w[i];
        sw += wi;
        sx += wi * x[i];
        sy += wi * y[i];
    }
    const double mx = sx / sw, my = sy / sw;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double wi = w.empty() ? 1.0 : w[i];
        sxy += wi * (x[i] - mx) * (y[i] - my);
        sxx += wi * (x[i] - mx) * (x[i] - mx);
    }
    if (sxx == 0.0) throw InvalidArgument("regression: x values are all equal");
    return sxy / sxx;
}

}  // namespace npc
