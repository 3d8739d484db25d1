#include "cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "npclass/npclass.hpp"

namespace npc::cli {

namespace {

using json = nlohmann::json;

enum class Kind { Dist, Number, Int, UInt, IntList, NumberList, OnOff, Text, TextList, Switch };

struct FlagDef {
    const char* key;
    Kind kind;
    const char* help;
};

const std::map<std::string, FlagDef>& flag_table() {
    static const std::map<std::string, FlagDef> t = {
        {"p0", {"p0", Kind::Dist, "null distribution, comma-separated"}},
        {"p1", {"p1", Kind::Dist, "alternative distribution, comma-separated"}},
        {"q1", {"q1", Kind::Dist, "training-limit distribution, comma-separated"}},
        {"e0", {"e0", Kind::Number, "type-I exponent constraint (nats)"}},
        {"beta", {"beta", Kind::Number, "training weight in (0,1]"}},
        {"alpha", {"alpha", Kind::Number, "training-to-test ratio"}},
        {"gamma", {"gamma", Kind::Number, "LRT threshold (nats)"}},
        {"epsilon", {"epsilon", Kind::Number, "Gutman test level"}},
        {"n", {"n", Kind::IntList, "test length(s), comma-separated"}},
        {"k", {"k", Kind::Int, "training length"}},
        {"trials", {"trials", Kind::Int, "Monte Carlo trials"}},
        {"seed", {"seed", Kind::UInt, "master seed (fallback: NP_UNIVERSAL_SEED)"}},
        {"workers", {"workers", Kind::Int, "worker threads"}},
        {"penalty", {"penalty", Kind::OnOff, "sequential threshold penalty on|off"}},
        {"rule", {"rule", Kind::Text, "rule name: lrt, glrt, interp, gutman, always0, always1"}},
        {"rules", {"rules", Kind::TextList, "rule names, comma-separated"}},
        {"betas", {"betas", Kind::NumberList, "increasing beta grid, comma-separated"}},
        {"grid", {"grid", Kind::Int, "direction count for the numeric critical ratio"}},
        {"budget", {"budget", Kind::Int, "sequential step budget (default 50 n)"}},
        {"stein", {"stein", Kind::Switch, "report Stein-regime exponents"}},
    };
    return t;
}

struct Subcommand {
    const char* name;
    const char* help;
    std::vector<std::string> keys;  // accepted config keys (and flags)
};

const std::vector<Subcommand>& subcommands() {
    static const std::vector<Subcommand> s = {
        {"exponents", "optimal, mismatched and Stein exponents", {"p0", "p1", "q1", "e0", "beta", "alpha", "stein"}},
        {"threshold", "classifier threshold gamma(E0,Q1)", {"p0", "q1", "p1", "e0", "beta"}},
        {"bounds", "bounds on the critical training ratio", {"p0", "p1", "e0", "beta", "grid"}},
        {"oracle", "exact error probabilities by type enumeration",
         {"p0", "p1", "n", "k", "rule", "e0", "beta", "gamma", "epsilon", "alpha"}},
        {"simulate-fixed", "fixed-length Monte Carlo experiment (CSV)",
         {"p0", "p1", "n", "alpha", "trials", "seed", "workers", "e0", "beta", "epsilon", "rules"}},
        {"simulate-seq", "sequential classifier Monte Carlo (CSV)",
         {"p0", "p1", "n", "alpha", "trials", "seed", "workers", "penalty", "budget"}},
        {"alpha-sweep", "lower bound on the critical ratio over a beta grid (CSV)", {"p0", "p1", "e0", "betas"}},
        {"figure", "reproduce a named figure: fig2, fig3, fig5, fig6 (CSV)", {"trials", "seed", "workers", "n", "beta"}},
    };
    return s;
}

// ---- flag text to JSON ----

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(tok);
    if (out.empty()) throw InvalidArgument("empty list");
    return out;
}

double to_number(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw InvalidArgument("not a number: '" + s + "'");
    }
    if (used != s.size()) throw InvalidArgument("not a number: '" + s + "'");
    return v;
}

long long to_int(const std::string& s) {
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &used);
    } catch (const std::exception&) {
        throw InvalidArgument("not an integer: '" + s + "'");
    }
    if (used != s.size()) throw InvalidArgument("not an integer: '" + s + "'");
    return v;
}

std::uint64_t to_uint(const std::string& s) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
        if (!s.empty() && s[0] == '-') throw InvalidArgument("");
        v = std::stoull(s, &used);
    } catch (const std::exception&) {
        throw InvalidArgument("not an unsigned integer: '" + s + "'");
    }
    if (used != s.size()) throw InvalidArgument("not an unsigned integer: '" + s + "'");
    return v;
}

json flag_value(const FlagDef& def, const std::string& text) {
    switch (def.kind) {
        case Kind::Dist:
        case Kind::NumberList: {
            json a = json::array();
            for (const auto& t : split(text)) a.push_back(to_number(t));
            return a;
        }
        case Kind::Number: return to_number(text);
        case Kind::Int: return to_int(text);
        case Kind::UInt: return to_uint(text);
        case Kind::IntList: {
            json a = json::array();
            for (const auto& t : split(text)) a.push_back(to_int(t));
            return a;
        }
        case Kind::OnOff:
            if (text == "on") return true;
            if (text == "off") return false;
            throw InvalidArgument("--penalty expects on or off");
        case Kind::Text: return text;
        case Kind::TextList: return split(text);
        case Kind::Switch: return true;
    }
    return nullptr;
}

// ---- typed access to the resolved configuration ----

class Config {
public:
    explicit Config(json j) : j_(std::move(j)) {}

    bool has(const std::string& k) const { return j_.contains(k); }
    const json& raw() const { return j_; }

    Distribution dist(const std::string& k) const {
        return Distribution(as<std::vector<double>>(k));
    }
    double number(const std::string& k) const { return as<double>(k); }
    double number(const std::string& k, double fallback) const { return has(k) ? number(k) : fallback; }
    long long integer(const std::string& k) const { return as<long long>(k); }
    long long integer(const std::string& k, long long fallback) const { return has(k) ? integer(k) : fallback; }
    bool flag(const std::string& k, bool fallback) const { return has(k) ? as<bool>(k) : fallback; }
    std::vector<std::int64_t> int_list(const std::string& k) const {
        if (has(k) && j_.at(k).is_number_integer()) return {j_.at(k).get<std::int64_t>()};
        return as<std::vector<std::int64_t>>(k);
    }
    std::uint64_t seed() const { return as<std::uint64_t>("seed"); }

    template <class T>
    T as(const std::string& k) const {
        if (!has(k)) throw InvalidArgument("missing required setting '" + k + "'");
        try {
            return j_.at(k).get<T>();
        } catch (const json::exception&) {
            throw InvalidArgument("setting '" + k + "' has the wrong type");
        }
    }

private:
    json j_;
};

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---- presets ----

Distribution example1_p0() { return Distribution({0.3, 0.3, 0.4}); }
Distribution example1_p1() { return Distribution({0.35, 0.35, 0.3}); }

std::vector<std::int64_t> fig2_grid() {
    std::vector<std::int64_t> g = {20, 40, 60, 80, 100};
    for (std::int64_t n = 200; n <= 2000; n += 100) g.push_back(n);
    return g;
}

std::vector<std::int64_t> fig3_grid() {
    auto g = fig2_grid();
    g.erase(std::remove_if(g.begin(), g.end(), [](std::int64_t n) { return n > 1500; }), g.end());
    return g;
}

std::vector<std::int64_t> fig5_grid() {
    std::vector<std::int64_t> g;
    for (std::int64_t n = 20; n <= 250; n += 10) g.push_back(n);
    return g;
}

std::vector<double> fig6_grid() {
    std::vector<double> g;
    for (int i = 1; i <= 100; ++i) g.push_back(i / 100.0);
    return g;
}

// ---- commands ----

std::string run_exponents(const Config& c) {
    const auto P0 = c.dist("p0"), P1 = c.dist("p1");
    json out;
    if (c.flag("stein", false)) {
        const auto s = stein_exponents(P0, P1, c.number("alpha"));
        out["E1_stein"] = s.E1_stein;
        out["E0_stein"] = s.E0_stein;
        return dump(out);
    }
    const double e0 = c.number("e0");
    const auto t = optimal_tradeoff(P0, P1, e0);
    out["E0"] = t.E0;
    out["E1"] = t.E1;
    out["lrt_gamma"] = t.gamma;
    out["multiplier"] = t.multiplier;
    if (c.has("q1")) out["mismatched"] = mismatched_exponent(P0, P1, c.dist("q1"), e0, c.number("beta", 1.0));
    return dump(out);
}

std::string run_threshold(const Config& c) {
    const auto P0 = c.dist("p0");
    const auto Q1 = c.has("q1") ? c.dist("q1") : c.dist("p1");
    const double e0 = c.number("e0"), beta = c.number("beta", 1.0);
    const auto tilt = solve_tilt_radius(P0, Q1, e0);
    json out;
    out["gamma"] = threshold_gamma(P0, Q1, e0, beta);
    out["multiplier"] = tilt.multiplier;
    out["projection"] = tilt.distribution.probs();
    return dump(out);
}

std::string run_bounds(const Config& c) {
    const auto P0 = c.dist("p0"), P1 = c.dist("p1");
    const double e0 = c.number("e0"), beta = c.number("beta", 1.0);
    const auto b = alpha_bounds(P0, P1, e0, beta);
    const auto up = alpha_upper_terms(P0, P1, e0);
    json out;
    out["lower"] = b.lower;
    out["upper"] = b.upper;
    out["lambda"] = up.lambda;
    out["kappa"] = up.kappa;
    if (b.lower_simplified) out["lower_simplified"] = *b.lower_simplified;
    if (P1.size() <= 4) out["alpha_star"] = alpha_star_numeric(P0, P1, e0, beta, static_cast<int>(c.integer("grid", 64)));
    return dump(out);
}

RuleParams oracle_params(const Config& c, const std::string& rule, std::int64_t n, std::int64_t k) {
    RuleParams p;
    auto copy = [&](const char* key) {
        if (c.has(key)) p[key] = c.number(key);
    };
    if (rule == "lrt") {
        copy("gamma");
        if (!c.has("gamma")) copy("e0");
    } else if (rule == "glrt") {
        copy("e0");
    } else if (rule == "interp") {
        copy("e0");
        copy("beta");
    } else if (rule == "gutman") {
        p["alpha"] = c.number("alpha", static_cast<double>(k) / static_cast<double>(n));
        copy("epsilon");
    }
    return p;
}

std::string run_oracle(const Config& c) {
    const auto P0 = c.dist("p0"), P1 = c.dist("p1");
    const auto ns = c.int_list("n");
    if (ns.size() != 1) throw InvalidArgument("oracle takes a single n");
    const std::int64_t n = ns.front(), k = c.integer("k", 1);
    const auto name = c.as<std::string>("rule");
    const auto rule = make_rule(name, oracle_params(c, name, n, k), P0, P1);
    const auto e = exact_error_probs(*rule, P0, P1, n, k);
    json out;
    out["rule"] = name;
    out["n"] = n;
    out["k"] = k;
    out["eps0"] = e.eps0;
    out["eps1"] = e.eps1;
    return dump(out);
}

std::vector<RuleSpec> rule_specs(const Config& c) {
    std::vector<RuleSpec> specs;
    const json rules = c.has("rules") ? c.raw().at("rules") : json::array({"lrt", "glrt", "interp"});
    if (!rules.is_array()) throw InvalidArgument("setting 'rules' must be an array");
    for (const auto& r : rules) {
        RuleSpec s;
        if (r.is_string()) {
            s.name = r.get<std::string>();
        } else if (r.is_object()) {
            for (const auto& [key, v] : r.items())
                if (key != "name" && key != "params") throw InvalidArgument("rule entry has unknown key '" + key + "'");
            if (!r.contains("name") || !r.at("name").is_string()) throw InvalidArgument("rule entry needs a name");
            s.name = r.at("name").get<std::string>();
            if (r.contains("params")) {
                if (!r.at("params").is_object()) throw InvalidArgument("rule params must be an object");
                for (const auto& [key, v] : r.at("params").items()) {
                    if (!v.is_number()) throw InvalidArgument("rule parameter '" + key + "' must be numeric");
                    s.params[key] = v.get<double>();
                }
            }
        } else {
            throw InvalidArgument("rule entries must be names or objects");
        }
        if (s.name == "interp" && c.has("beta")) s.params.try_emplace("beta", c.number("beta"));
        if (s.name == "gutman" && c.has("epsilon")) s.params.try_emplace("epsilon", c.number("epsilon"));
        specs.push_back(std::move(s));
    }
    return specs;
}

ExperimentConfig fixed_config(const Config& c) {
    ExperimentConfig cfg;
    cfg.P0 = c.dist("p0");
    cfg.P1 = c.dist("p1");
    cfg.n_grid = c.int_list("n");
    cfg.alpha = c.number("alpha");
    cfg.trials = c.integer("trials");
    cfg.e0 = c.number("e0");
    cfg.master_seed = c.seed();
    cfg.workers = static_cast<int>(c.integer("workers", 1));
    cfg.rules = rule_specs(c);
    return cfg;
}

std::string seq_csv(const Distribution& P0, const Distribution& P1, const std::vector<std::int64_t>& grid, double alpha,
                    std::int64_t trials, std::uint64_t seed, int workers, bool penalty, std::int64_t budget) {
    std::ostringstream os;
    os << "n,trials,eps0,eps1,se0,se1,exp0,exp1,censored0,censored1,undecided0,undecided1,mean_tau_over_n0,"
          "mean_tau_over_n1\n";
    for (auto n : grid) {
        SequentialConfig cfg;
        cfg.n = n;
        cfg.alpha = alpha;
        cfg.penalty_enabled = penalty;
        cfg.budget = budget;
        const auto r0 = seq_simulate(P0, 0, P0, P1, cfg, trials, seed, workers);
        const auto r1 = seq_simulate(P1, 1, P0, P1, cfg, trials, seed, workers);
        const double nn = static_cast<double>(n);
        os << n << ',' << trials << ',' << format_number(r0.error_rate) << ',' << format_number(r1.error_rate) << ','
           << format_number(r0.std_err) << ',' << format_number(r1.std_err) << ',' << format_number(r0.exponent) << ','
           << format_number(r1.exponent) << ',' << (r0.censored ? 1 : 0) << ',' << (r1.censored ? 1 : 0) << ','
           << r0.undecided << ',' << r1.undecided << ',' << format_number(r0.mean_tau / nn) << ','
           << format_number(r1.mean_tau / nn) << '\n';
    }
    return os.str();
}

std::string run_simulate_seq(const Config& c) {
    return seq_csv(c.dist("p0"), c.dist("p1"), c.int_list("n"), c.number("alpha"), c.integer("trials"), c.seed(),
                   static_cast<int>(c.integer("workers", 1)), c.flag("penalty", true), c.integer("budget", 0));
}

std::string sweep_csv(const Distribution& P0, const Distribution& P1, double e0, const std::vector<double>& betas) {
    std::ostringstream os;
    os << "beta,alpha_lower\n";
    for (const auto& [b, a] : run_alpha_sweep(P0, P1, e0, betas)) os << format_number(b) << ',' << format_number(a) << '\n';
    return os.str();
}

std::string run_alpha_sweep_cmd(const Config& c) {
    return sweep_csv(c.dist("p0"), c.dist("p1"), c.number("e0"),
                     c.has("betas") ? c.as<std::vector<double>>("betas") : fig6_grid());
}

std::string run_figure(const Config& c) {
    const auto name = c.as<std::string>("figure");
    const int workers = static_cast<int>(c.integer("workers", 1));
    if (name == "fig2" || name == "fig3") {
        ExperimentConfig cfg;
        cfg.P0 = example1_p0();
        cfg.P1 = example1_p1();
        cfg.n_grid = c.has("n") ? c.int_list("n") : (name == "fig2" ? fig2_grid() : fig3_grid());
        cfg.alpha = 2.0;
        cfg.e0 = 0.005;
        cfg.trials = c.integer("trials", 1'000'000);
        cfg.master_seed = c.seed();
        cfg.workers = workers;
        cfg.rules = {{"interp", {{"beta", c.number("beta", 1.0)}}}, {"lrt", {}}, {"glrt", {}}};
        return to_csv(run_fixed_experiment(cfg));
    }
    if (name == "fig5") {
        return seq_csv(Distribution::bernoulli(0.45), Distribution::bernoulli(0.55),
                       c.has("n") ? c.int_list("n") : fig5_grid(), 10.0, c.integer("trials", 100'000), c.seed(),
                       workers, false, 0);
    }
    if (name == "fig6") {
        return sweep_csv(Distribution::bernoulli(0.3), Distribution::bernoulli(0.4), 0.005, fig6_grid());
    }
    throw InvalidArgument("unknown figure '" + name + "' (expected fig2, fig3, fig5, fig6)");
}

bool takes_seed(const std::string& sub) {
    return sub == "simulate-fixed" || sub == "simulate-seq" || sub == "figure";
}

std::string execute(const std::string& sub, const Config& c) {
    if (sub == "exponents") return run_exponents(c);
    if (sub == "threshold") return run_threshold(c);
    if (sub == "bounds") return run_bounds(c);
    if (sub == "oracle") return run_oracle(c);
    if (sub == "simulate-fixed") return to_csv(run_fixed_experiment(fixed_config(c)));
    if (sub == "simulate-seq") return run_simulate_seq(c);
    if (sub == "alpha-sweep") return run_alpha_sweep_cmd(c);
    if (sub == "figure") return run_figure(c);
    throw InvalidArgument("unknown subcommand '" + sub + "'");
}

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open config '" + path + "'");
    try {
        json j = json::parse(in);
        if (!j.is_object()) throw InvalidArgument("config '" + path + "' must hold a JSON object");
        return j;
    } catch (const json::parse_error& e) {
        throw InvalidArgument("config '" + path + "' is not valid JSON: " + e.what());
    }
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Neyman-Pearson classification toolkit"};
    app.require_subcommand(1, 1);
    app.set_help_all_flag("--help-all", "show help for every subcommand");

    struct Bound {
        CLI::App* app;
        std::map<std::string, std::string> text;
        bool stein = false;
        std::string config, out, figure;
        bool print_config = false;
    };
    std::vector<Bound> bound(subcommands().size());
    for (std::size_t i = 0; i < subcommands().size(); ++i) {
        const auto& sc = subcommands()[i];
        auto& b = bound[i];
        b.app = app.add_subcommand(sc.name, sc.help);
        for (const auto& key : sc.keys) {
            const auto& def = flag_table().at(key);
            if (def.kind == Kind::Switch) b.app->add_flag("--" + key, b.stein, def.help);
            else b.app->add_option("--" + key, b.text[key], def.help);
        }
        if (std::string(sc.name) == "figure") b.app->add_option("name", b.figure, "fig2, fig3, fig5 or fig6")->required();
        b.app->add_option("--config", b.config, "JSON config; flags override its values");
        b.app->add_option("--out", b.out, "write results to this file instead of stdout");
        b.app->add_flag("--print-config", b.print_config, "print the resolved config as JSON and exit");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }

    std::size_t which = 0;
    while (!bound[which].app->parsed()) ++which;
    const auto& sc = subcommands()[which];
    const auto& b = bound[which];
    const std::string sub = sc.name;

    try {
        json cfg = b.config.empty() ? json::object() : load_config(b.config);
        // Flags override the file.
        for (const auto& key : sc.keys) {
            const auto& def = flag_table().at(key);
            if (b.app->count("--" + key) == 0) continue;
            cfg[key] = def.kind == Kind::Switch ? json(b.stein) : flag_value(def, b.text.at(key));
        }
        if (sub == "figure") cfg["figure"] = b.figure;
        for (const auto& [key, v] : cfg.items()) {
            const bool known = std::find(sc.keys.begin(), sc.keys.end(), key) != sc.keys.end() ||
                               (sub == "figure" && key == "figure");
            if (!known) throw InvalidArgument("unknown config key '" + key + "' for " + sub);
        }
        if (takes_seed(sub) && !cfg.contains("seed")) {
            const char* env = std::getenv("NP_UNIVERSAL_SEED");
            cfg["seed"] = env ? to_uint(env) : std::uint64_t{1};
        }

        const std::string result = b.print_config ? dump(cfg) : execute(sub, Config(cfg));
        if (b.out.empty()) {
            out << result;
        } else {
            std::ofstream f(b.out, std::ios::binary);
            if (!f) throw InvalidArgument("cannot write '" + b.out + "'");
            f << result;
        }
        return kExitOk;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}

}  // namespace npc::cli
