#include "npclass/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "npclass/exponents.hpp"
#include "npclass/special.hpp"

namespace npc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> logs(const Distribution& p) {
    std::vector<double> out(p.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::log(p[i]);
    return out;
}

void check_alphabet(const EmpiricalType& t, std::size_t k) {
    if (t.alphabet_size() != k) throw InvalidArgument("type alphabet does not match the distribution");
}

// sum_a T(a) (ln T(a) - logq(a)), skipping empty cells.
double kl_from_counts(const EmpiricalType& t, std::span<const double> logq) {
    const double n = static_cast<double>(t.n());
    double d = 0.0;
    for (std::size_t i = 0; i < logq.size(); ++i) {
        const auto c = t.counts()[i];
        if (c == 0) continue;
        const double f = static_cast<double>(c) / n;
        d += f * (std::log(f) - logq[i]);
    }
    return d;
}

class LrtRule final : public DecisionRule {
public:
    LrtRule(const Distribution& P0, const Distribution& P1, double gamma) : gamma_(gamma) {
        if (P0.size() != P1.size()) throw InvalidArgument("lrt: dimension mismatch");
        for (std::size_t i = 0; i < P0.size(); ++i) w_.push_back(std::log(P1[i] / P0[i]));
    }
    std::string_view name() const override { return "lrt"; }
    bool uses_training() const override { return false; }

    Decision decide(const EmpiricalType& tx) const {
        check_alphabet(tx, w_.size());
        double s = 0.0;
        for (std::size_t i = 0; i < w_.size(); ++i) s += static_cast<double>(tx.counts()[i]) * w_[i];
        s /= static_cast<double>(tx.n());
        return {s >= gamma_ ? 1 : 0, s, gamma_};
    }

    std::unique_ptr<Bound> bind(const EmpiricalType&, std::int64_t) const override {
        struct B final : Bound {
            const LrtRule* r;
            explicit B(const LrtRule* rule) : r(rule) {}
            Decision decide(const EmpiricalType& tx) const override { return r->decide(tx); }
        };
        return std::make_unique<B>(this);
    }

private:
    double gamma_;
    std::vector<double> w_;
};

class GlrtRule final : public DecisionRule {
public:
    GlrtRule(const Distribution& P0, double E0) : lp0_(logs(P0)), e0_(E0) {}
    std::string_view name() const override { return "glrt"; }
    bool uses_training() const override { return false; }

    Decision decide(const EmpiricalType& tx) const {
        check_alphabet(tx, lp0_.size());
        const double s = kl_from_counts(tx, lp0_);
        return {s > e0_ ? 1 : 0, s, e0_};
    }

    std::unique_ptr<Bound> bind(const EmpiricalType&, std::int64_t) const override {
        struct B final : Bound {
            const GlrtRule* r;
            explicit B(const GlrtRule* rule) : r(rule) {}
            Decision decide(const EmpiricalType& tx) const override { return r->decide(tx); }
        };
        return std::make_unique<B>(this);
    }

private:
    std::vector<double> lp0_;
    double e0_;
};

class InterpRule final : public DecisionRule {
public:
    InterpRule(const Distribution& P0, FixedClassifierConfig cfg) : lp0_(logs(P0)), cfg_(std::move(cfg)) {
        cfg_.validate();
    }
    std::string_view name() const override { return "interp"; }

    struct State final : Bound {
        const InterpRule* r;
        std::vector<double> lt;  // ln T'
        double gamma;            // -inf encodes the in-ball fallback
        Decision decide(const EmpiricalType& tx) const override {
            check_alphabet(tx, lt.size());
            const double s = r->cfg_.beta * kl_from_counts(tx, lt) - kl_from_counts(tx, r->lp0_);
            if (gamma == -kInf) return {0, s, gamma};
            return {s <= gamma ? 1 : 0, s, gamma};
        }
    };

    std::unique_ptr<Bound> bind(const EmpiricalType& training, std::int64_t n) const override {
        check_alphabet(training, lp0_.size());
        const std::size_t k = lp0_.size();
        const double delta = cfg_.delta_rule(n);
        if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("interp: delta_n must lie in (0,1)");
        auto st = std::make_unique<State>();
        st->r = this;
        st->lt.resize(k);
        const double m = static_cast<double>(training.n());
        double d_t_p0 = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const double t = (1.0 - delta) * static_cast<double>(training.counts()[i]) / m + delta / static_cast<double>(k);
            st->lt[i] = std::log(t);
            d_t_p0 += t * (st->lt[i] - lp0_[i]);
        }
        if (cfg_.E0 >= d_t_p0) {
            st->gamma = -kInf;
        } else {
            st->gamma = cfg_.beta * detail::radius_tilt(lp0_, st->lt, cfg_.E0).value - cfg_.E0;
        }
        return st;
    }

private:
    std::vector<double> lp0_;
    FixedClassifierConfig cfg_;
};

class GutmanRule final : public DecisionRule {
public:
    GutmanRule(std::size_t alphabet, double alpha, double epsilon) : alpha_(alpha) {
        if (!(alpha > 0.0)) throw InvalidArgument("gutman: alpha must be > 0");
        if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidArgument("gutman: epsilon must lie in (0,1)");
        quantile_ = chi2_upper_quantile(static_cast<int>(alphabet) - 1, epsilon);
    }
    std::string_view name() const override { return "gutman"; }

    Decision decide(const EmpiricalType& tx, const std::vector<double>& train) const {
        const auto f = tx.frequencies();
        const double s = gjs_divergence(alpha_, f, train);
        const double thr = quantile_ / (2.0 * static_cast<double>(tx.n()));
        return {s <= thr ? 1 : 0, s, thr};
    }

    std::unique_ptr<Bound> bind(const EmpiricalType& training, std::int64_t) const override {
        struct B final : Bound {
            const GutmanRule* r;
            std::vector<double> train;
            Decision decide(const EmpiricalType& tx) const override { return r->decide(tx, train); }
        };
        auto b = std::make_unique<B>();
        b->r = this;
        b->train = training.frequencies();
        return b;
    }

private:
    double alpha_;
    double quantile_;
};

class ConstantRule final : public DecisionRule {
public:
    explicit ConstantRule(int h) : h_(h) {}
    std::string_view name() const override { return h_ ? "always1" : "always0"; }
    bool uses_training() const override { return false; }
    std::unique_ptr<Bound> bind(const EmpiricalType&, std::int64_t) const override {
        struct B final : Bound {
            int h;
            explicit B(int v) : h(v) {}
            Decision decide(const EmpiricalType&) const override { return {h, 0.0, 0.0}; }
        };
        return std::make_unique<B>(h_);
    }

private:
    int h_;
};

double param(const RuleParams& p, const std::string& key, double fallback) {
    auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

double required(const RuleParams& p, const std::string& rule, const std::string& key) {
    auto it = p.find(key);
    if (it == p.end()) throw InvalidArgument("rule '" + rule + "' requires parameter '" + key + "'");
    return it->second;
}

void allow_only(const RuleParams& p, const std::string& rule, std::initializer_list<const char*> keys) {
    for (const auto& [k, v] : p) {
        if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; }))
            throw InvalidArgument("rule '" + rule + "' has unknown parameter '" + k + "'");
    }
}

}  // namespace

double default_delta(std::int64_t n) {
    const double nn = static_cast<double>(n);
    return std::min(1.0 / (nn * nn), 0.5);
}

void FixedClassifierConfig::validate() const {
    if (!(beta > 0.0 && beta <= 1.0)) throw InvalidArgument("beta must lie in (0,1]");
    if (!(E0 > 0.0)) throw InvalidArgument("E0 must be > 0");
    if (!delta_rule) throw InvalidArgument("delta rule missing");
    const double d = delta_rule(1000);
    if (!(d > 0.0 && d <= 1e-4)) throw InvalidArgument("delta rule must satisfy 0 < delta_1000 <= 1e-4");
}

Decision lrt_decide(const EmpiricalType& tx, const Distribution& P0, const Distribution& P1, double gamma) {
    return LrtRule(P0, P1, gamma).decide(tx);
}

Decision glrt_decide(const EmpiricalType& tx, const Distribution& P0, double E0) { return GlrtRule(P0, E0).decide(tx); }

Decision interp_decide(const EmpiricalType& tx, const EmpiricalType& tX, const Distribution& P0,
                       const FixedClassifierConfig& cfg) {
    if (tx.n() < 1 || tX.n() < 1) throw InvalidArgument("interp: empty sample");
    return InterpRule(P0, cfg).bind(tX, tx.n())->decide(tx);
}

Decision gutman_decide(const EmpiricalType& tx, const EmpiricalType& tX, double alpha, double epsilon) {
    if (tx.alphabet_size() != tX.alphabet_size()) throw InvalidArgument("gutman: alphabet mismatch");
    const double expected = alpha * static_cast<double>(tx.n());
    if (std::abs(static_cast<double>(tX.n()) - expected) > 1.0)
        throw InvalidArgument("gutman: training length must equal alpha * test length");
    return GutmanRule(tx.alphabet_size(), alpha, epsilon).bind(tX, tx.n())->decide(tx);
}

std::unique_ptr<DecisionRule> make_rule(const std::string& name, const RuleParams& params, const Distribution& P0,
                                        const Distribution& P1) {
    if (name == "lrt") {
        allow_only(params, name, {"gamma", "e0"});
        if (params.count("gamma") && params.count("e0")) throw InvalidArgument("rule 'lrt' takes gamma or e0, not both");
        const double gamma = params.count("gamma") ? params.at("gamma")
                                                   : optimal_tradeoff(P0, P1, required(params, name, "e0")).gamma;
        return std::make_unique<LrtRule>(P0, P1, gamma);
    }
    if (name == "glrt") {
        allow_only(params, name, {"e0"});
        return std::make_unique<GlrtRule>(P0, required(params, name, "e0"));
    }
    if (name == "interp") {
        allow_only(params, name, {"e0", "beta", "delta_power"});
        FixedClassifierConfig cfg;
        cfg.E0 = required(params, name, "e0");
        cfg.beta = param(params, "beta", 1.0);
        const double power = param(params, "delta_power", 2.0);
        if (!(power > 1.0)) throw InvalidArgument("interp: delta_power must be > 1 (delta_n = o(1/n))");
        if (power != 2.0) {
            cfg.delta_rule = [power](std::int64_t n) {
                return std::min(std::pow(static_cast<double>(n), -power), 0.5);
            };
        }
        return std::make_unique<InterpRule>(P0, std::move(cfg));
    }
    if (name == "gutman") {
        allow_only(params, name, {"alpha", "epsilon"});
        return std::make_unique<GutmanRule>(P0.size(), required(params, name, "alpha"),
                                            required(params, name, "epsilon"));
    }
    if (name == "always0" || name == "always1") {
        allow_only(params, name, {});
        return std::make_unique<ConstantRule>(name == "always1" ? 1 : 0);
    }
    throw InvalidArgument("unknown rule '" + name + "'");
}

std::vector<std::vector<std::int64_t>> compositions(std::int64_t n, std::size_t k) {
    if (k == 0) throw InvalidArgument("compositions: need at least one part");
    if (k == 1) return {{n}};
    std::vector<std::vector<std::int64_t>> out;
    for (std::int64_t last = 0; last <= n; ++last) {
        for (auto& head : compositions(n - last, k - 1)) {
            head.push_back(last);
            out.push_back(std::move(head));
        }
    }
    return out;
}

double composition_count(std::int64_t n, std::size_t k) {
    // C(n + k - 1, k - 1) in floating point; exact for the ranges used here.
    double c = 1.0;
    for (std::size_t i = 1; i < k; ++i) c = c * static_cast<double>(n + static_cast<std::int64_t>(i)) / static_cast<double>(i);
    return std::round(c);
}

namespace {

struct TypeTable {
    std::vector<EmpiricalType> types;
    std::vector<double> prob0, prob1;  // type-class probabilities
};

TypeTable type_table(std::int64_t n, const Distribution& P0, const Distribution& P1) {
    TypeTable t;
    const auto lp0 = logs(P0), lp1 = logs(P1);
    for (auto& c : compositions(n, P0.size())) {
        const double lm = log_multinomial(c);
        double a = lm, b = lm;
        for (std::size_t i = 0; i < c.size(); ++i) {
            a += static_cast<double>(c[i]) * lp0[i];
            b += static_cast<double>(c[i]) * lp1[i];
        }
        t.prob0.push_back(std::exp(a));
        t.prob1.push_back(std::exp(b));
        t.types.emplace_back(std::move(c));
    }
    return t;
}

// Sum in descending order of magnitude.
double ordered_sum(std::vector<double>& terms) {
    std::sort(terms.begin(), terms.end(), [](double a, double b) { return std::abs(a) > std::abs(b); });
    long double s = 0.0L;
    for (double x : terms) s += x;
    return static_cast<double>(s);
}

}  // namespace

ErrorPair exact_error_probs(const DecisionRule& rule, const Distribution& P0, const Distribution& P1, std::int64_t n,
                            std::int64_t k) {
    if (P0.size() != P1.size()) throw InvalidArgument("exact_error_probs: dimension mismatch");
    if (n < 1 || (rule.uses_training() && k < 1)) throw InvalidArgument("exact_error_probs: n and k must be >= 1");
    const double count =
        composition_count(n, P0.size()) * (rule.uses_training() ? composition_count(k, P0.size()) : 1.0);
    if (count > 1e7) {
        throw DomainError("exact_error_probs: " + std::to_string(static_cast<long long>(count)) +
                          " compositions exceed the 1e7 budget");
    }
    const TypeTable test = type_table(n, P0, P1);
    TypeTable train;
    if (rule.uses_training()) {
        train = type_table(k, P0, P1);
    } else {
        // Any single training type; the rule ignores it.
        std::vector<std::int64_t> c(P0.size(), 0);
        c[0] = std::max<std::int64_t>(k, 1);
        train.types.emplace_back(std::move(c));
        train.prob1.push_back(1.0);
    }
    std::vector<double> outer0, outer1, inner0, inner1;
    for (std::size_t j = 0; j < train.types.size(); ++j) {
        const auto bound = rule.bind(train.types[j], n);
        inner0.clear();
        inner1.clear();
        for (std::size_t i = 0; i < test.types.size(); ++i) {
            if (bound->decide(test.types[i]).hypothesis == 1) inner0.push_back(test.prob0[i]);
            else inner1.push_back(test.prob1[i]);
        }
        outer0.push_back(train.prob1[j] * ordered_sum(inner0));
        outer1.push_back(train.prob1[j] * ordered_sum(inner1));
    }
    return {std::clamp(ordered_sum(outer0), 0.0, 1.0), std::clamp(ordered_sum(outer1), 0.0, 1.0)};
}

}  // namespace npc
