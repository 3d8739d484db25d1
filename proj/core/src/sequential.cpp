#include "npclass/sequential.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "npclass/special.hpp"
#include "parallel.hpp"

namespace npc {

RandomSource::RandomSource(const Distribution& p, RandomStream stream) : cdf_(cumulative(p)), stream_(stream) {}

std::uint32_t ReplaySource::next() {
    if (pos_ >= sample_.symbols.size()) throw DomainError("replay stream exhausted");
    return sample_.symbols[pos_++];
}

Sample read_sample_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open sample file '" + path + "'");
    Sample s;
    long long v = 0;
    while (in >> v) {
        if (v < 0) throw InvalidArgument("negative symbol in sample file '" + path + "'");
        s.symbols.push_back(static_cast<std::uint32_t>(v));
    }
    if (!in.eof()) throw InvalidArgument("malformed sample file '" + path + "'");
    return s;
}

void write_sample_file(const std::string& path, const Sample& sample) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot write sample file '" + path + "'");
    for (auto s : sample.symbols) out << s << '\n';
}

void SequentialConfig::validate() const {
    if (n < 1) throw InvalidArgument("sequential: n must be >= 1");
    if (!(alpha > 0.0)) throw InvalidArgument("sequential: alpha must be > 0");
    if (std::floor(alpha * static_cast<double>(n) + 1e-9) < 1.0)
        throw InvalidArgument("sequential: alpha * n must allow at least one training symbol");
    if (!delta_rule) throw InvalidArgument("sequential: delta rule missing");
    const double d = delta_rule(n);
    if (!(d > 0.0 && d < 1.0)) throw InvalidArgument("sequential: delta_n must lie in (0,1)");
    if (budget != 0 && budget < n) throw InvalidArgument("sequential: budget must be >= n");
}

double SequentialConfig::penalty(std::size_t alphabet_size) const {
    if (!penalty_enabled) return 0.0;
    return penalty_coefficient >= 0.0 ? penalty_coefficient : 4.0 * static_cast<double>(alphabet_size) + 4.0;
}

SequentialOutcome sprt_run(SymbolSource& stream0, const Distribution& P0, const Distribution& P1, double gamma0,
                           double gamma1, std::int64_t budget, std::int64_t first_check) {
    if (P0.size() != P1.size()) throw InvalidArgument("sprt: dimension mismatch");
    if (!(gamma0 > 0.0 && gamma1 > 0.0)) throw InvalidArgument("sprt: thresholds must be > 0");
    if (budget < 1 || first_check < 1) throw InvalidArgument("sprt: budget and first_check must be >= 1");
    std::vector<double> llr(P0.size());
    for (std::size_t i = 0; i < llr.size(); ++i) llr[i] = std::log(P0[i] / P1[i]);
    double s = 0.0;
    for (std::int64_t t = 1; t <= budget; ++t) {
        const auto x = stream0.next();
        if (x >= llr.size()) throw InvalidArgument("sprt: symbol outside the alphabet");
        s += llr[x];
        if (t < first_check) continue;
        if (s >= gamma0) return {0, t, s};
        if (s <= -gamma1) return {1, t, s};
    }
    return {std::nullopt, budget, s};
}

namespace {

std::vector<double> logs(const Distribution& p) {
    std::vector<double> out(p.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::log(p[i]);
    return out;
}

// Training state at a check: ln T' and the two divergences entering the thresholds.
struct TrainingView {
    std::vector<double> lt;
    double d_p0_t = 0.0;    // D(P0||T')
    double d_hat_p0 = 0.0;  // D(T_X||P0)
};

SequentialThresholds thresholds(const TrainingView& view, double n, double pen, std::int64_t t) {
    const double growth = pen * std::log(static_cast<double>(t) + 1.0);
    return {n * view.d_p0_t + growth, n * view.d_hat_p0 + growth};
}

template <class Refresh>
SequentialOutcome run_core(SymbolSource& test, const Distribution& P0, const SequentialConfig& cfg, Refresh&& refresh) {
    cfg.validate();
    const std::size_t k = P0.size();
    const auto lp0 = logs(P0);
    const double pen = cfg.penalty(k);
    const double n = static_cast<double>(cfg.n);
    const std::int64_t budget = cfg.max_steps();
    std::vector<std::int64_t> counts(k, 0);
    TrainingView view;
    view.lt.resize(k);
    double s = 0.0;
    for (std::int64_t t = 1; t <= budget; ++t) {
        const auto x = test.next();
        if (x >= k) throw InvalidArgument("sequential: test symbol outside the alphabet");
        ++counts[x];
        const bool check = t >= cfg.n;
        refresh(t, check, view);
        if (!check) continue;
        s = 0.0;
        for (std::size_t a = 0; a < k; ++a) s += static_cast<double>(counts[a]) * (lp0[a] - view.lt[a]);
        const auto g = thresholds(view, n, pen, t);
        if (s >= g.gamma0) return {0, t, s};
        if (s <= -g.gamma1) return {1, t, s};
    }
    return {std::nullopt, budget, s};
}

void fill_view(const std::vector<double>& lp0, const Distribution& P0, std::span<const double> hat, double delta,
               TrainingView& view) {
    const std::size_t k = lp0.size();
    const double floor = delta / static_cast<double>(k);
    view.d_p0_t = 0.0;
    view.d_hat_p0 = 0.0;
    for (std::size_t a = 0; a < k; ++a) {
        view.lt[a] = std::log((1.0 - delta) * hat[a] + floor);
        view.d_p0_t += P0[a] * (lp0[a] - view.lt[a]);
        if (hat[a] > 0.0) view.d_hat_p0 += hat[a] * (std::log(hat[a]) - lp0[a]);
    }
}

}  // namespace

SequentialThresholds seq_thresholds(const Distribution& P0, std::span<const double> training,
                                    const SequentialConfig& cfg, std::int64_t t) {
    cfg.validate();
    if (training.size() != P0.size()) throw InvalidArgument("sequential: dimension mismatch");
    if (t < 1) throw InvalidArgument("sequential: t must be >= 1");
    TrainingView view;
    view.lt.resize(P0.size());
    fill_view(logs(P0), P0, training, cfg.delta_rule(cfg.n), view);
    return thresholds(view, static_cast<double>(cfg.n), cfg.penalty(P0.size()), t);
}

SequentialOutcome seq_classifier_run(SymbolSource& test_stream, SymbolSource& train_stream, const Distribution& P0,
                                     const SequentialConfig& cfg) {
    const std::size_t k = P0.size();
    const auto lp0 = logs(P0);
    const double delta = cfg.delta_rule(cfg.n);
    std::vector<std::int64_t> tc(k, 0);
    std::vector<double> hat(k);
    std::int64_t consumed = 0;
    auto refresh = [&](std::int64_t t, bool check, TrainingView& view) {
        const auto target = static_cast<std::int64_t>(std::floor(cfg.alpha * static_cast<double>(t) + 1e-9));
        for (; consumed < target; ++consumed) {
            const auto y = train_stream.next();
            if (y >= k) throw InvalidArgument("sequential: training symbol outside the alphabet");
            ++tc[y];
        }
        if (!check) return;
        for (std::size_t a = 0; a < k; ++a) hat[a] = static_cast<double>(tc[a]) / static_cast<double>(consumed);
        fill_view(lp0, P0, hat, delta, view);
    };
    return run_core(test_stream, P0, cfg, refresh);
}

SequentialOutcome seq_classifier_run_frozen(SymbolSource& test_stream, const Distribution& training_type,
                                            const Distribution& P0, const SequentialConfig& cfg) {
    if (training_type.size() != P0.size()) throw InvalidArgument("sequential: dimension mismatch");
    const auto lp0 = logs(P0);
    TrainingView frozen;
    frozen.lt.resize(P0.size());
    fill_view(lp0, P0, training_type.span(), cfg.delta_rule(cfg.n), frozen);
    auto refresh = [&](std::int64_t, bool, TrainingView& view) { view = frozen; };
    return run_core(test_stream, P0, cfg, refresh);
}

SequentialResult seq_simulate(const Distribution& P_truth, int hypothesis_label, const Distribution& P0,
                              const Distribution& P1_for_training, const SequentialConfig& cfg, std::int64_t trials,
                              std::uint64_t seed, int workers) {
    if (trials < 1) throw InvalidArgument("seq_simulate: trials must be >= 1");
    if (hypothesis_label != 0 && hypothesis_label != 1) throw InvalidArgument("seq_simulate: label must be 0 or 1");
    cfg.validate();
    constexpr std::uint64_t kDomain = 0x5e9;
    std::vector<std::int64_t> tau(static_cast<std::size_t>(trials));
    std::vector<std::int64_t> errors(static_cast<std::size_t>(std::max(workers, 1)), 0), undecided(errors.size(), 0);
    detail::parallel_blocks(trials, workers, [&](std::int64_t begin, std::int64_t end, int w) {
        const auto n = static_cast<std::uint64_t>(cfg.n);
        const auto h = static_cast<std::uint64_t>(hypothesis_label);
        for (std::int64_t i = begin; i < end; ++i) {
            const auto id = static_cast<std::uint64_t>(i);
            RandomSource test(P_truth, RandomStream::derive(seed, {kDomain, n, h, id, 0}));
            RandomSource train(P1_for_training, RandomStream::derive(seed, {kDomain, n, h, id, 1}));
            const auto out = seq_classifier_run(test, train, P0, cfg);
            tau[static_cast<std::size_t>(i)] = out.tau;
            if (out.exhausted()) ++undecided[static_cast<std::size_t>(w)];
            else if (*out.decision != hypothesis_label) ++errors[static_cast<std::size_t>(w)];
        }
    });
    SequentialResult r;
    r.n = cfg.n;
    r.hypothesis = hypothesis_label;
    r.trials = trials;
    for (auto e : errors) r.errors += e;
    for (auto u : undecided) r.undecided += u;
    const double T = static_cast<double>(trials);
    r.error_rate = static_cast<double>(r.errors) / T;
    r.std_err = std::sqrt(r.error_rate * (1.0 - r.error_rate) / T);
    r.censored = r.errors == 0;
    const double p = r.censored ? clopper_pearson_upper_zero(trials) : r.error_rate;
    r.exponent = -std::log(p) / static_cast<double>(cfg.n);
    long double sum = 0.0L;
    for (auto t : tau) sum += static_cast<long double>(t);
    r.mean_tau = static_cast<double>(sum / static_cast<long double>(trials));
    std::sort(tau.begin(), tau.end());
    auto q = [&](double f) {
        const auto idx = static_cast<std::size_t>(std::floor(f * static_cast<double>(trials - 1)));
        return static_cast<double>(tau[idx]);
    };
    r.tau_q10 = q(0.1);
    r.tau_q50 = q(0.5);
    r.tau_q90 = q(0.9);
    return r;
}

}  // namespace npc
