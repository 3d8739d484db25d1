#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "npclass/classifiers.hpp"
#include "npclass/distributions.hpp"

namespace npc {

// Pull-based symbol stream.
class SymbolSource {
public:
    virtual ~SymbolSource() = default;
    virtual std::uint32_t next() = 0;
};

// i.i.d. draws by inverse CDF.
class RandomSource final : public SymbolSource {
public:
    RandomSource(const Distribution& p, RandomStream stream);
    std::uint32_t next() override { return draw_symbol(cdf_, stream_); }

private:
    std::vector<double> cdf_;
    RandomStream stream_;
};

// Replays a recorded sample; running past its end is an error.
class ReplaySource final : public SymbolSource {
public:
    explicit ReplaySource(Sample sample) : sample_(std::move(sample)) {}
    std::uint32_t next() override;

private:
    Sample sample_;
    std::size_t pos_ = 0;
};

// Newline-delimited integer files.
Sample read_sample_file(const std::string& path);
void write_sample_file(const std::string& path, const Sample& sample);

struct SequentialConfig {
    std::int64_t n = 1;                 // design block length
    double alpha = 1.0;                 // training symbols per test symbol
    double penalty_coefficient = -1.0;  // negative selects 4|X| + 4
    bool penalty_enabled = true;
    std::function<double(std::int64_t)> delta_rule = default_delta;
    std::int64_t budget = 0;            // maximum t; 0 selects 50 n

    void validate() const;
    double penalty(std::size_t alphabet_size) const;
    std::int64_t max_steps() const { return budget > 0 ? budget : 50 * n; }
};

struct SequentialOutcome {
    std::optional<int> decision;  // empty when the budget ran out
    std::int64_t tau;             // samples consumed when stopping (or the budget)
    double final_statistic;

    bool exhausted() const { return !decision.has_value(); }
};

struct SequentialThresholds {
    double gamma0;  // decide 0 once S_t >= gamma0
    double gamma1;  // decide 1 once S_t <= -gamma1
};

// Thresholds at step t for a training type with frequencies `training` (perturbed internally by delta_n).
SequentialThresholds seq_thresholds(const Distribution& P0, std::span<const double> training,
                                    const SequentialConfig& cfg, std::int64_t t);

// Wald SPRT on S_t = sum ln(P0(x_i)/P1(x_i)). Checks start at t = first_check.
SequentialOutcome sprt_run(SymbolSource& stream0, const Distribution& P0, const Distribution& P1, double gamma0,
                           double gamma1, std::int64_t budget = 1'000'000'000, std::int64_t first_check = 1);

// Sequential plug-in classifier fed by a training stream on the floor(alpha t) schedule.
SequentialOutcome seq_classifier_run(SymbolSource& test_stream, SymbolSource& train_stream, const Distribution& P0,
                                     const SequentialConfig& cfg);

// Same rule with the training type frozen at a fixed distribution.
SequentialOutcome seq_classifier_run_frozen(SymbolSource& test_stream, const Distribution& training_type,
                                            const Distribution& P0, const SequentialConfig& cfg);

struct SequentialResult {
    std::int64_t n = 0;
    int hypothesis = 0;
    std::int64_t trials = 0;
    std::int64_t errors = 0;
    std::int64_t undecided = 0;
    double error_rate = 0.0;
    double std_err = 0.0;
    double exponent = 0.0;          // -ln(error_rate)/n, or a lower bound when censored
    bool censored = false;          // zero errors; exponent from the Clopper-Pearson upper limit
    double mean_tau = 0.0;
    double tau_q10 = 0.0, tau_q50 = 0.0, tau_q90 = 0.0;
};

SequentialResult seq_simulate(const Distribution& P_truth, int hypothesis_label, const Distribution& P0,
                              const Distribution& P1_for_training, const SequentialConfig& cfg, std::int64_t trials,
                              std::uint64_t seed, int workers = 1);

}  // namespace npc
