#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "npclass/distributions.hpp"

namespace npc {

// delta_n = n^-2, capped at 1/2 so that n = 1 stays inside (0,1).
double default_delta(std::int64_t n);

struct FixedClassifierConfig {
    double beta = 1.0;
    double E0 = 0.0;
    std::function<double(std::int64_t)> delta_rule = default_delta;

    void validate() const;
};

struct Decision {
    int hypothesis;
    double statistic;
    double threshold;
};

struct ErrorPair {
    double eps0;
    double eps1;
};

// 1 iff D(T||P0) - D(T||P1) >= gamma.
Decision lrt_decide(const EmpiricalType& tx, const Distribution& P0, const Distribution& P1, double gamma);
// 1 iff D(T||P0) > E0.
Decision glrt_decide(const EmpiricalType& tx, const Distribution& P0, double E0);
// 1 iff beta D(T||T') - D(T||P0) <= gamma(E0, T'); decides 0 when the training type lies in the E0 ball.
Decision interp_decide(const EmpiricalType& tx, const EmpiricalType& tX, const Distribution& P0,
                       const FixedClassifierConfig& cfg);
// 1 iff GJS_alpha(Tx||TX) <= G^-1_{|X|-1}(eps) / (2n).
Decision gutman_decide(const EmpiricalType& tx, const EmpiricalType& tX, double alpha, double epsilon);

// A decision rule that depends on samples only through their types.
class DecisionRule {
public:
    // Rule state after seeing the training type; reused for every test type.
    class Bound {
    public:
        virtual ~Bound() = default;
        virtual Decision decide(const EmpiricalType& tx) const = 0;
    };

    virtual ~DecisionRule() = default;
    virtual std::string_view name() const = 0;
    virtual bool uses_training() const { return true; }
    // n is the test length the bound rule will be applied to.
    virtual std::unique_ptr<Bound> bind(const EmpiricalType& training, std::int64_t n) const = 0;
};

using RuleParams = std::map<std::string, double>;

// Rules by name: "lrt" {gamma | e0}, "glrt" {e0}, "interp" {e0, beta, delta_power},
// "gutman" {alpha, epsilon}, "always0", "always1". Unknown names or keys throw InvalidArgument.
std::unique_ptr<DecisionRule> make_rule(const std::string& name, const RuleParams& params, const Distribution& P0,
                                        const Distribution& P1);

// All compositions of n into k non-negative parts, colexicographic order.
std::vector<std::vector<std::int64_t>> compositions(std::int64_t n, std::size_t k);
double composition_count(std::int64_t n, std::size_t k);

// Exact error probabilities by enumeration of type classes.
ErrorPair exact_error_probs(const DecisionRule& rule, const Distribution& P0, const Distribution& P1, std::int64_t n,
                            std::int64_t k);

}  // namespace npc
