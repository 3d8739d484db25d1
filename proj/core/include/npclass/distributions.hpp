#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "npclass/errors.hpp"
#include "npclass/random.hpp"

namespace npc {

// Strictly positive probability vector over an alphabet of size >= 2.
// Inputs whose sum is within 1e-9 of one are renormalized.
class Distribution {
public:
    explicit Distribution(std::vector<double> probs);

    static Distribution uniform(std::size_t alphabet_size);
    static Distribution bernoulli(double p1);  // [1 - p1, p1]

    const std::vector<double>& probs() const noexcept { return probs_; }
    std::span<const double> span() const noexcept { return probs_; }
    std::size_t size() const noexcept { return probs_.size(); }
    double operator[](std::size_t i) const { return probs_[i]; }
    double min_prob() const noexcept;

    friend bool operator==(const Distribution&, const Distribution&) = default;

private:
    std::vector<double> probs_;
};

// Symbol counts of a finite sequence.
class EmpiricalType {
public:
    EmpiricalType(std::vector<std::int64_t> counts);

    const std::vector<std::int64_t>& counts() const noexcept { return counts_; }
    std::int64_t n() const noexcept { return n_; }
    std::size_t alphabet_size() const noexcept { return counts_.size(); }
    std::vector<double> frequencies() const;

    friend bool operator==(const EmpiricalType&, const EmpiricalType&) = default;

private:
    std::vector<std::int64_t> counts_;
    std::int64_t n_ = 0;
};

struct Sample {
    std::vector<std::uint32_t> symbols;
};

// D(P||Q) in nats. P may contain zeros; any P(x) > 0 with Q(x) = 0 is an error.
double kl_divergence(std::span<const double> p, std::span<const double> q);
inline double kl_divergence(const Distribution& p, const Distribution& q) { return kl_divergence(p.span(), q.span()); }

// (1/(rho-1)) ln sum P^rho Q^(1-rho), rho in (0,1) or (1,inf).
double renyi_divergence(double rho, std::span<const double> p, std::span<const double> q);
inline double renyi_divergence(double rho, const Distribution& p, const Distribution& q) {
    return renyi_divergence(rho, p.span(), q.span());
}

// D(Q||M) + alpha D(P||M) with M = (Q + alpha P)/(1 + alpha).
double gjs_divergence(double alpha, std::span<const double> q, std::span<const double> p);

// T'(a) = (1 - delta) T(a)/n + delta/|X|.
Distribution perturb_type(const EmpiricalType& t, double delta);

// Normalized P0^s P1^(1-s).
Distribution tilted_geometric(const Distribution& p0, const Distribution& p1, double s);

EmpiricalType empirical_type(const Sample& x, std::size_t alphabet_size);

// n draws by inverse CDF.
Sample sample_iid(const Distribution& p, std::int64_t n, RandomStream& stream);

// Inverse-CDF draw of a single symbol from a precomputed cumulative vector.
std::uint32_t draw_symbol(std::span<const double> cdf, RandomStream& stream);
std::vector<double> cumulative(const Distribution& p);

// Multinomial type of n i.i.d. draws, sampled via sequential conditional
// binomials. Same law as empirical_type(sample_iid(p, n)).
EmpiricalType sample_type(const Distribution& p, std::int64_t n, RandomStream& stream);

// Distribution parsed from "0.3,0.7".
Distribution parse_distribution(const std::string& text);

}  // namespace npc
