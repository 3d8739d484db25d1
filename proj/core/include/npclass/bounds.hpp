#pragma once

#include <optional>
#include <vector>

#include "npclass/distributions.hpp"

namespace npc {

// Dense symmetric matrix, row-major.
class SymmetricMatrix {
public:
    SymmetricMatrix(std::size_t dim, std::vector<double> entries);
    static SymmetricMatrix zeros(std::size_t dim);

    std::size_t dim() const noexcept { return dim_; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * dim_ + j]; }
    double& at(std::size_t i, std::size_t j) { return a_[i * dim_ + j]; }
    const std::vector<double>& entries() const noexcept { return a_; }

    std::vector<double> apply(const std::vector<double>& x) const;

private:
    std::size_t dim_;
    std::vector<double> a_;
};

// All eigenvalues (ascending) by cyclic Jacobi rotations.
std::vector<double> eigenvalues_symmetric(const SymmetricMatrix& m);
double min_eigen_symmetric(const SymmetricMatrix& m);

// Ingredients of the curvature bound at the projection point Q with D(Q||P0) = E0.
struct LowerBoundTerms {
    double eta1;       // multiplier s* of the radius tilt at Q1 = P1
    double eta_beta;   // eta1 / (1 - eta1 (1 - beta))
    std::vector<double> q;
    SymmetricMatrix H;
};

// Matrix as displayed with the lower-bound statement (drives alpha_lower).
LowerBoundTerms hessian_displayed(const Distribution& P0, const Distribution& P1, double E0, double beta);
// Variant with the direction vectors centred so they are orthogonal to 1; annihilates sqrt(P1).
LowerBoundTerms hessian_centered(const Distribution& P0, const Distribution& P1, double E0, double beta);

double alpha_lower(const Distribution& P0, const Distribution& P1, double E0, double beta);
double alpha_lower_simplified(const Distribution& P0, const Distribution& P1, double E0, double beta);

struct UpperBoundTerms {
    double lambda;  // multiplier recovered from the dual maximizer, 1 - nu*
    double nu;      // dual maximizer
    double kappa;
    double E1;      // optimal type-II exponent at E0
    double p1_min;
    double value;
};

UpperBoundTerms alpha_upper_terms(const Distribution& P0, const Distribution& P1, double E0);
double alpha_upper(const Distribution& P0, const Distribution& P1, double E0);

// Dual objective nu*gamma - ln sum P0^nu P1 Q1^-nu.
double dual_objective(const Distribution& P0, const Distribution& P1, const Distribution& Q1, double gamma, double nu);

struct AlphaBounds {
    double lower;
    double upper;
    std::optional<double> lower_simplified;  // only for |X| >= 6
};

AlphaBounds alpha_bounds(const Distribution& P0, const Distribution& P1, double E0, double beta);

}  // namespace npc
