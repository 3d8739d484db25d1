#pragma once

#include <span>
#include <vector>

#include "npclass/distributions.hpp"

namespace npc {

// Result of a one-parameter projection onto a tilted family.
struct TiltSolution {
    double multiplier;          // reparameterized multiplier s in [0,1]
    Distribution distribution;  // projection point
    double value;               // divergence achieved at the projection (nats)
};

struct TradeoffPoint {
    double E0;
    double E1;
    double gamma;       // LRT threshold E0 - E1 placing the boundary at the tilt point
    double multiplier;  // s* of the tilt P0^s P1^(1-s); 0 when E0 >= D(P1||P0), 1 when E0 = 0
};

struct SteinExponents {
    double E1_stein;  // D(P0||P1)
    double E0_stein;  // Renyi divergence of order alpha/(1+alpha) of P1 from P0
};

// Q on the path Q1^(1-s) P0^s with D(Q||P0) = E0; value = D(Q||Q1).
TiltSolution solve_tilt_radius(const Distribution& P0, const Distribution& Q1, double E0);

// Q on the path P0^s P1^(1-s) with D(Q||P0) - D(Q||P1) = gamma; value = D(Q||P0).
TiltSolution solve_tilt_hyperplane(const Distribution& P0, const Distribution& P1, double gamma);

// beta * min_{D(Q||P0) <= E0} D(Q||Q1) - E0.
double threshold_gamma(const Distribution& P0, const Distribution& Q1, double E0, double beta);

TradeoffPoint optimal_tradeoff(const Distribution& P0, const Distribution& P1, double E0);

// Type-II exponent of the beta-classifier whose training type has converged to Q1.
double mismatched_exponent(const Distribution& P0, const Distribution& P1, const Distribution& Q1, double E0,
                           double beta);

// Worst mismatched exponent over the KL ball of radius r around P1.
double worst_case_exponent(const Distribution& P0, const Distribution& P1, double E0, double beta, double r,
                           int grid_resolution);

// Critical training ratio by a numeric supremum over a geometric r-grid.
// grid_resolution is the number of search directions for |X| >= 3.
double alpha_star_numeric(const Distribution& P0, const Distribution& P1, double E0, double beta,
                          int grid_resolution = 64);

SteinExponents stein_exponents(const Distribution& P0, const Distribution& P1, double alpha);

// KL distance from P1 to the nearest face of the simplex.
double r_critical(const Distribution& P1);

namespace detail {

// Allocation-light kernels on log-probability vectors, shared with the classifiers.
struct RadiusTilt {
    double s;
    double value;  // D(Q||Q1)
};

// Requires 0 < E0 < D(Q1||P0). Q (if non-null) receives the projection point.
RadiusTilt radius_tilt(std::span<const double> logp0, std::span<const double> logq1, double E0,
                       std::vector<double>* q = nullptr);

// Threshold continued inside the ball: -E0 when D(Q1||P0) <= E0.
double threshold_gamma_extended(const Distribution& P0, const Distribution& Q1, double E0, double beta);

// min D(Q||P1) subject to beta D(Q||Q1) - D(Q||P0) >= gamma.
double exponent_for_gamma(const Distribution& P0, const Distribution& P1, const Distribution& Q1, double gamma,
                          double beta);

}  // namespace detail

}  // namespace npc
