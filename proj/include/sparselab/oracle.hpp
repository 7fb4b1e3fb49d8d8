#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "sparselab/problem.hpp"

namespace sparselab {

// Enumeration ceilings for the brute-force references. 3^max_cols candidate
// sign patterns must stay below 1e7, which caps max_cols at 14.
struct OracleBudget {
    int max_cols = 14;
    int max_order = 6;
    int mc_trials = 1000;
};

struct RnspFalsification {
    long long violations = 0;
    double worst_margin = 0.0; // max of ||x_K||_1 - rho||x_Kc||_1 - tau||Ax||_2
};

// Exact LASSO minimizer by support/sign enumeration: for every support S and
// sign pattern sigma, the candidate solves A_S^T A_S x_S = A_S^T y - lambda
// sigma; it is admissible when sign(x_S) = sigma (entries within 1e-12 of
// zero accepted under either sign) and ||A_{S^c}^T (y - A_S x_S)||_inf <=
// lambda (1 + 1e-12). Returns the admissible candidate of least objective,
// the global optimum by convexity.
Eigen::VectorXd exact_lasso_small(const SensingMatrix& A, const Eigen::VectorXd& y,
                                  double lambda, const OracleBudget& budget);

// Exact restricted isometry constant of order k by enumerating all column
// subsets: max over |S| = k of max(1 - sigma_min^2(A_S), sigma_max^2(A_S) - 1).
// Values above 1 are possible and returned as computed.
double exact_ric(const SensingMatrix& A, int k, const OracleBudget& budget);

// Monte-Carlo lower bound on the order-k RIC: the same deviation maximized
// over `trials` uniformly sampled supports. Nested in trials for a fixed seed.
double mc_ric_lower(const SensingMatrix& A, int k, int trials, std::uint64_t seed);

// Sampled falsification of the null space property with constants (rho, tau)
// at order k. The first sample is the signed difference of the most coherent
// column pair; the rest alternate dense, sparse and sparse-plus-dense draws.
RnspFalsification falsify_rnsp(const SensingMatrix& A, int k, double rho,
                               double tau, int samples, std::uint64_t seed);

} // namespace sparselab
