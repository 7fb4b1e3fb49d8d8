#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "sparselab/problem.hpp"

namespace sparselab {

struct LassoConfig {
    double lambda = 1.0;
    int max_iter = 50000;
    double gap_tol = 1e-10;         // relative duality-gap stopping threshold
    double kkt_tol = 1e-5;          // extremal-pair certification tolerance
    double support_rel_tol = 0.0;   // magnitude floor for support extraction
};

struct LassoSolution {
    Eigen::VectorXd x;
    Eigen::VectorXd residual; // y - A x
    double lambda = 0.0;
    int iterations = 0;
    double duality_gap = 0.0;
    double atr_inf = 0.0;         // ||A^T r||_inf
    double pairing_defect = 0.0;  // <A x, r> - lambda ||x||_1
    std::vector<int> support;
    int s_lambda = 0;
    double objective = 0.0;
    bool converged = false; // false: stopped at max_iter, certificates unmet
};

struct ExtremalPairCertificate {
    double pairing_defect = 0.0;
    double atr_excess = 0.0; // ||A^T r||_inf - lambda
    bool pass = false;
};

// Componentwise sign(v_i) * max(|v_i| - t, 0); entries inside the dead zone
// come out as exact zeros.
Eigen::VectorXd soft_threshold(const Eigen::VectorXd& v, double t);

// Certified duality gap at x: primal lambda||x||_1 + 1/2||y-Ax||^2 minus the
// dual value at u = r * min(1, lambda/||A^T r||_inf). Nonnegative up to
// rounding (>= -1e-12).
double duality_gap(const SensingMatrix& A, const Eigen::VectorXd& y,
                   double lambda, const Eigen::VectorXd& x);

// Accelerated proximal gradient with constant step 1/L (L = ||A||_2^2 from
// power iteration) and monotone restart on objective increase. Stops when the
// duality gap falls below gap_tol * (1/2||y||^2 + 1) and the extremal-pair
// certificates hold at kkt_tol; the returned iterate is always the output of
// a proximal step, so its zeros are exact.
//
// x0: optional warm start. lipschitz_hint: pass a precomputed ||A||_2^2 to
// skip the power iteration (0 = compute). objective_trace: when non-null,
// receives the accepted objective values, one per iteration.
LassoSolution solve_lasso(const SensingMatrix& A, const Eigen::VectorXd& y,
                          const LassoConfig& config,
                          const std::optional<Eigen::VectorXd>& x0 = std::nullopt,
                          double lipschitz_hint = 0.0,
                          std::vector<double>* objective_trace = nullptr);

// Checks the optimality identities <A x, r> = lambda||x||_1 and
// ||A^T r||_inf = lambda (the latter two-sided only for nontrivial x).
ExtremalPairCertificate check_extremal_pair(const LassoSolution& sol, double tol);

// Indices with |x_i| > rel_tol * ||x||_inf; rel_tol = 0 returns the exact
// nonzero set (the zero vector has empty support).
std::pair<std::vector<int>, int> extract_support(const Eigen::VectorXd& x,
                                                 double rel_tol);

// Largest eigenvalue of A^T A by power iteration (100 steps or relative
// change < 1e-10), with a 1e-6 relative safety inflation.
double spectral_norm_sq(const SensingMatrix& A);

} // namespace sparselab
