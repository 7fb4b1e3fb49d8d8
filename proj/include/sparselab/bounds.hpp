#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Dense>

#include "sparselab/problem.hpp"

namespace sparselab {

// Robust null space property constants derived from a restricted isometry
// constant delta:
//   rho  = delta / (sqrt(1 - delta^2) - delta/4)
//   beta = sqrt(1 + delta) / (sqrt(1 - delta^2) - delta/4)
// Valid while the denominator is positive (delta < 4/sqrt(17)); rho < 1
// additionally requires delta < 4/sqrt(41), which only the alternative
// l1 route enforces.
struct RnspConstants {
    double delta = 0.0;
    double rho = 0.0;
    double beta = 0.0;
};

struct SparsityBound {
    long long t = 0;  // support-size limit: s_lambda < t
    double chi = 0.0; // sqrt(1+delta) * (beta + theta)
};

struct L2Bounds {
    double lower = 0.0; // may be negative (vacuous), reported as-is
    double upper = 0.0;
};

struct L1Bounds {
    double general = 0.0;
    double improved = 0.0;
};

struct RnspRouteBound {
    double from_residual = 0.0; // residual-dependent expression
    double maximized = 0.0;     // (beta + 2 theta)^2 k lambda / (1 - rho^2)
};

struct RearrangeCheck {
    double lhs = 0.0; // ||v||_1 - ||u||_1
    double rhs = 0.0; // tau ||A(u - v)||_2
    bool holds = false;
};

// Every closed-form bound quantity for one (instance, lambda). Fields that
// need a solution (s_lambda, entropy) are NaN when none was supplied.
struct BoundReport {
    double delta = 0.0;
    int k = 0;
    double lambda = 0.0;
    double mu = 0.0;
    double theta = 0.0;
    double rho = 0.0;
    double beta = 0.0;
    double residual_upper = 0.0;  // (beta + theta) sqrt(k)
    double residual_lower = 0.0;  // sqrt(s_lambda / (1 + delta))
    long long sparsity_limit = 0; // t
    double chi = 0.0;
    double l2_lower = 0.0;
    double l2_upper = 0.0;
    double l1_upper = 0.0;
    double l1_upper_improved = 0.0;
    double entropy = 0.0;
    bool in_regime = true; // theta <= 1
};

RnspConstants rnsp_from_ric(double delta);

// Regime parameter 2 mu / (lambda sqrt(k)); values > 1 are outside the
// analyzed regime and must be flagged by callers.
double theta(double mu, double lambda, int k);

// Upper bound (beta + theta) sqrt(k) for the rescaled residual ||r||_2/lambda.
double residual_upper(double beta, double theta, int k);

// Lower bound sqrt(s_lambda / (1 + delta)) for the rescaled residual.
double residual_lower(long long s_lambda, double delta);

// t = floor((1+delta)(beta+theta)^2 k) + 1 and chi = sqrt(1+delta)(beta+theta);
// the guarantee is s_lambda < t.
SparsityBound sparsity_bound(double delta, double beta, double theta, int k);

// Two-sided l2 error bounds on ||x_lambda - x*(k)||_2:
//   lower = (sqrt(s_lambda) lambda / sqrt(1+delta) - mu) / sqrt(1+delta)
//   upper = (beta_prime sqrt(k) lambda + 3 mu) / sqrt(1-delta_prime)
L2Bounds l2_bounds(double delta, double delta_prime, double beta_prime, int k,
                   long long s_lambda, double lambda, double mu);

// l1 error bounds on ||x_lambda - x*(k)||_1:
//   general  = sqrt((1+delta)/(1-delta)) ((beta + 1/2) sqrt(k) lambda + 2 mu)^2 / lambda
//   improved = sqrt((1+delta)/(1-delta)) ((beta + 1/4)^2 k lambda + (4 beta + 1) sqrt(k) mu)
L1Bounds l1_bounds(double delta, double beta, double theta, int k,
                   double lambda, double mu);

// Alternative l1 route through the null space property, requiring rho < 1:
//   from_residual = ( ||r||(2(beta+theta)sqrt(k) - (1+rho)||r||/lambda)
//                     + beta theta k lambda ) / (1 - rho)
//   maximized     = (beta + 2 theta)^2 k lambda / (1 - rho^2)
RnspRouteBound l1_bound_rnsp_route(double rho, double beta, double theta, int k,
                                   double lambda, double residual_norm, double mu);

// l1-entropy ||x||_1^2 / ||x||_2^2 (0 for the zero vector); at most ||x||_0.
double entropy(const Eigen::VectorXd& x);

// Sampled check of ||v||_1 - ||u||_1 <= tau ||A(u - v)||_2 for k-sparse v.
RearrangeCheck check_rearrange(const SensingMatrix& A, double tau,
                               const Eigen::VectorXd& v, const Eigen::VectorXd& u);

// Evaluates the full report at one (delta, k, lambda, mu); s_lambda and
// entropy fill the solution-dependent rows when available.
BoundReport evaluate_bound_report(double delta, int k, double lambda, double mu,
                                  std::optional<long long> s_lambda = std::nullopt,
                                  std::optional<double> entropy_value = std::nullopt);

// Fixed CSV schema for BoundReport rows.
std::string bound_report_csv_header();
std::string bound_report_csv_row(const BoundReport& r);

} // namespace sparselab
