#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sparselab/oracle.hpp"
#include "sparselab/solver.hpp"

namespace sparselab {

// Solver-vs-oracle agreement on tiny random instances.
struct AgreementOptions {
    int instances = 200;
    std::uint64_t seed = 2024;
    std::vector<double> lambda_factors = {0.1, 0.3, 0.7}; // of lambda_inf
    double gap_tol = 1e-15; // tight so the iterate is pinned to the optimum
    int max_iter = 200000;
    OracleBudget budget;
    int threads = 0;
    std::string csv_path; // optional per-solve report rows
};

struct AgreementReport {
    int instances = 0;
    int solves = 0;
    double max_objective_gap = 0.0; // solver objective - oracle objective
    double max_linf_gap = 0.0;      // ||x_solver - x_oracle||_inf
    int objective_violations = 0;   // > 1e-9
    int linf_violations = 0;        // > 1e-6
    int cert_failures = 0;          // converged solves failing the pair check
    int nonconverged = 0;
    std::vector<std::string> defects;
    bool pass() const {
        return objective_violations == 0 && linf_violations == 0 &&
               cert_failures == 0 && nonconverged == 0;
    }
};

AgreementReport run_agreement_suite(const AgreementOptions& opts);

// Theorem checks with exact enumerated restricted isometry constants at small
// scale. Instances are drawn by rejection until `instances` of them admit
// valid null-space constants (delta_2k < 4/sqrt(41), so rho < 1); the
// RIP-only checks run on every solved instance either way.
struct TheoremSuiteOptions {
    int instances = 200;
    int m = 10;
    int N = 12;
    int k = 1;
    double noise_norm = 1e-3;
    std::vector<double> lambda_factors = {0.5, 0.3};
    std::uint64_t seed = 77;
    double gap_tol = 1e-12;
    int threads = 0;
    std::string csv_path; // optional per-solve report rows
};

struct TheoremCheck {
    const char* name = "";
    long long checked = 0;
    long long violations = 0;
};

struct TheoremSuiteReport {
    int instances = 0;        // instances with valid RNSP constants
    int rejected = 0;         // seeds skipped by the delta_2k filter
    int solves = 0;           // converged solves examined
    int out_of_regime = 0;    // solves with theta > 1, skipped
    int cert_failures = 0;
    int nonconverged = 0;
    // residual_upper, residual_lower, sparsity, entropy, l2_lower, l2_upper,
    // l1_general, l1_improved, l1_rnsp_route, l1_ceiling
    std::vector<TheoremCheck> checks;
    std::vector<std::string> defects;

    long long total_violations() const;
    bool pass() const {
        return total_violations() == 0 && cert_failures == 0 && nonconverged == 0;
    }
};

TheoremSuiteReport run_theorem_suite(const TheoremSuiteOptions& opts);

} // namespace sparselab
