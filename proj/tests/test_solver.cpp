#include <doctest.h>

#include <cmath>

#include <Eigen/QR>

#include "sparselab/oracle.hpp"
#include "sparselab/problem.hpp"
#include "sparselab/rng.hpp"
#include "sparselab/solver.hpp"

using namespace sparselab;

namespace {

// Random matrix with exactly orthonormal columns (square QR factor).
SensingMatrix orthonormal_matrix(int n, std::uint64_t seed) {
    const SensingMatrix G = gen_gaussian_matrix(n, n, seed);
    SensingMatrix A;
    A.seed = seed;
    A.entries = Eigen::HouseholderQR<Eigen::MatrixXd>(G.entries).householderQ();
    return A;
}

Eigen::VectorXd random_vec(int n, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = rng.normal();
    return v;
}

} // namespace

TEST_CASE("soft_threshold piecewise values and exact zeros") {
    Eigen::VectorXd v(3);
    v << 5, -1, -3;
    SUBCASE("worked values") {
        const Eigen::VectorXd out = soft_threshold(v, 2.0);
        CHECK(out(0) == 3.0);
        CHECK(out(1) == 0.0);
        CHECK(out(2) == -1.0);
    }
    SUBCASE("dead zone gives stored exact zeros") {
        const Eigen::VectorXd out = soft_threshold(v, 5.0);
        for (int i = 0; i < 3; ++i) CHECK(out(i) == 0.0);
    }
    SUBCASE("t = 1") {
        CHECK(soft_threshold(v, 1.0)(2) == -2.0);
    }
    SUBCASE("negative threshold rejected") {
        CHECK_THROWS_AS(soft_threshold(v, -0.5), std::invalid_argument);
    }
}

TEST_CASE("orthonormal columns reduce solve_lasso to soft thresholding") {
    const SensingMatrix A = orthonormal_matrix(12, 31);
    const Eigen::VectorXd y = random_vec(12, 32);
    LassoConfig cfg;
    cfg.lambda = 0.4 * lambda_inf(A, y);
    const LassoSolution sol = solve_lasso(A, y, cfg);
    const Eigen::VectorXd closed_form = soft_threshold(A.entries.transpose() * y, cfg.lambda);
    REQUIRE(sol.converged);
    CHECK((sol.x - closed_form).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("trivial minimizer exactly at and above lambda_inf") {
    Rng rng(5150);
    for (int trial = 0; trial < 50; ++trial) {
        const std::uint64_t seed = derive_seed(5150, trial);
        const int m = 6 + static_cast<int>(rng.below(6));
        const int N = m + 4 + static_cast<int>(rng.below(8));
        const SensingMatrix A = gen_gaussian_matrix(m, N, derive_seed(seed, 1));
        const GroundTruth t = gen_sparse_signal(N, 2, derive_seed(seed, 2), SignalDist::gaussian);
        const Observation obs = make_observation(A, t, 1e-2, derive_seed(seed, 3));
        const double linf = lambda_inf(A, obs.y);

        LassoConfig cfg;
        for (double f : {1.0, 1.001, 1.5}) {
            cfg.lambda = f * linf;
            const LassoSolution sol = solve_lasso(A, obs.y, cfg);
            REQUIRE(sol.converged);
            CHECK((sol.x.array() == 0.0).all());
            CHECK(sol.s_lambda == 0);
        }
        for (double f : {0.999, 0.6, 0.25}) {
            cfg.lambda = f * linf;
            const LassoSolution sol = solve_lasso(A, obs.y, cfg);
            REQUIRE(sol.converged);
            CHECK(sol.s_lambda > 0);
        }
    }
}

TEST_CASE("duality_gap") {
    SUBCASE("zero at the 1x1 optimum") {
        SensingMatrix A;
        A.entries = Eigen::MatrixXd::Ones(1, 1);
        Eigen::VectorXd y(1);
        y << 3;
        Eigen::VectorXd x(1);
        x << 2; // soft_threshold(3, 1)
        CHECK(duality_gap(A, y, 1.0, x) <= 1e-12);
        CHECK(duality_gap(A, y, 1.0, x) >= -1e-12);
    }
    SUBCASE("zero vector is optimal above lambda_inf") {
        const SensingMatrix A = gen_gaussian_matrix(6, 10, 21);
        const Eigen::VectorXd y = random_vec(6, 22);
        const double lambda = 1.1 * lambda_inf(A, y);
        CHECK(std::abs(duality_gap(A, y, lambda, Eigen::VectorXd::Zero(10))) <= 1e-12);
    }
    SUBCASE("gap dominates the true suboptimality") {
        const SensingMatrix A = gen_gaussian_matrix(6, 9, 23);
        const Eigen::VectorXd y = random_vec(6, 24);
        const double lambda = 0.4 * lambda_inf(A, y);
        const Eigen::VectorXd x_star = exact_lasso_small(A, y, lambda, OracleBudget{});
        const double f_star = lambda * x_star.lpNorm<1>() +
                              0.5 * (y - A.entries * x_star).squaredNorm();
        Rng rng(25);
        for (int i = 0; i < 20; ++i) {
            const Eigen::VectorXd x = random_vec(9, derive_seed(25, i));
            const double f = lambda * x.lpNorm<1>() + 0.5 * (y - A.entries * x).squaredNorm();
            CHECK(duality_gap(A, y, lambda, x) >= f - f_star - 1e-10);
        }
    }
}

TEST_CASE("check_extremal_pair") {
    const SensingMatrix A = gen_gaussian_matrix(10, 24, 41);
    const GroundTruth t = gen_sparse_signal(24, 3, 42, SignalDist::gaussian);
    const Observation obs = make_observation(A, t, 1e-3, 43);
    const double linf = lambda_inf(A, obs.y);

    SUBCASE("converged nontrivial solve passes at 1e-5") {
        LassoConfig cfg;
        cfg.lambda = 0.3 * linf;
        const LassoSolution sol = solve_lasso(A, obs.y, cfg);
        REQUIRE(sol.converged);
        CHECK(check_extremal_pair(sol, 1e-5).pass);
    }
    SUBCASE("trivial solve has zero defect and slack atr") {
        LassoConfig cfg;
        cfg.lambda = 1.2 * linf;
        const LassoSolution sol = solve_lasso(A, obs.y, cfg);
        REQUIRE(sol.converged);
        const auto cert = check_extremal_pair(sol, 1e-5);
        CHECK(sol.pairing_defect == 0.0);
        CHECK(sol.atr_inf < cfg.lambda);
        CHECK(cert.pass);
    }
    SUBCASE("perturbation breaks the certificate, defect grows linearly") {
        LassoConfig cfg;
        cfg.lambda = 0.3 * linf;
        LassoSolution sol = solve_lasso(A, obs.y, cfg);
        REQUIRE(sol.converged);

        auto perturbed = [&](double eps) {
            LassoSolution p = sol;
            p.x(0) += eps;
            p.residual = obs.y - A.entries * p.x;
            p.atr_inf = (A.entries.transpose() * p.residual).cwiseAbs().maxCoeff();
            p.pairing_defect = (A.entries * p.x).dot(p.residual) - p.lambda * p.x.lpNorm<1>();
            std::tie(p.support, p.s_lambda) = extract_support(p.x, 0.0);
            return p;
        };
        const auto c1 = check_extremal_pair(perturbed(0.1), 1e-5);
        const auto c2 = check_extremal_pair(perturbed(0.2), 1e-5);
        CHECK_FALSE(c1.pass);
        CHECK_FALSE(c2.pass);
        // defect is affine in the perturbation to first order
        const double d0 = std::abs(sol.pairing_defect);
        const double g1 = std::abs(c1.pairing_defect) - d0;
        const double g2 = std::abs(c2.pairing_defect) - d0;
        CHECK(g2 == doctest::Approx(2.0 * g1).epsilon(0.15));
    }
}

TEST_CASE("extract_support") {
    SUBCASE("zero vector") {
        const auto [sup, s] = extract_support(Eigen::VectorXd::Zero(5), 0.0);
        CHECK(sup.empty());
        CHECK(s == 0);
    }
    SUBCASE("exact nonzeros at rel_tol 0") {
        Eigen::VectorXd x(4);
        x << 0, 3, 0, -1;
        const auto [sup, s] = extract_support(x, 0.0);
        CHECK(sup == std::vector<int>{1, 3});
        CHECK(s == 2);
    }
    SUBCASE("relative floor drops small entries") {
        Eigen::VectorXd x(3);
        x << 10, 1e-8, -2;
        const auto [sup, s] = extract_support(x, 1e-6);
        CHECK(sup == std::vector<int>{0, 2});
        CHECK(s == 2);
    }
}

TEST_CASE("returned zeros are stored exact zeros") {
    const SensingMatrix A = gen_gaussian_matrix(16, 40, 51);
    const GroundTruth t = gen_sparse_signal(40, 4, 52, SignalDist::gaussian);
    const Observation obs = make_observation(A, t, 1e-2, 53);
    LassoConfig cfg;
    cfg.lambda = 0.35 * lambda_inf(A, obs.y);
    const LassoSolution sol = solve_lasso(A, obs.y, cfg);
    REQUIRE(sol.converged);
    REQUIRE(sol.s_lambda < 40);
    int exact_zeros = 0;
    for (int i = 0; i < 40; ++i)
        if (sol.x(i) == 0.0) ++exact_zeros;
    CHECK(exact_zeros == 40 - sol.s_lambda);
}

TEST_CASE("objective trace is nonincreasing across restarts") {
    const SensingMatrix A = gen_gaussian_matrix(20, 60, 61);
    const GroundTruth t = gen_sparse_signal(60, 6, 62, SignalDist::gaussian);
    const Observation obs = make_observation(A, t, 1e-2, 63);
    LassoConfig cfg;
    cfg.lambda = 0.1 * lambda_inf(A, obs.y);
    std::vector<double> trace;
    const LassoSolution sol = solve_lasso(A, obs.y, cfg, std::nullopt, 0.0, &trace);
    REQUIRE(sol.converged);
    REQUIRE(trace.size() >= 2);
    for (size_t i = 1; i < trace.size(); ++i)
        CHECK(trace[i] <= trace[i - 1] * (1.0 + 1e-12) + 1e-15);
    CHECK(trace.back() == doctest::Approx(sol.objective).epsilon(1e-12));
}

TEST_CASE("warm start reaches the same certified solution") {
    const SensingMatrix A = gen_gaussian_matrix(16, 48, 71);
    const GroundTruth t = gen_sparse_signal(48, 5, 72, SignalDist::gaussian);
    const Observation obs = make_observation(A, t, 1e-2, 73);
    const double linf = lambda_inf(A, obs.y);
    LassoConfig cfg;
    cfg.lambda = 0.5 * linf;
    const LassoSolution first = solve_lasso(A, obs.y, cfg);
    cfg.lambda = 0.3 * linf;
    const LassoSolution warm = solve_lasso(A, obs.y, cfg, first.x);
    const LassoSolution cold = solve_lasso(A, obs.y, cfg);
    REQUIRE(warm.converged);
    REQUIRE(cold.converged);
    CHECK(warm.s_lambda == cold.s_lambda);
    CHECK((warm.x - cold.x).cwiseAbs().maxCoeff() <= 1e-6);
    CHECK(check_extremal_pair(warm, 1e-5).pass);
    CHECK(check_extremal_pair(cold, 1e-5).pass);
}

TEST_CASE("non-convergence is flagged, never silent") {
    const SensingMatrix A = gen_gaussian_matrix(16, 48, 81);
    const GroundTruth t = gen_sparse_signal(48, 5, 82, SignalDist::gaussian);
    const Observation obs = make_observation(A, t, 1e-2, 83);
    LassoConfig cfg;
    cfg.lambda = 0.05 * lambda_inf(A, obs.y);
    cfg.max_iter = 3;
    const LassoSolution sol = solve_lasso(A, obs.y, cfg);
    CHECK_FALSE(sol.converged);
    CHECK(sol.iterations == 3);
    CHECK_THROWS_AS(solve_lasso(A, obs.y, LassoConfig{.lambda = -1.0}), std::invalid_argument);
}
