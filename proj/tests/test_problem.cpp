#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <tuple>

#include "sparselab/problem.hpp"
#include "sparselab/rng.hpp"

using namespace sparselab;

namespace {

Eigen::VectorXd vec3(double a, double b, double c) {
    Eigen::VectorXd v(3);
    v << a, b, c;
    return v;
}

} // namespace

TEST_CASE("gen_gaussian_matrix normalizes every column") {
    for (auto [m, N, seed] : {std::tuple{2, 2, 42ull}, {8, 20, 7ull}, {32, 64, 123ull}}) {
        const SensingMatrix A = gen_gaussian_matrix(m, N, seed);
        REQUIRE(A.rows() == m);
        REQUIRE(A.cols() == N);
        for (int j = 0; j < N; ++j)
            CHECK(std::abs(A.entries.col(j).norm() - 1.0) <= 1e-12);
    }
}

TEST_CASE("gen_gaussian_matrix is deterministic in its seed") {
    const SensingMatrix A = gen_gaussian_matrix(16, 40, 99);
    const SensingMatrix B = gen_gaussian_matrix(16, 40, 99);
    CHECK(A.entries == B.entries);
    const SensingMatrix C = gen_gaussian_matrix(16, 40, 100);
    CHECK(A.entries != C.entries);
}

TEST_CASE("gen_gaussian_matrix rejects bad shapes") {
    CHECK_THROWS_AS(gen_gaussian_matrix(0, 4, 1), std::invalid_argument);
    CHECK_THROWS_AS(gen_gaussian_matrix(8, 4, 1), std::invalid_argument);
}

TEST_CASE("gen_sparse_signal support and sigma ledger") {
    SUBCASE("k = 0 gives the zero vector") {
        const GroundTruth t = gen_sparse_signal(10, 0, 5, SignalDist::gaussian);
        CHECK(t.support.empty());
        CHECK(t.signal.isZero(0.0));
        CHECK(t.sigma == std::vector<double>{0.0});
    }
    SUBCASE("k = N gives a fully dense vector") {
        const GroundTruth t = gen_sparse_signal(5, 5, 5, SignalDist::gaussian);
        CHECK(t.support.size() == 5);
        CHECK((t.signal.array() != 0.0).all());
        CHECK(t.sigma[5] == 0.0);
    }
    SUBCASE("general case") {
        const GroundTruth t = gen_sparse_signal(4096, 160, 3, SignalDist::gaussian);
        CHECK(t.k == 160);
        CHECK(t.support.size() == 160);
        CHECK(t.sigma[160] == 0.0);
        CHECK(std::is_sorted(t.support.begin(), t.support.end()));
        int nonzeros = 0;
        for (int i = 0; i < t.signal.size(); ++i)
            if (t.signal(i) != 0.0) ++nonzeros;
        CHECK(nonzeros == 160);
        for (int idx : t.support) CHECK(t.signal(idx) != 0.0);
        for (int j = 0; j <= t.k; ++j) {
            CHECK(t.sigma[j] == doctest::Approx(sigma_k(t.signal, j)).epsilon(1e-12));
            if (j > 0) CHECK(t.sigma[j] <= t.sigma[j - 1]);
        }
    }
    SUBCASE("rademacher values are +-1") {
        const GroundTruth t = gen_sparse_signal(50, 10, 9, SignalDist::rademacher);
        for (int idx : t.support) CHECK(std::abs(t.signal(idx)) == 1.0);
    }
    SUBCASE("k > N is rejected") {
        CHECK_THROWS_AS(gen_sparse_signal(4, 5, 1, SignalDist::gaussian), std::invalid_argument);
    }
}

TEST_CASE("make_observation hits the requested noise norm exactly") {
    const SensingMatrix A = gen_gaussian_matrix(24, 48, 11);
    const GroundTruth t = gen_sparse_signal(48, 6, 12, SignalDist::gaussian);

    SUBCASE("noiseless") {
        const Observation obs = make_observation(A, t, 0.0, 13);
        CHECK((obs.y - A.entries * t.signal).norm() == 0.0);
        CHECK(obs.mu == 0.0); // exactly k-sparse truth
    }
    SUBCASE("noisy") {
        const Observation obs = make_observation(A, t, 1e-2, 13);
        CHECK(std::abs(obs.noise.norm() - 1e-2) <= 1e-14);
        CHECK(obs.mu == doctest::Approx(1e-2).epsilon(1e-12));
        CHECK(std::abs((obs.y - A.entries * t.signal).norm() - 1e-2) <= 1e-12);
    }
    SUBCASE("zero signal, unit noise") {
        const GroundTruth z = gen_sparse_signal(48, 0, 1, SignalDist::gaussian);
        const Observation obs = make_observation(A, z, 1.0, 13);
        CHECK(obs.y.norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("negative noise norm is rejected") {
        CHECK_THROWS_AS(make_observation(A, t, -1.0, 13), std::invalid_argument);
    }
}

TEST_CASE("sigma_k on the worked example") {
    const Eigen::VectorXd x = vec3(3, 1, -2);
    CHECK(sigma_k(x, 1) == 3.0); // drop 1 and -2
    CHECK(sigma_k(x, 0) == 6.0);
    CHECK(sigma_k(x, 3) == 0.0);
    CHECK_THROWS_AS(sigma_k(x, 4), std::invalid_argument);
}

TEST_CASE("best_k keeps the k largest magnitudes, lowest index on ties") {
    CHECK(best_k(vec3(3, 1, -2), 2) == vec3(3, 0, -2));
    Eigen::VectorXd ones2(2);
    ones2 << 1, 1;
    Eigen::VectorXd kept(2);
    kept << 1, 0;
    CHECK(best_k(ones2, 1) == kept);
    const Eigen::VectorXd x = vec3(0.5, -0.25, 4);
    CHECK(best_k(x, 3) == x);
}

TEST_CASE("sigma_k is nonincreasing in k and matches best_k exactly") {
    Rng rng(2718);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(12));
        Eigen::VectorXd x(n);
        for (int i = 0; i < n; ++i) x(i) = rng.normal();
        if (trial % 7 == 0) x(static_cast<int>(rng.below(n))) = 0.0;
        const int k = static_cast<int>(rng.below(n + 1));
        // both sides sum the same dropped magnitudes; only accumulation order
        // (Eigen packs the norm) separates them
        CHECK((x - best_k(x, k)).lpNorm<1>() ==
              doctest::Approx(sigma_k(x, k)).epsilon(1e-14));
        if (k < n) CHECK(sigma_k(x, k) >= sigma_k(x, k + 1));
        CHECK(sigma_k(x, n) == 0.0);
    }
}

TEST_CASE("lambda_inf") {
    SUBCASE("orthonormal 2x2") {
        SensingMatrix A;
        A.entries = Eigen::MatrixXd::Identity(2, 2);
        Eigen::VectorXd y(2);
        y << 3, -4;
        CHECK(lambda_inf(A, y) == 4.0);
        CHECK(lambda_inf(A, Eigen::VectorXd::Zero(2)) == 0.0);
    }
    SUBCASE("matches the column-by-column oracle") {
        const SensingMatrix A = gen_gaussian_matrix(8, 20, 77);
        Rng rng(78);
        Eigen::VectorXd y(8);
        for (int i = 0; i < 8; ++i) y(i) = rng.normal();
        double expected = 0.0;
        for (int j = 0; j < 20; ++j)
            expected = std::max(expected, std::abs(A.entries.col(j).dot(y)));
        CHECK(lambda_inf(A, y) == doctest::Approx(expected).epsilon(1e-15));
    }
}
