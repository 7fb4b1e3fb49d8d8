#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace sparselab {

enum class SignalDist { gaussian, rademacher };

// Observation operator A with unit l2-normalized columns. Immutable after
// construction; safe to share read-only across threads.
struct SensingMatrix {
    Eigen::MatrixXd entries; // m x N, column-major
    std::uint64_t seed = 0;  // provenance tag of the generator call

    Eigen::Index rows() const { return entries.rows(); }
    Eigen::Index cols() const { return entries.cols(); }
};

// The unknown sparse vector x*, its support and the sigma_j ledger
// (best-j-term l1 approximation errors, j = 0..k).
struct GroundTruth {
    Eigen::VectorXd signal;
    std::vector<int> support; // sorted, exactly the nonzero indices
    int k = 0;
    std::vector<double> sigma; // sigma[j] for j in {0,...,k}
};

// y = A x* + eps with the noise norm and the small scale mu recorded.
struct Observation {
    Eigen::VectorXd y;
    Eigen::VectorXd noise;
    double noise_norm = 0.0;
    double mu = 0.0; // sigma_k(x*) + ||eps||_2
};

// i.i.d. standard normal entries, then each column rescaled to unit l2 norm.
// Deterministic in (m, N, seed). Requires m >= 1, N >= m.
SensingMatrix gen_gaussian_matrix(int m, int N, std::uint64_t seed);

// Support drawn uniformly without replacement, nonzero values i.i.d. from
// dist (exact zeros are redrawn so the support invariant holds). k <= N.
GroundTruth gen_sparse_signal(int N, int k, std::uint64_t seed, SignalDist dist);

// eps is a normal direction rescaled so ||eps||_2 == noise_norm exactly,
// making mu = sigma_k(x*) + noise_norm known per instance.
Observation make_observation(const SensingMatrix& A, const GroundTruth& truth,
                             double noise_norm, std::uint64_t seed);

// l1 distance from x to the set of k-sparse vectors: the sum of magnitudes of
// all but the k largest-magnitude entries. Ties keep the lower index.
double sigma_k(const Eigen::VectorXd& x, int k);

// Best k-term approximation: x on its k largest-magnitude indices (lowest
// index wins ties), zero elsewhere. ||x - best_k(x,k)||_1 == sigma_k(x,k).
Eigen::VectorXd best_k(const Eigen::VectorXd& x, int k);

// ||A^T y||_inf, the threshold above which the LASSO minimizer is zero.
double lambda_inf(const SensingMatrix& A, const Eigen::VectorXd& y);

} // namespace sparselab
