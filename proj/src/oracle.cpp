#include "sparselab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "sparselab/rng.hpp"

namespace sparselab {

namespace {

double pow3(int n) {
    double p = 1.0;
    for (int i = 0; i < n; ++i) p *= 3.0;
    return p;
}

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    double c = 1.0;
    for (int i = 0; i < k; ++i) c = c * (n - i) / (i + 1);
    return c;
}

// Calls fn(support) for every size-k subset of {0..n-1}.
template <typename Fn>
void for_each_subset(int n, int k, Fn&& fn) {
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        fn(idx);
        int i = k - 1;
        while (i >= 0 && idx[i] == n - k + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

// RIC deviation of one column subset from the Gram matrix eigenvalues.
double subset_deviation(const Eigen::MatrixXd& gram, const std::vector<int>& s) {
    const int k = static_cast<int>(s.size());
    Eigen::MatrixXd g(k, k);
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) g(a, b) = gram(s[a], s[b]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    return std::max(1.0 - lo, hi - 1.0);
}

} // namespace

Eigen::VectorXd exact_lasso_small(const SensingMatrix& A, const Eigen::VectorXd& y,
                                  double lambda, const OracleBudget& budget) {
    const int n = static_cast<int>(A.cols());
    if (lambda <= 0.0) throw std::invalid_argument("exact_lasso_small: lambda must be > 0");
    if (n > budget.max_cols || pow3(n) >= 1e7)
        throw std::invalid_argument("exact_lasso_small: " + std::to_string(n) +
                                    " columns exceed the enumeration budget (3^n = " +
                                    std::to_string(pow3(n)) + " candidates)");

    const Eigen::MatrixXd gram = A.entries.transpose() * A.entries;
    const Eigen::VectorXd aty = A.entries.transpose() * y;
    const double dual_slack = lambda * (1.0 + 1e-12);
    const double sign_slack = 1e-12;

    double best_objective = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_x;
    bool found = false;

    std::vector<int> support;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        support.clear();
        for (int j = 0; j < n; ++j)
            if (mask & (1u << j)) support.push_back(j);
        const int s = static_cast<int>(support.size());

        Eigen::MatrixXd gss(s, s);
        Eigen::VectorXd bs(s);
        for (int a = 0; a < s; ++a) {
            bs(a) = aty(support[a]);
            for (int b = 0; b < s; ++b) gss(a, b) = gram(support[a], support[b]);
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu;
        if (s > 0) {
            lu.compute(gss);
            if (!lu.isInvertible()) continue; // degenerate support, skip it
        }

        for (std::uint32_t signs = 0; signs < (1u << s); ++signs) {
            Eigen::VectorXd sigma(s);
            for (int a = 0; a < s; ++a) sigma(a) = (signs & (1u << a)) ? -1.0 : 1.0;

            Eigen::VectorXd xs;
            if (s > 0) {
                xs = lu.solve(bs - lambda * sigma);
                bool sign_ok = true;
                for (int a = 0; a < s; ++a) {
                    if (std::abs(xs(a)) <= sign_slack) continue; // boundary: either sign
                    if (xs(a) * sigma(a) < 0.0) { sign_ok = false; break; }
                }
                if (!sign_ok) continue;
            }

            Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
            for (int a = 0; a < s; ++a) x(support[a]) = xs(a);

            // Dual feasibility off the support.
            const Eigen::VectorXd corr = aty - gram * x;
            bool feasible = true;
            for (int j = 0; j < n && feasible; ++j) {
                bool in_support = mask & (1u << j);
                if (!in_support && std::abs(corr(j)) > dual_slack) feasible = false;
            }
            if (!feasible) continue;

            const double objective =
                lambda * x.lpNorm<1>() + 0.5 * (y - A.entries * x).squaredNorm();
            if (objective < best_objective) {
                best_objective = objective;
                best_x = x;
                found = true;
            }
        }
    }

    if (!found)
        throw std::logic_error("exact_lasso_small: no KKT-admissible candidate found");
    return best_x;
}

double exact_ric(const SensingMatrix& A, int k, const OracleBudget& budget) {
    const int n = static_cast<int>(A.cols());
    if (k < 1 || k > n) throw std::invalid_argument("exact_ric: need 1 <= k <= cols");
    if (k > budget.max_order)
        throw std::invalid_argument("exact_ric: order " + std::to_string(k) +
                                    " exceeds max_order " + std::to_string(budget.max_order));
    const double cost = binomial(n, k);
    constexpr double kMaxSubsets = 2e6;
    if (cost > kMaxSubsets)
        throw std::invalid_argument("exact_ric: C(" + std::to_string(n) + "," +
                                    std::to_string(k) + ") = " + std::to_string(cost) +
                                    " subsets exceed the enumeration budget of 2e6");

    const Eigen::MatrixXd gram = A.entries.transpose() * A.entries;
    double delta = 0.0;
    for_each_subset(n, k, [&](const std::vector<int>& s) {
        delta = std::max(delta, subset_deviation(gram, s));
    });
    return delta;
}

double mc_ric_lower(const SensingMatrix& A, int k, int trials, std::uint64_t seed) {
    const int n = static_cast<int>(A.cols());
    if (k < 1 || k > n) throw std::invalid_argument("mc_ric_lower: need 1 <= k <= cols");
    const Eigen::MatrixXd gram = A.entries.transpose() * A.entries;
    Rng rng(seed);
    std::vector<int> perm(n);
    double delta = 0.0;
    for (int t = 0; t < trials; ++t) {
        for (int i = 0; i < n; ++i) perm[i] = i;
        for (int i = 0; i < k; ++i) {
            const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - i)));
            std::swap(perm[i], perm[j]);
        }
        std::vector<int> s(perm.begin(), perm.begin() + k);
        delta = std::max(delta, subset_deviation(gram, s));
    }
    return delta;
}

RnspFalsification falsify_rnsp(const SensingMatrix& A, int k, double rho,
                               double tau, int samples, std::uint64_t seed) {
    const int n = static_cast<int>(A.cols());
    if (k < 1 || k > n) throw std::invalid_argument("falsify_rnsp: need 1 <= k <= cols");
    Rng rng(seed);

    RnspFalsification result;
    result.worst_margin = -std::numeric_limits<double>::infinity();

    auto evaluate = [&](const Eigen::VectorXd& x, const std::vector<int>& support) {
        double on = 0.0;
        std::vector<char> in(n, 0);
        for (int idx : support) in[idx] = 1;
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            (in[i] ? on : off) += std::abs(x(i));
        const double margin = on - rho * off - tau * (A.entries * x).norm();
        result.worst_margin = std::max(result.worst_margin, margin);
        if (margin > 1e-10) ++result.violations;
    };

    auto random_support = [&]() {
        std::vector<int> perm(n);
        for (int i = 0; i < n; ++i) perm[i] = i;
        for (int i = 0; i < k; ++i) {
            const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - i)));
            std::swap(perm[i], perm[j]);
        }
        perm.resize(k);
        return perm;
    };

    // Deterministic opener: the signed difference of the most coherent column
    // pair, with K on the first column. This is the sharpest simple candidate
    // (it is an exact null vector when columns repeat).
    if (samples > 0 && n >= 2) {
        int bi = 0, bj = 1;
        double best = -1.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const double c = std::abs(A.entries.col(i).dot(A.entries.col(j)));
                if (c > best) { best = c; bi = i; bj = j; }
            }
        Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
        x(bi) = 1.0;
        x(bj) = A.entries.col(bi).dot(A.entries.col(bj)) >= 0.0 ? -1.0 : 1.0;
        std::vector<int> support = {bi};
        evaluate(x, support);
    }

    for (int s = 1; s < samples; ++s) {
        Eigen::VectorXd x(n);
        switch (s % 3) {
        case 0: // dense gaussian
            for (int i = 0; i < n; ++i) x(i) = rng.normal();
            break;
        case 1: { // sparse
            x.setZero();
            for (int idx : random_support()) x(idx) = rng.normal();
            break;
        }
        default: { // sparse spike plus small dense background
            for (int i = 0; i < n; ++i) x(i) = 0.1 * rng.normal();
            for (int idx : random_support()) x(idx) += rng.normal();
            break;
        }
        }
        evaluate(x, random_support());
    }
    return result;
}

} // namespace sparselab
