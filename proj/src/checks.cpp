#include "sparselab/checks.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

#include "sparselab/bounds.hpp"
#include "sparselab/io.hpp"
#include "sparselab/rng.hpp"

namespace sparselab {

namespace {

constexpr double kRhoOneDelta = 0.62469504755442429; // 4/sqrt(41), where rho = 1

// bound <= value and value <= bound comparisons with slack for float noise
// and the solver's certification tolerance; genuine theorem violations are
// orders of magnitude louder.
bool exceeds(double value, double bound) {
    return value > bound + 1e-8 * std::max(std::abs(value), std::abs(bound)) + 1e-12;
}

void run_parallel(int count, int threads, const std::function<void(int)>& body) {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    int workers = threads > 0 ? threads : hw;
    workers = std::min(workers, count);
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
        });
    for (auto& th : pool) th.join();
}

} // namespace

AgreementReport run_agreement_suite(const AgreementOptions& opts) {
    struct SolveRow {
        std::uint64_t seed = 0;
        double lambda = 0.0;
        double objective_gap = 0.0;
        double linf_gap = 0.0;
        bool certified = false;
        bool converged = false;
    };
    struct InstanceResult {
        std::vector<SolveRow> rows;
        std::vector<std::string> defects;
    };
    std::vector<InstanceResult> results(opts.instances);

    run_parallel(opts.instances, opts.threads, [&](int i) {
        InstanceResult& res = results[i];
        const std::uint64_t inst_seed = derive_seed(opts.seed, 1000 + static_cast<std::uint64_t>(i));
        const int m = 4 + i % 5;            // 4..8
        const int N = std::max(m, 6 + (i * 7) % 5); // 6..10
        const int k = 1 + i % 3;
        const double noise = 1e-2 * (1 + i % 3);

        const SensingMatrix A = gen_gaussian_matrix(m, N, derive_seed(inst_seed, 1));
        const GroundTruth truth = gen_sparse_signal(N, k, derive_seed(inst_seed, 2),
                                                    SignalDist::gaussian);
        const Observation obs = make_observation(A, truth, noise, derive_seed(inst_seed, 3));
        const double linf = lambda_inf(A, obs.y);
        const double lipschitz = spectral_norm_sq(A);

        for (double f : opts.lambda_factors) {
            LassoConfig cfg;
            cfg.lambda = f * linf;
            cfg.gap_tol = opts.gap_tol;
            cfg.max_iter = opts.max_iter;
            const LassoSolution sol = solve_lasso(A, obs.y, cfg, std::nullopt, lipschitz);
            const Eigen::VectorXd x_oracle = exact_lasso_small(A, obs.y, cfg.lambda, opts.budget);
            const double oracle_objective =
                cfg.lambda * x_oracle.lpNorm<1>() + 0.5 * (obs.y - A.entries * x_oracle).squaredNorm();

            SolveRow row;
            row.seed = inst_seed;
            row.lambda = cfg.lambda;
            row.objective_gap = sol.objective - oracle_objective;
            row.linf_gap = (sol.x - x_oracle).cwiseAbs().maxCoeff();
            row.converged = sol.converged;
            row.certified = sol.converged && check_extremal_pair(sol, 1e-5).pass;
            res.rows.push_back(row);

            if (!sol.converged)
                res.defects.push_back("instance " + std::to_string(i) + " lambda " +
                                      fmt12(cfg.lambda) + ": not converged");
            else if (!row.certified)
                res.defects.push_back("instance " + std::to_string(i) + " lambda " +
                                      fmt12(cfg.lambda) + ": extremal pair check failed");
            if (std::abs(row.objective_gap) > 1e-9 || row.linf_gap > 1e-6)
                res.defects.push_back("instance " + std::to_string(i) + " lambda " +
                                      fmt12(cfg.lambda) + ": objective gap " +
                                      fmt12(row.objective_gap) + ", linf gap " +
                                      fmt12(row.linf_gap));
        }
    });

    AgreementReport report;
    report.instances = opts.instances;
    std::ofstream csv;
    if (!opts.csv_path.empty()) {
        csv.open(opts.csv_path);
        csv << "instance_seed,lambda,objective_gap,linf_gap,certified\n";
    }
    for (const auto& res : results) {
        for (const auto& row : res.rows) {
            ++report.solves;
            report.max_objective_gap = std::max(report.max_objective_gap, row.objective_gap);
            report.max_linf_gap = std::max(report.max_linf_gap, row.linf_gap);
            if (std::abs(row.objective_gap) > 1e-9) ++report.objective_violations;
            if (row.linf_gap > 1e-6) ++report.linf_violations;
            if (!row.converged) ++report.nonconverged;
            else if (!row.certified) ++report.cert_failures;
            if (csv.is_open())
                csv << row.seed << ',' << fmt12(row.lambda) << ','
                    << fmt12(row.objective_gap) << ',' << fmt12(row.linf_gap) << ','
                    << (row.certified ? 1 : 0) << '\n';
        }
        for (const auto& d : res.defects) report.defects.push_back(d);
    }
    return report;
}

namespace {

enum CheckId {
    kResidualUpper = 0,
    kResidualLower,
    kSparsity,
    kEntropy,
    kL2Lower,
    kL2Upper,
    kL1General,
    kL1RnspRoute,
    kL1Ceiling,
    kCheckCount
};

const char* kCheckNames[kCheckCount] = {
    "residual-upper", "residual-lower", "sparsity-limit",
    "entropy-lower",  "l2-lower",       "l2-upper",
    "l1-general",     "l1-rnsp-route",  "l1-ceiling",
};

// Exact RICs per order, enumerated on demand.
class RicTable {
public:
    RicTable(const SensingMatrix& A) : A_(A) {
        budget_.max_order = static_cast<int>(A.cols());
    }
    double at(int order) {
        order = std::min<int>(order, static_cast<int>(A_.cols()));
        if (order <= 0) return 0.0;
        auto it = cache_.find(order);
        if (it != cache_.end()) return it->second;
        const double d = exact_ric(A_, order, budget_);
        cache_.emplace(order, d);
        return d;
    }

private:
    const SensingMatrix& A_;
    OracleBudget budget_;
    std::map<int, double> cache_;
};

struct CheckTally {
    long long checked[kCheckCount] = {};
    long long violations[kCheckCount] = {};
};

struct TheoremRow {
    std::uint64_t seed = 0;
    double lambda = 0.0;
    double delta_2k = 0.0, delta_s = 0.0, delta_err = 0.0;
    int flags[kCheckCount]; // 1 pass, 0 violated, -1 not applicable
};

} // namespace

long long TheoremSuiteReport::total_violations() const {
    long long total = 0;
    for (const auto& c : checks) total += c.violations;
    return total;
}

TheoremSuiteReport run_theorem_suite(const TheoremSuiteOptions& opts) {
    struct InstanceResult {
        bool used = false;       // passed the delta_2k filter and hit the regime
        bool rnsp_rejected = false;
        CheckTally tally;
        int solves = 0, out_of_regime = 0, cert_failures = 0, nonconverged = 0;
        std::vector<TheoremRow> rows;
        std::vector<std::string> defects;
    };

    // Rejection sampling over candidate seeds: small Gaussian matrices often
    // land delta_2k past 4/sqrt(41) where the null-space constants blow up, so
    // candidates are drawn in blocks until enough usable instances appear.
    std::vector<InstanceResult> all;
    int accepted = 0;
    std::uint64_t next_candidate = 0;
    const std::uint64_t candidate_cap =
        std::max<std::uint64_t>(10000, 1000ull * static_cast<std::uint64_t>(opts.instances));
    while (accepted < opts.instances) {
        if (next_candidate >= candidate_cap)
            throw std::runtime_error(
                "theorem suite: only " + std::to_string(accepted) + " of " +
                std::to_string(opts.instances) + " instances admit valid null-space "
                "constants after " + std::to_string(next_candidate) +
                " candidates; these dimensions are too coherent at this order");
        const int block = std::max(32, (opts.instances - accepted) * 3);
        std::vector<InstanceResult> batch(block);
        const std::uint64_t base = next_candidate;
        next_candidate += block;

        run_parallel(block, opts.threads, [&](int b) {
            InstanceResult& res = batch[b];
            const std::uint64_t cand = base + static_cast<std::uint64_t>(b);
            const std::uint64_t inst_seed = derive_seed(opts.seed, cand);
            const SensingMatrix A = gen_gaussian_matrix(opts.m, opts.N, derive_seed(inst_seed, 1));
            RicTable ric(A);

            // Past 4/sqrt(41) the null-space constants are invalid (rho >= 1);
            // such instances still exercise the pure-isometry checks but do
            // not count toward the target.
            const double delta_2k = ric.at(std::min(2 * opts.k, opts.N));
            const bool rnsp_valid = delta_2k < kRhoOneDelta;
            res.rnsp_rejected = !rnsp_valid;
            const RnspConstants consts =
                rnsp_valid ? rnsp_from_ric(delta_2k) : RnspConstants{};

            const GroundTruth truth = gen_sparse_signal(opts.N, opts.k, derive_seed(inst_seed, 2),
                                                        SignalDist::gaussian);
            const Observation obs =
                make_observation(A, truth, opts.noise_norm, derive_seed(inst_seed, 3));
            const double linf = lambda_inf(A, obs.y);
            const double lipschitz = spectral_norm_sq(A);
            const Eigen::VectorXd target = best_k(truth.signal, opts.k);
            const double target_l1 = target.lpNorm<1>();

            for (double f : opts.lambda_factors) {
                LassoConfig cfg;
                cfg.lambda = f * linf;
                cfg.gap_tol = opts.gap_tol;
                const LassoSolution sol = solve_lasso(A, obs.y, cfg, std::nullopt, lipschitz);
                ++res.solves;
                if (!sol.converged) {
                    ++res.nonconverged;
                    res.defects.push_back("candidate " + std::to_string(cand) + " lambda " +
                                          fmt12(cfg.lambda) + ": not converged");
                    continue;
                }
                if (!check_extremal_pair(sol, 1e-5).pass) {
                    ++res.cert_failures;
                    res.defects.push_back("candidate " + std::to_string(cand) + " lambda " +
                                          fmt12(cfg.lambda) + ": certification failed");
                }
                const double th = theta(obs.mu, cfg.lambda, opts.k);
                if (th > 1.0) {
                    ++res.out_of_regime;
                    continue;
                }
                res.used = res.used || rnsp_valid;

                const int s = sol.s_lambda;
                const double rr = sol.residual.norm() / cfg.lambda;
                const double l1_err = (sol.x - target).lpNorm<1>();
                const double l2_err = (sol.x - target).norm();
                const double delta_s = ric.at(s);
                const double delta_err = ric.at(std::min(s + opts.k, opts.N));

                TheoremRow row;
                row.seed = inst_seed;
                row.lambda = cfg.lambda;
                row.delta_2k = delta_2k;
                row.delta_s = delta_s;
                row.delta_err = delta_err;
                for (int c = 0; c < kCheckCount; ++c) row.flags[c] = -1;

                auto record = [&](CheckId id, bool violated, const std::string& what) {
                    ++res.tally.checked[id];
                    row.flags[id] = violated ? 0 : 1;
                    if (violated) {
                        ++res.tally.violations[id];
                        res.defects.push_back("candidate " + std::to_string(cand) + " lambda " +
                                              fmt12(cfg.lambda) + ": " + what);
                    }
                };

                // Rescaled residual upper bound from the null space
                // constants at delta_2k.
                if (rnsp_valid) {
                    const double up = residual_upper(consts.beta, th, opts.k);
                    record(kResidualUpper, exceeds(rr, up),
                           "residual-upper " + fmt12(rr) + " > " + fmt12(up));
                }

                // Rescaled residual lower bound at the exact RIC of order
                // s_lambda.
                const double lo = residual_lower(s, delta_s);
                record(kResidualLower, exceeds(lo, rr),
                       "residual-lower " + fmt12(lo) + " > " + fmt12(rr));

                // Sparsity limit s_lambda < t with t from delta_2k.
                if (rnsp_valid) {
                    const SparsityBound sb = sparsity_bound(delta_2k, consts.beta, th, opts.k);
                    record(kSparsity, s >= sb.t,
                           "sparsity " + std::to_string(s) + " >= " + std::to_string(sb.t));
                }

                // Entropy lower bound Ent(x)/(1+delta_s) <= (||r||/lambda)^2,
                // plus the Ent <= s domination.
                const double ent = entropy(sol.x);
                record(kEntropy,
                       exceeds(ent / (1.0 + delta_s), rr * rr) ||
                           exceeds(ent, static_cast<double>(s)),
                       "entropy bound violated: Ent " + fmt12(ent));

                // l2 sandwich; the error vector has at most s + k nonzeros so
                // delta_err is the right isometry order for both sides.
                const double l2_lo =
                    l2_bounds(std::max(delta_s, delta_err), 0.0, consts.beta, opts.k, s,
                              cfg.lambda, obs.mu).lower;
                record(kL2Lower, exceeds(l2_lo, l2_err),
                       "l2-lower " + fmt12(l2_lo) + " > " + fmt12(l2_err));
                if (rnsp_valid && delta_err < 1.0) {
                    const double l2_up = l2_bounds(0.0, delta_err, consts.beta, opts.k, s,
                                                   cfg.lambda, obs.mu).upper;
                    record(kL2Upper, exceeds(l2_err, l2_up),
                           "l2-upper " + fmt12(l2_err) + " > " + fmt12(l2_up));
                }

                // l1 bound; valid once the error sparsity is inside the
                // Cauchy-Schwarz budget (1 + (1+delta)(beta+theta)^2) k.
                const double delta_big = std::max(delta_2k, delta_err);
                if (rnsp_valid && delta_big < 1.0) {
                    const double budget_sparsity =
                        (1.0 + (1.0 + delta_big) * (consts.beta + th) * (consts.beta + th)) * opts.k;
                    if (s + opts.k <= budget_sparsity) {
                        const double l1_up =
                            l1_bounds(delta_big, consts.beta, th, opts.k, cfg.lambda, obs.mu).general;
                        record(kL1General, exceeds(l1_err, l1_up),
                               "l1-general " + fmt12(l1_err) + " > " + fmt12(l1_up));
                    }
                }

                // Alternative l1 route through the null space property.
                if (rnsp_valid) {
                    const RnspRouteBound route =
                        l1_bound_rnsp_route(consts.rho, consts.beta, th, opts.k, cfg.lambda,
                                            sol.residual.norm(), obs.mu);
                    record(kL1RnspRoute, exceeds(l1_err, route.from_residual),
                           "l1-rnsp-route " + fmt12(l1_err) + " > " + fmt12(route.from_residual));
                }

                // l1 ceiling: while the residual exceeds mu, the minimizer's
                // l1 mass stays below the target's.
                if (sol.residual.norm() > obs.mu) {
                    record(kL1Ceiling, sol.x.lpNorm<1>() > target_l1 + 1e-10,
                           "l1-ceiling " + fmt12(sol.x.lpNorm<1>()) + " > " + fmt12(target_l1));
                }
                res.rows.push_back(row);
            }
        });

        for (auto& res : batch) {
            if (accepted >= opts.instances) break; // extras in the last block are dropped
            all.push_back(std::move(res));
            if (all.back().used) ++accepted;
        }
    }

    TheoremSuiteReport report;
    report.checks.resize(kCheckCount);
    for (int c = 0; c < kCheckCount; ++c) report.checks[c].name = kCheckNames[c];

    std::ofstream csv;
    if (!opts.csv_path.empty()) {
        csv.open(opts.csv_path);
        csv << "instance_seed,lambda,delta_2k,delta_s,delta_err";
        for (int c = 0; c < kCheckCount; ++c) csv << ',' << kCheckNames[c];
        csv << '\n';
    }
    for (const auto& res : all) {
        if (res.rnsp_rejected) ++report.rejected;
        if (res.used) ++report.instances;
        report.solves += res.solves;
        report.out_of_regime += res.out_of_regime;
        report.cert_failures += res.cert_failures;
        report.nonconverged += res.nonconverged;
        for (int c = 0; c < kCheckCount; ++c) {
            report.checks[c].checked += res.tally.checked[c];
            report.checks[c].violations += res.tally.violations[c];
        }
        for (const auto& d : res.defects) report.defects.push_back(d);
        if (csv.is_open()) {
            for (const auto& row : res.rows) {
                csv << row.seed << ',' << fmt12(row.lambda) << ',' << fmt12(row.delta_2k)
                    << ',' << fmt12(row.delta_s) << ',' << fmt12(row.delta_err);
                for (int c = 0; c < kCheckCount; ++c) csv << ',' << row.flags[c];
                csv << '\n';
            }
        }
    }
    return report;
}

} // namespace sparselab
