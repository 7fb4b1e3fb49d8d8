#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sparselab/bounds.hpp"
#include "sparselab/checks.hpp"
#include "sparselab/experiments.hpp"
#include "sparselab/io.hpp"
#include "sparselab/problem.hpp"
#include "sparselab/rng.hpp"
#include "sparselab/solver.hpp"

namespace {

using namespace sparselab;

// Exit codes are stable: 0 success, 1 argument error, 2 solver
// non-convergence, 3 acceptance-check failure, 4 I/O error.
constexpr int kOk = 0;
constexpr int kArgError = 1;
constexpr int kNoConvergence = 2;
constexpr int kCheckFailure = 3;
constexpr int kIoError = 4;

std::string default_out_dir() {
    const char* env = std::getenv("SPARSELAB_OUT_DIR");
    return env && *env ? env : ".";
}

struct GenFlags {
    int m = 0, N = 0, k = 0;
    std::uint64_t seed = 1;
    std::string dist = "gaussian";
    double noise = 0.0;
    std::string out_dir;
};

struct SolveFlags {
    std::string matrix_csv, y_csv;
    int m = 0, N = 0, k = 0;
    std::uint64_t seed = 1;
    std::string dist = "gaussian";
    double noise = 0.0;
    double lambda = 0.0, lambda_rel = 0.0;
    double gap_tol = 1e-10, kkt_tol = 1e-5, support_rel_tol = 0.0;
    int max_iter = 50000;
    std::string out;
};

struct SweepFlags {
    std::string config;
    std::string out_dir;
    int threads = 0;
};

struct BoundsFlags {
    double delta = 0.7;
    int k = 1;
    double lambda = 1.0, mu = 0.0;
    long long s_lambda = -1;
    std::string csv;
};

struct OracleFlags {
    int instances = 200;
    std::uint64_t seed = 2024;
    int max_cols = 14, max_order = 6;
    double gap_tol = 1e-15;
    int theorem_instances = 200;
    int threads = 0;
    std::string csv_dir;
};

SignalDist parse_dist(const std::string& name) {
    if (name == "gaussian") return SignalDist::gaussian;
    if (name == "rademacher") return SignalDist::rademacher;
    throw CLI::ValidationError("--dist must be gaussian or rademacher");
}

int cmd_gen(const GenFlags& flags) {
    const std::string dir = flags.out_dir.empty() ? default_out_dir() : flags.out_dir;
    std::filesystem::create_directories(dir);
    const SensingMatrix A = gen_gaussian_matrix(flags.m, flags.N, derive_seed(flags.seed, 1));
    const GroundTruth truth =
        gen_sparse_signal(flags.N, flags.k, derive_seed(flags.seed, 2), parse_dist(flags.dist));
    const Observation obs = make_observation(A, truth, flags.noise, derive_seed(flags.seed, 3));
    write_matrix_csv(dir + "/A.csv", A);
    write_vector_csv(dir + "/x_true.csv", truth.signal);
    write_vector_csv(dir + "/y.csv", obs.y);
    std::cout << "m=" << flags.m << " N=" << flags.N << " k=" << flags.k
              << " seed=" << flags.seed << '\n'
              << "lambda_inf=" << fmt12(lambda_inf(A, obs.y)) << " mu=" << fmt12(obs.mu)
              << '\n'
              << "wrote " << dir << "/A.csv, x_true.csv, y.csv\n";
    return kOk;
}

int cmd_solve(const SolveFlags& flags) {
    SensingMatrix A;
    Eigen::VectorXd y;
    if (!flags.matrix_csv.empty()) {
        A = read_matrix_csv(flags.matrix_csv);
        if (flags.y_csv.empty())
            throw CLI::ValidationError("--y-csv is required with --matrix-csv");
        y = read_vector_csv(flags.y_csv);
    } else {
        if (flags.m < 1 || flags.N < 1)
            throw CLI::ValidationError("either --matrix-csv or --m/--N must be given");
        A = gen_gaussian_matrix(flags.m, flags.N, derive_seed(flags.seed, 1));
        const GroundTruth truth =
            gen_sparse_signal(flags.N, flags.k, derive_seed(flags.seed, 2), parse_dist(flags.dist));
        y = make_observation(A, truth, flags.noise, derive_seed(flags.seed, 3)).y;
    }

    const double linf = lambda_inf(A, y);
    LassoConfig cfg;
    if (flags.lambda > 0.0 && flags.lambda_rel > 0.0)
        throw CLI::ValidationError("give --lambda or --lambda-rel, not both");
    if (flags.lambda > 0.0) cfg.lambda = flags.lambda;
    else if (flags.lambda_rel > 0.0) cfg.lambda = flags.lambda_rel * linf;
    else throw CLI::ValidationError("one of --lambda/--lambda-rel is required");
    cfg.gap_tol = flags.gap_tol;
    cfg.kkt_tol = flags.kkt_tol;
    cfg.max_iter = flags.max_iter;
    cfg.support_rel_tol = flags.support_rel_tol;

    const LassoSolution sol = solve_lasso(A, y, cfg);
    std::cout << "lambda=" << fmt12(sol.lambda) << '\n'
              << "lambda_inf=" << fmt12(linf) << '\n'
              << "s_lambda=" << sol.s_lambda << '\n'
              << "rescaled_residual=" << fmt12(sol.residual.norm() / sol.lambda) << '\n'
              << "duality_gap=" << fmt12(sol.duality_gap) << '\n'
              << "pairing_defect=" << fmt12(sol.pairing_defect) << '\n'
              << "atr_inf=" << fmt12(sol.atr_inf) << '\n'
              << "iterations=" << sol.iterations << '\n'
              << "converged=" << (sol.converged ? "yes" : "no") << '\n';
    if (!flags.out.empty()) {
        write_solution_csv(flags.out, sol);
        std::cout << "wrote " << flags.out << '\n';
    }
    return sol.converged ? kOk : kNoConvergence;
}

int cmd_sweep(const SweepFlags& flags) {
    const SweepConfig config = parse_sweep_config(flags.config);
    const std::string dir = flags.out_dir.empty() ? default_out_dir() : flags.out_dir;
    std::filesystem::create_directories(dir);
    const auto records = run_sweep(config, flags.threads);

    for (double noise : config.noise_levels) {
        std::vector<SweepRecord> slice;
        for (const auto& r : records)
            if (r.noise_level == noise) slice.push_back(r);
        char tag[32];
        std::snprintf(tag, sizeof(tag), "%g", noise);

        std::ofstream full(dir + "/sweep_" + tag + ".csv");
        if (!full) throw std::runtime_error("cannot write sweep CSV in " + dir);
        full << sweep_csv_header() << '\n';
        for (const auto& r : slice) full << sweep_csv_row(r) << '\n';
        full.close();

        for (Figure f : {Figure::support, Figure::l1norm, Figure::residual,
                         Figure::entropy, Figure::l1error})
            emit_figure_data(slice, f, dir + "/" + figure_name(f) + "_" + tag + ".csv");

        // Summary: peaks over the grid.
        const SweepRecord* peak_s = &slice.front();
        const SweepRecord* peak_rr = &slice.front();
        for (const auto& r : slice) {
            if (r.s_mean > peak_s->s_mean) peak_s = &r;
            if (r.rescaled_residual_mean > peak_rr->rescaled_residual_mean) peak_rr = &r;
        }
        std::cout << "noise " << tag << ": peak mean s_lambda " << fmt12(peak_s->s_mean)
                  << " at lambda " << fmt12(peak_s->lambda) << "; peak rescaled residual "
                  << fmt12(peak_rr->rescaled_residual_mean) << " at lambda "
                  << fmt12(peak_rr->lambda) << '\n';
    }
    std::cout << "wrote " << records.size() << " sweep rows to " << dir << '\n';
    return kOk;
}

int cmd_bounds(const BoundsFlags& flags) {
    std::optional<long long> s;
    if (flags.s_lambda >= 0) s = flags.s_lambda;
    const BoundReport r = evaluate_bound_report(flags.delta, flags.k, flags.lambda, flags.mu, s);
    const double chi_sq = (1.0 + r.delta) * (r.beta + r.theta) * (r.beta + r.theta);
    const long long t_per_k = sparsity_bound(r.delta, r.beta, r.theta, 1).t;

    std::cout << "delta                 = " << fmt12(r.delta) << '\n'
              << "rho                   = " << fmt12(r.rho) << '\n'
              << "beta                  = " << fmt12(r.beta) << '\n'
              << "theta                 = " << fmt12(r.theta) << '\n';
    if (!r.in_regime)
        std::cout << "warning: theta > 1, outside the analyzed regime\n";
    std::cout << "chi                   = " << fmt12(r.chi) << '\n'
              << "chi_squared (1+d)(b+t)^2 = " << fmt12(chi_sq) << '\n'
              << "sparsity limit t      = " << r.sparsity_limit << " (k = " << r.k << ")\n"
              << "t per unit k          = " << t_per_k << '\n'
              << "observations t/d^2    = " << fmt12(static_cast<double>(t_per_k) /
                                                     (r.delta * r.delta)) << '\n'
              << "residual upper        = " << fmt12(r.residual_upper) << '\n'
              << "residual lower        = " << fmt12(r.residual_lower) << '\n'
              << "l2 lower              = " << fmt12(r.l2_lower) << '\n'
              << "l2 upper              = " << fmt12(r.l2_upper) << '\n'
              << "l1 upper              = " << fmt12(r.l1_upper) << '\n'
              << "l1 upper improved     = " << fmt12(r.l1_upper_improved) << '\n';
    if (!flags.csv.empty()) {
        std::ofstream out(flags.csv);
        if (!out) throw std::runtime_error("cannot write " + flags.csv);
        out << bound_report_csv_header() << '\n' << bound_report_csv_row(r) << '\n';
        std::cout << "wrote " << flags.csv << '\n';
    }
    return kOk;
}

int cmd_oracle_check(const OracleFlags& flags) {
    AgreementOptions agree;
    agree.instances = flags.instances;
    agree.seed = flags.seed;
    agree.gap_tol = flags.gap_tol;
    agree.budget.max_cols = flags.max_cols;
    agree.budget.max_order = flags.max_order;
    agree.threads = flags.threads;
    if (!flags.csv_dir.empty()) {
        std::filesystem::create_directories(flags.csv_dir);
        agree.csv_path = flags.csv_dir + "/oracle_agreement.csv";
    }
    if (flags.max_cols > 14)
        throw CLI::ValidationError("--max-cols beyond 14 exceeds the enumeration budget");

    std::cout << "solver-vs-oracle agreement: " << agree.instances << " instances, "
              << agree.lambda_factors.size() << " lambdas each\n";
    const AgreementReport ar = run_agreement_suite(agree);
    std::cout << "  solves " << ar.solves << ", max objective gap "
              << fmt12(ar.max_objective_gap) << ", max linf gap " << fmt12(ar.max_linf_gap)
              << ", defects " << ar.defects.size() << '\n';

    TheoremSuiteOptions thm;
    thm.instances = flags.theorem_instances;
    thm.seed = derive_seed(flags.seed, 0x7EA1u);
    thm.threads = flags.threads;
    if (!flags.csv_dir.empty()) thm.csv_path = flags.csv_dir + "/oracle_theorems.csv";

    std::cout << "exact-RIC theorem suite: " << thm.instances << " instances\n";
    const TheoremSuiteReport tr = run_theorem_suite(thm);
    for (const auto& c : tr.checks)
        std::cout << "  " << c.name << ": " << c.checked << " checked, " << c.violations
                  << " violations\n";
    std::cout << "  out-of-regime solves skipped: " << tr.out_of_regime
              << "; candidates rejected by the delta filter: " << tr.rejected << '\n';

    const bool ok = ar.pass() && tr.pass();
    if (!ok) {
        for (const auto& d : ar.defects) std::cout << "defect: " << d << '\n';
        for (const auto& d : tr.defects) std::cout << "defect: " << d << '\n';
        std::cout << "FAIL\n";
        return kCheckFailure;
    }
    std::cout << "PASS\n";
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sparse recovery laboratory: l1-regularized least squares, "
                 "closed-form recovery bounds, brute-force oracles and lambda sweeps"};
    app.require_subcommand(1);

    GenFlags gen;
    auto* cgen = app.add_subcommand("gen", "generate a problem instance and write CSVs");
    cgen->add_option("--m", gen.m, "observation count")->required();
    cgen->add_option("--n,--N", gen.N, "signal length")->required();
    cgen->add_option("--k", gen.k, "sparsity of the ground truth")->required();
    cgen->add_option("--seed", gen.seed, "instance seed (default 1)");
    cgen->add_option("--dist", gen.dist, "nonzero distribution: gaussian|rademacher");
    cgen->add_option("--noise", gen.noise, "noise l2 norm (default 0)");
    cgen->add_option("--out-dir", gen.out_dir, "output directory (default $SPARSELAB_OUT_DIR or .)");

    SolveFlags solve;
    auto* csolve = app.add_subcommand("solve", "solve one LASSO instance with certificates");
    csolve->add_option("--matrix-csv", solve.matrix_csv, "sensing matrix CSV path");
    csolve->add_option("--y-csv", solve.y_csv, "observation vector CSV path");
    csolve->add_option("--m", solve.m, "rows when generating");
    csolve->add_option("--n,--N", solve.N, "cols when generating");
    csolve->add_option("--k", solve.k, "sparsity when generating");
    csolve->add_option("--seed", solve.seed, "instance seed when generating (default 1)");
    csolve->add_option("--dist", solve.dist, "nonzero distribution when generating");
    csolve->add_option("--noise", solve.noise, "noise l2 norm when generating (default 0)");
    csolve->add_option("--lambda", solve.lambda, "absolute lambda");
    csolve->add_option("--lambda-rel", solve.lambda_rel, "lambda as a fraction of lambda_inf");
    csolve->add_option("--gap-tol", solve.gap_tol, "relative duality gap tolerance (default 1e-10)");
    csolve->add_option("--kkt-tol", solve.kkt_tol, "certification tolerance (default 1e-5)");
    csolve->add_option("--max-iter", solve.max_iter, "iteration cap (default 50000)");
    csolve->add_option("--support-rel-tol", solve.support_rel_tol,
                       "support magnitude floor (default 0 = exact nonzeros)");
    csolve->add_option("--out", solve.out, "write the solution CSV here");

    SweepFlags sweep;
    auto* csweep = app.add_subcommand("sweep", "run a lambda sweep and emit figure datasets");
    csweep->add_option("--config", sweep.config, "sweep config file")->required();
    csweep->add_option("--out-dir", sweep.out_dir, "output directory (default $SPARSELAB_OUT_DIR or .)");
    csweep->add_option("--threads", sweep.threads, "worker cap (default: machine parallelism)");

    BoundsFlags bounds;
    auto* cbounds = app.add_subcommand("bounds", "evaluate all closed-form bounds");
    cbounds->add_option("--delta", bounds.delta, "restricted isometry constant in (0,1)")->required();
    cbounds->add_option("--k", bounds.k, "sparsity order")->required();
    cbounds->add_option("--lambda", bounds.lambda, "lambda")->required();
    cbounds->add_option("--mu", bounds.mu, "small scale sigma_k + noise norm")->required();
    cbounds->add_option("--s-lambda", bounds.s_lambda, "measured support size (optional)");
    cbounds->add_option("--csv", bounds.csv, "also write the report as a CSV row");

    OracleFlags oracle;
    auto* coracle = app.add_subcommand("oracle-check",
                                       "run solver-vs-oracle agreement and exact-RIC theorem checks");
    coracle->add_option("--instances", oracle.instances, "agreement instances (default 200)");
    coracle->add_option("--theorem-instances", oracle.theorem_instances,
                        "theorem-suite instances (default 200)");
    coracle->add_option("--seed", oracle.seed, "suite seed (default 2024)");
    coracle->add_option("--max-cols", oracle.max_cols, "enumeration ceiling (default 14)");
    coracle->add_option("--max-order", oracle.max_order, "RIC order ceiling (default 6)");
    coracle->add_option("--gap-tol", oracle.gap_tol, "solver gap tolerance (default 1e-15)");
    coracle->add_option("--threads", oracle.threads, "worker cap (default: machine parallelism)");
    coracle->add_option("--csv-dir", oracle.csv_dir, "write per-solve report CSVs here");

    try {
        app.parse(argc, argv);
        if (*cgen) return cmd_gen(gen);
        if (*csolve) return cmd_solve(solve);
        if (*csweep) return cmd_sweep(sweep);
        if (*cbounds) return cmd_bounds(bounds);
        if (*coracle) return cmd_oracle_check(oracle);
        return kArgError;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kArgError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kArgError;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kCheckFailure;
    }
}
