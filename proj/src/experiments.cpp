#include "sparselab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "sparselab/bounds.hpp"
#include "sparselab/io.hpp"
#include "sparselab/rng.hpp"
#include "sparselab/solver.hpp"

namespace sparselab {

std::vector<double> LambdaGrid::factors() const {
    std::vector<double> f;
    switch (mode) {
    case Mode::log: {
        if (count < 2) throw std::invalid_argument("lambda grid: count must be >= 2");
        if (!(min_factor > 0.0 && min_factor < 1.0))
            throw std::invalid_argument("lambda grid: min_factor must lie in (0, 1)");
        f.resize(count);
        for (int i = 0; i < count; ++i)
            f[i] = std::pow(min_factor, static_cast<double>(i) / (count - 1));
        break;
    }
    case Mode::linear: {
        if (count < 2) throw std::invalid_argument("lambda grid: count must be >= 2");
        if (!(min_factor > 0.0 && min_factor < 1.0))
            throw std::invalid_argument("lambda grid: min_factor must lie in (0, 1)");
        f.resize(count);
        for (int i = 0; i < count; ++i)
            f[i] = 1.0 - (1.0 - min_factor) * static_cast<double>(i) / (count - 1);
        break;
    }
    case Mode::explicit_values: {
        if (values.empty()) throw std::invalid_argument("lambda grid: explicit mode needs values");
        f = values;
        for (double v : f)
            if (!(v > 0.0)) throw std::invalid_argument("lambda grid: factors must be > 0");
        std::sort(f.begin(), f.end(), std::greater<double>());
        break;
    }
    }
    return f;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<double> parse_double_list(const std::string& value) {
    std::vector<double> out;
    std::istringstream is(value);
    std::string item;
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
}

bool parse_bool(const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw std::invalid_argument("config: expected true/false, got '" + value + "'");
}

} // namespace

SweepConfig parse_sweep_config_text(const std::string& text) {
    SweepConfig cfg;
    bool have_m = false, have_n = false, have_k = false, have_noise = false,
         have_trials = false;

    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "m") { cfg.m = std::stoi(value); have_m = true; }
        else if (key == "N") { cfg.N = std::stoi(value); have_n = true; }
        else if (key == "k") { cfg.k = std::stoi(value); have_k = true; }
        else if (key == "noise_levels") { cfg.noise_levels = parse_double_list(value); have_noise = true; }
        else if (key == "trials") { cfg.trials = std::stoi(value); have_trials = true; }
        else if (key == "base_seed") { cfg.base_seed = std::stoull(value); }
        else if (key == "lambda_grid.mode") {
            if (value == "log") cfg.lambda_grid.mode = LambdaGrid::Mode::log;
            else if (value == "linear") cfg.lambda_grid.mode = LambdaGrid::Mode::linear;
            else if (value == "explicit") cfg.lambda_grid.mode = LambdaGrid::Mode::explicit_values;
            else throw std::invalid_argument("config: unknown lambda_grid.mode '" + value + "'");
        }
        else if (key == "lambda_grid.count") { cfg.lambda_grid.count = std::stoi(value); }
        else if (key == "lambda_grid.min_factor") { cfg.lambda_grid.min_factor = std::stod(value); }
        else if (key == "lambda_grid.values") { cfg.lambda_grid.values = parse_double_list(value); }
        else if (key == "delta_for_bounds") { cfg.delta_for_bounds = std::stod(value); }
        else if (key == "warm_start") { cfg.warm_start = parse_bool(value); }
        else if (key == "signal_dist") {
            if (value == "gaussian") cfg.signal_dist = SignalDist::gaussian;
            else if (value == "rademacher") cfg.signal_dist = SignalDist::rademacher;
            else throw std::invalid_argument("config: unknown signal_dist '" + value + "'");
        }
        else throw std::invalid_argument("config line " + std::to_string(lineno) +
                                         ": unknown key '" + key + "'");
    }

    if (!have_m || !have_n || !have_k || !have_noise || !have_trials)
        throw std::invalid_argument("config: m, N, k, noise_levels and trials are required");
    if (cfg.m < 1 || cfg.N < cfg.m) throw std::invalid_argument("config: need 1 <= m <= N");
    if (cfg.k < 0 || cfg.k > cfg.N) throw std::invalid_argument("config: need 0 <= k <= N");
    if (cfg.noise_levels.empty()) throw std::invalid_argument("config: noise_levels is empty");
    for (double nl : cfg.noise_levels)
        if (nl < 0.0) throw std::invalid_argument("config: noise levels must be >= 0");
    if (cfg.trials < 1) throw std::invalid_argument("config: trials must be >= 1");
    if (!(cfg.delta_for_bounds > 0.0 && cfg.delta_for_bounds < 1.0))
        throw std::invalid_argument("config: delta_for_bounds must lie in (0, 1)");
    cfg.lambda_grid.factors(); // validates grid parameters
    return cfg;
}

SweepConfig parse_sweep_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_sweep_config_text(buffer.str());
}

namespace {

// Per-(trial, grid point) measurements; trial results are aggregated in fixed
// trial order so threading never changes the output.
struct TrialPoint {
    double s = 0.0;
    double l1_norm = 0.0;
    double rescaled_residual = 0.0;
    double residual_norm = 0.0;
    double entropy_value = 0.0;
    double l1_error = 0.0;
    double l2_error = 0.0;
    bool flagged = false;
};

struct TrialResult {
    double lambda_inf_value = 0.0;
    double mu = 0.0;
    double target_l1 = 0.0;
    std::vector<TrialPoint> points;
};

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
};

MeanStd aggregate(const std::vector<double>& v) {
    MeanStd ms;
    if (v.empty()) return ms;
    double sum = 0.0;
    for (double x : v) sum += x;
    ms.mean = sum / static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - ms.mean) * (x - ms.mean);
        ms.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    return ms;
}

void parallel_for(int count, int threads, const std::function<void(int)>& body) {
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
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
        });
    for (auto& th : pool) th.join();
}

} // namespace

std::vector<SweepRecord> run_sweep(const SweepConfig& config, int threads) {
    const std::vector<double> factors = config.lambda_grid.factors();
    const int points = static_cast<int>(factors.size());
    const RnspConstants consts = rnsp_from_ric(config.delta_for_bounds);

    std::vector<SweepRecord> records;
    records.reserve(config.noise_levels.size() * points);

    for (double noise_level : config.noise_levels) {
        std::vector<TrialResult> results(config.trials);

        parallel_for(config.trials, threads, [&](int trial) {
            const std::uint64_t trial_seed = config.base_seed + static_cast<std::uint64_t>(trial);
            const SensingMatrix A =
                gen_gaussian_matrix(config.m, config.N, derive_seed(trial_seed, 1));
            const GroundTruth truth =
                gen_sparse_signal(config.N, config.k, derive_seed(trial_seed, 2), config.signal_dist);
            const Observation obs =
                make_observation(A, truth, noise_level, derive_seed(trial_seed, 3));
            const double linf = lambda_inf(A, obs.y);
            const Eigen::VectorXd target = best_k(truth.signal, config.k);
            const double lipschitz = spectral_norm_sq(A);

            TrialResult& res = results[trial];
            res.lambda_inf_value = linf;
            res.mu = obs.mu;
            res.target_l1 = target.lpNorm<1>();
            res.points.resize(points);

            LassoConfig solver_cfg;
            std::optional<Eigen::VectorXd> warm;
            for (int j = 0; j < points; ++j) {
                solver_cfg.lambda = factors[j] * linf;
                const LassoSolution sol =
                    solve_lasso(A, obs.y, solver_cfg, warm, lipschitz);
                const auto cert = check_extremal_pair(sol, solver_cfg.kkt_tol);

                TrialPoint& p = res.points[j];
                p.flagged = !sol.converged || !cert.pass;
                p.s = sol.s_lambda;
                p.l1_norm = sol.x.lpNorm<1>();
                p.residual_norm = sol.residual.norm();
                p.rescaled_residual = p.residual_norm / sol.lambda;
                p.entropy_value = entropy(sol.x);
                p.l1_error = (sol.x - target).lpNorm<1>();
                p.l2_error = (sol.x - target).norm();
                if (config.warm_start) warm = sol.x;
            }
        });

        double mu_sum = 0.0, linf_sum = 0.0, target_sum = 0.0;
        for (const auto& res : results) {
            mu_sum += res.mu;
            linf_sum += res.lambda_inf_value;
            target_sum += res.target_l1;
        }
        const double mu_row = mu_sum / config.trials;
        const double linf_row = linf_sum / config.trials;

        for (int j = 0; j < points; ++j) {
            SweepRecord r;
            r.noise_level = noise_level;
            r.lambda_factor = factors[j];
            r.lambda = factors[j] * linf_row;
            r.lambda_inf_mean = linf_row;
            r.mu = mu_row;
            r.theta = theta(mu_row, r.lambda, config.k);
            r.in_regime = r.theta <= 1.0;
            r.trials = config.trials;
            r.delta_used = config.delta_for_bounds;
            r.k = config.k;
            r.target_l1_mean = target_sum / config.trials;

            std::vector<double> s, l1n, rr, rn, ent, e1, e2;
            for (const auto& res : results) {
                const TrialPoint& p = res.points[j];
                if (p.flagged) { ++r.defects; continue; }
                s.push_back(p.s);
                l1n.push_back(p.l1_norm);
                rr.push_back(p.rescaled_residual);
                rn.push_back(p.residual_norm);
                ent.push_back(p.entropy_value);
                e1.push_back(p.l1_error);
                e2.push_back(p.l2_error);
            }
            const MeanStd ms_s = aggregate(s), ms_l1 = aggregate(l1n), ms_rr = aggregate(rr),
                          ms_ent = aggregate(ent), ms_e1 = aggregate(e1), ms_e2 = aggregate(e2);
            r.s_mean = ms_s.mean; r.s_std = ms_s.std;
            r.l1_norm_mean = ms_l1.mean; r.l1_norm_std = ms_l1.std;
            r.rescaled_residual_mean = ms_rr.mean; r.rescaled_residual_std = ms_rr.std;
            r.residual_norm_mean = aggregate(rn).mean;
            r.entropy_mean = ms_ent.mean; r.entropy_std = ms_ent.std;
            r.l1_error_mean = ms_e1.mean; r.l1_error_std = ms_e1.std;
            r.l2_error_mean = ms_e2.mean; r.l2_error_std = ms_e2.std;

            r.residual_upper = residual_upper(consts.beta, r.theta, config.k);
            // Overlays take the real-valued mean support where the per-solve
            // bounds take an integer s_lambda.
            r.residual_lower_from_mean_support = std::sqrt(r.s_mean / (1.0 + r.delta_used));
            const SparsityBound sb = sparsity_bound(r.delta_used, consts.beta, r.theta, config.k);
            r.sparsity_limit = sb.t;
            r.chi = sb.chi;
            r.l1_upper_improved =
                l1_bounds(r.delta_used, consts.beta, r.theta, config.k, r.lambda, r.mu).improved;
            r.l2_lower = (std::sqrt(r.s_mean) * r.lambda / std::sqrt(1.0 + r.delta_used) - r.mu) /
                         std::sqrt(1.0 + r.delta_used);
            r.l2_upper = l2_bounds(r.delta_used, r.delta_used, consts.beta, config.k, 0,
                                   r.lambda, r.mu).upper;
            records.push_back(std::move(r));
        }
    }
    return records;
}

std::string sweep_csv_header() {
    return "noise_level,lambda_factor,lambda,lambda_inf_mean,mu,theta,in_regime,"
           "trials,defects,s_mean,s_std,l1_norm_mean,l1_norm_std,"
           "rescaled_residual_mean,rescaled_residual_std,residual_norm_mean,"
           "entropy_mean,entropy_std,l1_error_mean,l1_error_std,l2_error_mean,"
           "l2_error_std,target_l1_mean,residual_upper,"
           "residual_lower_from_mean_support,sparsity_limit,chi,"
           "l1_upper_improved,l2_upper,l2_lower,delta_used,k";
}

std::string sweep_csv_row(const SweepRecord& r) {
    std::ostringstream os;
    os << fmt12(r.noise_level) << ',' << fmt12(r.lambda_factor) << ',' << fmt12(r.lambda)
       << ',' << fmt12(r.lambda_inf_mean) << ',' << fmt12(r.mu) << ',' << fmt12(r.theta)
       << ',' << (r.in_regime ? 1 : 0) << ',' << r.trials << ',' << r.defects << ','
       << fmt12(r.s_mean) << ',' << fmt12(r.s_std) << ',' << fmt12(r.l1_norm_mean) << ','
       << fmt12(r.l1_norm_std) << ',' << fmt12(r.rescaled_residual_mean) << ','
       << fmt12(r.rescaled_residual_std) << ',' << fmt12(r.residual_norm_mean) << ','
       << fmt12(r.entropy_mean) << ',' << fmt12(r.entropy_std) << ','
       << fmt12(r.l1_error_mean) << ',' << fmt12(r.l1_error_std) << ','
       << fmt12(r.l2_error_mean) << ',' << fmt12(r.l2_error_std) << ','
       << fmt12(r.target_l1_mean) << ',' << fmt12(r.residual_upper) << ','
       << fmt12(r.residual_lower_from_mean_support) << ',' << r.sparsity_limit << ','
       << fmt12(r.chi) << ',' << fmt12(r.l1_upper_improved) << ',' << fmt12(r.l2_upper)
       << ',' << fmt12(r.l2_lower) << ',' << fmt12(r.delta_used) << ',' << r.k;
    return os.str();
}

std::string figure_name(Figure f) {
    switch (f) {
    case Figure::support: return "support";
    case Figure::l1norm: return "l1norm";
    case Figure::residual: return "residual";
    case Figure::entropy: return "entropy";
    case Figure::l1error: return "l1error";
    }
    return "";
}

Figure figure_from_name(const std::string& name) {
    if (name == "support") return Figure::support;
    if (name == "l1norm") return Figure::l1norm;
    if (name == "residual") return Figure::residual;
    if (name == "entropy") return Figure::entropy;
    if (name == "l1error") return Figure::l1error;
    throw std::invalid_argument("unknown figure name: " + name);
}

namespace {

// E[z^2] recovered from the recorded sample mean/std.
double mean_square(double mean, double std, int n) {
    if (n <= 1) return mean * mean;
    return mean * mean + std * std * static_cast<double>(n - 1) / n;
}

void write_gnuplot(const std::string& csv_path, Figure figure,
                   const std::vector<std::pair<int, std::string>>& series) {
    const auto slash = csv_path.find_last_of('/');
    const std::string dir = slash == std::string::npos ? "" : csv_path.substr(0, slash + 1);
    const std::string file = slash == std::string::npos ? csv_path : csv_path.substr(slash + 1);
    const std::string base = file.substr(0, file.find_last_of('.'));

    std::ofstream out(dir + base + ".gp");
    if (!out) throw std::runtime_error("cannot write plot script for " + csv_path);
    out << "set datafile separator ','\n"
        << "set logscale x\n"
        << "set xlabel 'lambda'\n"
        << "set title '" << figure_name(figure) << "'\n"
        << "set key top left\n"
        << "plot ";
    for (size_t i = 0; i < series.size(); ++i) {
        if (i) out << ", \\\n     ";
        out << "'" << file << "' using 1:" << series[i].first
            << " with lines title '" << series[i].second << "'";
    }
    out << '\n';
}

} // namespace

void emit_figure_data(const std::vector<SweepRecord>& records, Figure figure,
                      const std::string& path) {
    if (records.empty()) throw std::invalid_argument("emit_figure_data: no records");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);

    std::vector<std::pair<int, std::string>> series;
    switch (figure) {
    case Figure::support:
        out << "lambda,s_mean,s_std,sparsity_limit,k\n";
        for (const auto& r : records)
            out << fmt12(r.lambda) << ',' << fmt12(r.s_mean) << ',' << fmt12(r.s_std)
                << ',' << r.sparsity_limit << ',' << r.k << '\n';
        series = {{2, "mean support"}, {4, "sparsity limit"}, {5, "k"}};
        break;
    case Figure::l1norm:
        out << "lambda,l1_norm_mean,l1_norm_std,target_l1_mean\n";
        for (const auto& r : records)
            out << fmt12(r.lambda) << ',' << fmt12(r.l1_norm_mean) << ','
                << fmt12(r.l1_norm_std) << ',' << fmt12(r.target_l1_mean) << '\n';
        series = {{2, "mean l1 norm"}, {4, "target l1 norm"}};
        break;
    case Figure::residual:
        out << "lambda,rescaled_residual_mean,rescaled_residual_std,"
               "residual_upper,residual_lower_from_mean_support\n";
        for (const auto& r : records)
            out << fmt12(r.lambda) << ',' << fmt12(r.rescaled_residual_mean) << ','
                << fmt12(r.rescaled_residual_std) << ',' << fmt12(r.residual_upper)
                << ',' << fmt12(r.residual_lower_from_mean_support) << '\n';
        series = {{2, "rescaled residual"}, {4, "upper bound"}, {5, "lower bound"}};
        break;
    case Figure::entropy:
        out << "lambda,entropy_over_one_plus_delta,support_over_one_plus_delta,"
               "rescaled_residual_sq_mean\n";
        for (const auto& r : records) {
            const double d = 1.0 + r.delta_used;
            out << fmt12(r.lambda) << ',' << fmt12(r.entropy_mean / d) << ','
                << fmt12(r.s_mean / d) << ','
                << fmt12(mean_square(r.rescaled_residual_mean, r.rescaled_residual_std,
                                     r.trials - r.defects))
                << '\n';
        }
        series = {{2, "entropy/(1+delta)"}, {3, "support/(1+delta)"},
                  {4, "squared rescaled residual"}};
        break;
    case Figure::l1error:
        out << "lambda,l1_error_mean,l1_error_std,l1_upper_improved\n";
        for (const auto& r : records)
            out << fmt12(r.lambda) << ',' << fmt12(r.l1_error_mean) << ','
                << fmt12(r.l1_error_std) << ',' << fmt12(r.l1_upper_improved) << '\n';
        series = {{2, "mean l1 error"}, {4, "upper bound"}};
        break;
    }
    write_gnuplot(path, figure, series);
}

} // namespace sparselab
