#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sparselab/bounds.hpp"
#include "sparselab/experiments.hpp"
#include "sparselab/io.hpp"

using namespace sparselab;

namespace {

const char* kTinyConfig = R"(
# smoke sweep
m = 20
N = 40
k = 3
noise_levels = 0.01
trials = 2
base_seed = 7
lambda_grid.mode = log
lambda_grid.count = 8
lambda_grid.min_factor = 0.02
delta_for_bounds = 0.7
warm_start = true
signal_dist = gaussian
)";

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("sparselab_exp_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

} // namespace

TEST_CASE("config parsing") {
    SUBCASE("full round trip of the tiny config") {
        const SweepConfig cfg = parse_sweep_config_text(kTinyConfig);
        CHECK(cfg.m == 20);
        CHECK(cfg.N == 40);
        CHECK(cfg.k == 3);
        CHECK(cfg.noise_levels == std::vector<double>{0.01});
        CHECK(cfg.trials == 2);
        CHECK(cfg.base_seed == 7);
        CHECK(cfg.lambda_grid.count == 8);
        CHECK(cfg.lambda_grid.min_factor == 0.02);
        CHECK(cfg.warm_start);
    }
    SUBCASE("unknown keys are errors") {
        CHECK_THROWS_WITH_AS(parse_sweep_config_text("m = 4\nwat = 1\n"),
                             doctest::Contains("unknown key"), std::invalid_argument);
    }
    SUBCASE("missing required keys are errors") {
        CHECK_THROWS_AS(parse_sweep_config_text("m = 4\nN = 8\n"), std::invalid_argument);
    }
    SUBCASE("empty noise list is an error") {
        CHECK_THROWS_AS(
            parse_sweep_config_text("m = 4\nN = 8\nk = 1\nnoise_levels =\ntrials = 1\n"),
            std::invalid_argument);
    }
    SUBCASE("explicit grids need values") {
        CHECK_THROWS_AS(parse_sweep_config_text("m = 4\nN = 8\nk = 1\nnoise_levels = 0\n"
                                                "trials = 1\nlambda_grid.mode = explicit\n"),
                        std::invalid_argument);
        const SweepConfig cfg = parse_sweep_config_text(
            "m = 4\nN = 8\nk = 1\nnoise_levels = 0\ntrials = 1\n"
            "lambda_grid.mode = explicit\nlambda_grid.values = 0.5, 1.0, 0.25\n");
        CHECK(cfg.lambda_grid.factors() == std::vector<double>{1.0, 0.5, 0.25});
    }
}

TEST_CASE("lambda grids") {
    LambdaGrid g;
    SUBCASE("log grid spans 1 down to min_factor") {
        g.count = 5;
        g.min_factor = 1e-2;
        const auto f = g.factors();
        REQUIRE(f.size() == 5);
        CHECK(f.front() == 1.0);
        CHECK(f.back() == doctest::Approx(1e-2).epsilon(1e-12));
        for (size_t i = 1; i < f.size(); ++i) {
            CHECK(f[i] < f[i - 1]);
            // constant ratio
            CHECK(f[i] / f[i - 1] == doctest::Approx(f[1] / f[0]).epsilon(1e-12));
        }
    }
    SUBCASE("linear grid") {
        g.mode = LambdaGrid::Mode::linear;
        g.count = 3;
        g.min_factor = 0.5;
        CHECK(g.factors() == std::vector<double>{1.0, 0.75, 0.5});
    }
    SUBCASE("count below 2 is rejected") {
        g.count = 1;
        CHECK_THROWS_AS(g.factors(), std::invalid_argument);
    }
}

TEST_CASE("run_sweep on a tiny configuration") {
    const SweepConfig cfg = parse_sweep_config_text(kTinyConfig);
    const auto records = run_sweep(cfg, 2);
    REQUIRE(records.size() == 8);

    SUBCASE("trivial row at lambda = lambda_inf") {
        const SweepRecord& first = records.front();
        CHECK(first.lambda_factor == 1.0);
        CHECK(first.s_mean == 0.0);
        CHECK(first.defects == 0);
    }
    SUBCASE("every solve certified, no defects") {
        for (const auto& r : records) {
            CHECK(r.defects == 0);
            CHECK(r.trials == 2);
        }
    }
    SUBCASE("bound columns reproducible from the row scalars") {
        const RnspConstants c = rnsp_from_ric(0.7);
        for (const auto& r : records) {
            CHECK(r.residual_upper ==
                  doctest::Approx(residual_upper(c.beta, r.theta, r.k)).epsilon(1e-12));
            CHECK(r.residual_lower_from_mean_support ==
                  doctest::Approx(std::sqrt(r.s_mean / 1.7)).epsilon(1e-12));
            CHECK(r.sparsity_limit == sparsity_bound(0.7, c.beta, r.theta, r.k).t);
        }
    }
    SUBCASE("reruns are identical, threading does not matter") {
        const auto again = run_sweep(cfg, 1);
        REQUIRE(again.size() == records.size());
        for (size_t i = 0; i < records.size(); ++i) {
            CHECK(sweep_csv_row(again[i]) == sweep_csv_row(records[i]));
        }
    }
    SUBCASE("cold start reproduces the warm-started support counts") {
        SweepConfig cold = cfg;
        cold.warm_start = false;
        const auto cr = run_sweep(cold, 2);
        for (size_t i = 0; i < records.size(); ++i) {
            CHECK(cr[i].s_mean == records[i].s_mean);
            CHECK(cr[i].rescaled_residual_mean ==
                  doctest::Approx(records[i].rescaled_residual_mean).epsilon(1e-7));
        }
    }
}

TEST_CASE("regime flag marks theta > 1 rows") {
    SweepConfig cfg = parse_sweep_config_text(kTinyConfig);
    cfg.noise_levels = {0.5}; // large noise pushes small-lambda rows out of regime
    cfg.lambda_grid.min_factor = 1e-3;
    const auto records = run_sweep(cfg, 2);
    bool saw_out = false;
    for (const auto& r : records) {
        CHECK(r.in_regime == (r.theta <= 1.0));
        saw_out = saw_out || !r.in_regime;
    }
    CHECK(saw_out);
}

TEST_CASE("figure emission") {
    TempDir tmp;
    const SweepConfig cfg = parse_sweep_config_text(kTinyConfig);
    const auto records = run_sweep(cfg, 2);

    SUBCASE("all five figures with scripts") {
        for (Figure f : {Figure::support, Figure::l1norm, Figure::residual, Figure::entropy,
                         Figure::l1error}) {
            const std::string csv = tmp.file(figure_name(f) + "_0.01.csv");
            emit_figure_data(records, f, csv);
            const std::string text = read_file(csv);
            CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 8);
            const std::string script = read_file(tmp.file(figure_name(f) + "_0.01.gp"));
            CHECK(script.find(figure_name(f) + "_0.01.csv") != std::string::npos);
            CHECK(script.find("plot ") != std::string::npos);
        }
    }
    SUBCASE("single-record input gives a single-row CSV") {
        const std::vector<SweepRecord> one(records.begin(), records.begin() + 1);
        emit_figure_data(one, Figure::support, tmp.file("one.csv"));
        const std::string text = read_file(tmp.file("one.csv"));
        CHECK(std::count(text.begin(), text.end(), '\n') == 2);
    }
    SUBCASE("unknown figure names are rejected") {
        CHECK_THROWS_AS(figure_from_name("sausage"), std::invalid_argument);
        CHECK(figure_from_name("entropy") == Figure::entropy);
    }
    SUBCASE("empty record list is rejected") {
        CHECK_THROWS_AS(emit_figure_data({}, Figure::support, tmp.file("x.csv")),
                        std::invalid_argument);
    }
}

TEST_CASE("csv rows match the header arity") {
    const SweepConfig cfg = parse_sweep_config_text(kTinyConfig);
    const auto records = run_sweep(cfg, 2);
    const std::string header = sweep_csv_header();
    const auto commas = std::count(header.begin(), header.end(), ',');
    for (const auto& r : records) {
        const std::string row = sweep_csv_row(r);
        CHECK(std::count(row.begin(), row.end(), ',') == commas);
    }
}
