#include "astrodf/cli/commands.hpp"
#include "astrodf/cli/stats_table.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <unistd.h>

using namespace astrodf;
using namespace astrodf::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("astrodf-test-" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path write_config(const fs::path& dir, const std::string& body) {
    const fs::path p = dir / "exp.cfg";
    std::ofstream(p) << body;
    return p;
}

const char* kBasic =
    "# three seeds on the noisy sphere\n"
    "problem.name = noisy-sphere\n"
    "problem.dim = 2\n"
    "problem.sigma = 1\n"
    "solver.budget = 20000\n"
    "seeds = 1, 2, 3\n";

}  // namespace

TEST_CASE("config parsing") {
    std::istringstream in(
        "problem.name = noisy-quadratic  # trailing comment\n"
        "\n"
        "problem.dim = 4\n"
        "problem.condition = 100\n"
        "problem.noise = uniform\n"
        "solver.eta1 = 0.2\n"
        "solver.basis = linear\n"
        "solver.sample_cap = none\n"
        "seeds = 5,6\n"
        "parallel = 2\n");
    const auto c = parse_experiment_config(in);
    CHECK(c.problem == "noisy-quadratic");
    CHECK(c.problem_options.dimension == 4);
    CHECK(c.problem_options.condition == 100.0);
    CHECK(c.problem_options.noise.family == NoiseFamily::uniform);
    CHECK(c.solver.eta1 == 0.2);
    CHECK(c.solver.basis == BasisKind::linear);
    CHECK_FALSE(c.solver.sample_cap.has_value());
    CHECK(c.seeds == std::vector<std::uint64_t>{5, 6});
    CHECK(c.parallel == 2);
}

TEST_CASE("config errors name the line and key") {
    std::istringstream unknown("problem.dim = 2\nsolver.etaa = 0.1\n");
    try {
        parse_experiment_config(unknown);
        FAIL("expected a parse error");
    } catch (const ConfigParseError& e) {
        CHECK(e.line == 2);
        CHECK(e.key == "solver.etaa");
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
        CHECK(std::string(e.what()).find("solver.etaa") != std::string::npos);
    }
    std::istringstream bad_value("solver.eta1 = abc\n");
    CHECK_THROWS_AS(parse_experiment_config(bad_value), ConfigParseError);
    std::istringstream no_eq("solver.eta1 0.1\n");
    CHECK_THROWS_AS(parse_experiment_config(no_eq), ConfigParseError);
    std::istringstream dup_seeds("seeds = 1,1\n");
    CHECK_THROWS_AS(parse_experiment_config(dup_seeds).validate(), ConfigError);
    std::istringstream bad_beta("solver.beta = 200\n");
    CHECK_THROWS_AS(parse_experiment_config(bad_beta).validate(), ConfigError);
}

TEST_CASE("run writes one trace per seed plus summaries and is deterministic") {
    const auto dir = scratch("run");
    RunOptions o;
    o.config_path = write_config(dir, kBasic).string();
    o.out_dir = (dir / "a").string();
    o.parallel = 3;
    std::ostringstream out, err;
    REQUIRE(cmd_run(o, out, err) == kExitOk);
    int traces = 0;
    for (const auto& e : fs::directory_iterator(dir / "a")) {
        if (e.path().filename().string().rfind("trace_", 0) == 0) ++traces;
    }
    CHECK(traces == 3);
    for (const char* f : {"trace_1.csv", "trace_2.csv", "trace_3.csv", "summary_1.txt", "summary.csv",
                          "effective_config.cfg"}) {
        CHECK(fs::exists(dir / "a" / f));
    }

    // Sequential rerun into another directory: identical bytes.
    o.out_dir = (dir / "b").string();
    o.parallel = 1;
    REQUIRE(cmd_run(o, out, err) == kExitOk);
    for (const char* f : {"trace_1.csv", "trace_2.csv", "trace_3.csv", "summary.csv"}) {
        CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
    }

    // Re-reading the effective config reproduces the same traces.
    RunOptions again;
    again.config_path = (dir / "a" / "effective_config.cfg").string();
    again.out_dir = (dir / "c").string();
    REQUIRE(cmd_run(again, out, err) == kExitOk);
    CHECK(slurp(dir / "a" / "trace_2.csv") == slurp(dir / "c" / "trace_2.csv"));
}

TEST_CASE("summary table aggregates are recomputable from the per-seed rows") {
    const auto dir = scratch("summary");
    RunOptions o;
    o.config_path = write_config(dir, kBasic).string();
    o.out_dir = dir.string();
    o.seeds = "4,5,6,7";
    std::ostringstream out, err;
    REQUIRE(cmd_run(o, out, err) == kExitOk);
    std::istringstream in(slurp(dir / "summary.csv"));
    std::string line;
    std::getline(in, line);
    CHECK(line == "seed,final_grad_norm,final_f_true,final_f_bar,total_calls,iterations,termination_reason");
    std::vector<double> grads;
    std::map<std::string, double> agg;
    while (std::getline(in, line)) {
        const auto comma = line.find(',');
        const std::string label = line.substr(0, comma);
        const double g = std::stod(line.substr(comma + 1));
        if (label == "median" || label == "q25" || label == "q75") {
            agg[label] = g;
        } else {
            grads.push_back(g);
        }
    }
    REQUIRE(grads.size() == 4);
    std::sort(grads.begin(), grads.end());
    // Type-7 quantiles of four sorted values, by hand.
    CHECK(agg["median"] == doctest::Approx(0.5 * (grads[1] + grads[2])));
    CHECK(agg["q25"] == doctest::Approx(grads[0] + 0.75 * (grads[1] - grads[0])));
    CHECK(agg["q75"] == doctest::Approx(grads[2] + 0.25 * (grads[3] - grads[2])));
}

TEST_CASE("overrides and error exit codes") {
    const auto dir = scratch("errors");
    std::ostringstream out, err;

    RunOptions o;
    o.config_path = write_config(dir, kBasic).string();
    o.out_dir = (dir / "x").string();
    o.overrides = {"solver.budget = 5000", "seeds=9"};
    const auto cfg = resolve_run_config(o);
    CHECK(cfg.solver.budget == 5000);
    CHECK(cfg.seeds == std::vector<std::uint64_t>{9});

    o.overrides = {"solver.bogus=1"};
    CHECK(cmd_run(o, out, err) == kExitParse);
    CHECK(err.str().find("solver.bogus") != std::string::npos);

    RunOptions malformed;
    malformed.config_path = write_config(dir, "problem.name = noisy-sphere\nsolver.gama1 = 2\n").string();
    err.str("");
    CHECK(cmd_run(malformed, out, err) == kExitParse);
    CHECK(err.str().find("solver.gama1") != std::string::npos);
    CHECK(err.str().find("line 2") != std::string::npos);

    RunOptions unknown;
    unknown.config_path = write_config(dir, "problem.name = foo\n").string();
    unknown.out_dir = (dir / "y").string();
    CHECK(cmd_run(unknown, out, err) == kExitUnknownProblem);
}

TEST_CASE("summarize") {
    const auto dir = scratch("summarize");
    std::ostringstream out, err;
    SummarizeOptions none;
    none.patterns = {(dir / "nothing_*.csv").string()};
    CHECK(cmd_summarize(none, out, err) == kExitNoTraces);

    RunOptions o;
    o.config_path = write_config(dir, kBasic).string();
    o.out_dir = (dir / "d2").string();
    o.overrides = {"solver.budget=200000"};
    REQUIRE(cmd_run(o, out, err) == kExitOk);

    SummarizeOptions all;
    all.patterns = {(dir / "d2" / "trace_*.csv").string()};
    all.out_file = (dir / "progress.csv").string();
    REQUIRE(cmd_summarize(all, out, err) == kExitOk);
    std::istringstream in(slurp(dir / "progress.csv"));
    std::string line;
    std::getline(in, line);
    CHECK(line == "calls,n_traces,f_true_median,f_true_q25,f_true_q75,grad_median,grad_q25,grad_q75");
    std::vector<std::string> checkpoints;
    while (std::getline(in, line)) checkpoints.push_back(line.substr(0, line.find(',')));
    CHECK(checkpoints == std::vector<std::string>{"100", "1000", "10000", "100000"});

    // Single trace: medians are that trace's values at the last record within each checkpoint.
    SummarizeOptions one;
    one.patterns = {(dir / "d2" / "trace_1.csv").string()};
    std::ostringstream single;
    REQUIRE(cmd_summarize(one, single, err) == kExitOk);
    std::ifstream tf(dir / "d2" / "trace_1.csv");
    int d = 0;
    const auto trace = read_trace_csv(tf, d);
    std::istringstream rows(single.str());
    std::getline(rows, line);
    while (std::getline(rows, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        const auto cp = std::stoull(cells[0]);
        const IterationRecord* at = nullptr;
        for (const auto& r : trace) {
            if (r.cum_calls <= cp) at = &r;
        }
        REQUIRE(at != nullptr);
        CHECK(std::stod(cells[2]) == at->f_true);
        CHECK(std::stod(cells[5]) == at->model_grad_norm);
    }

    RunOptions o3 = o;
    o3.out_dir = (dir / "d3").string();
    o3.overrides = {"problem.dim=3", "solver.budget=2000"};
    REQUIRE(cmd_run(o3, out, err) == kExitOk);
    SummarizeOptions mixed;
    mixed.patterns = {(dir / "d2" / "trace_1.csv").string(), (dir / "d3" / "trace_1.csv").string()};
    CHECK(cmd_summarize(mixed, out, err) == kExitDimensionMismatch);
}

TEST_CASE("calibrate emits tables with pass columns") {
    std::ostringstream out, err;
    CalibrateOptions s;
    s.kind = "stopping";
    s.lambdas = "100,1000";
    s.reps = 200;
    REQUIRE(cmd_calibrate(s, out, err) == kExitOk);
    CHECK(out.str().rfind("lambda,mean_N,ratio_N,mean_sq_mean,ratio_msm,pass_N,pass_msm\n", 0) == 0);

    out.str("");
    CalibrateOptions f;
    f.kind = "fully-linear";
    f.problem = "noisy-quadratic";
    REQUIRE(cmd_calibrate(f, out, err) == kExitOk);
    std::istringstream rows(out.str());
    std::string line;
    std::getline(rows, line);
    CHECK(line == "radius,max_error,scaled_error,spread,pass");
    int n = 0;
    while (std::getline(rows, line)) {
        ++n;
        CHECK(line.back() == '1');
    }
    CHECK(n == 4);

    out.str("");
    CalibrateOptions e;
    e.kind = "error-bound";
    e.trials = 60;
    REQUIRE(cmd_calibrate(e, out, err) == kExitOk);
    CHECK(out.str().find("\n60,50,0,") != std::string::npos);

    CalibrateOptions bad;
    bad.kind = "stopping";
    bad.reps = 10;
    CHECK(cmd_calibrate(bad, out, err) == kExitParse);
    CalibrateOptions unknown;
    unknown.kind = "fully-linear";
    unknown.problem = "foo";
    CHECK(cmd_calibrate(unknown, out, err) == kExitUnknownProblem);
}

TEST_CASE("quantiles") {
    CHECK(quantile({3.0, 1.0, 2.0}, 0.5) == 2.0);
    CHECK(quantile({1.0, 2.0, 3.0, 4.0}, 0.25) == doctest::Approx(1.75));
    CHECK(std::isnan(quantile({}, 0.5)));
    CHECK(median({std::nan(""), 5.0}) == 5.0);
}

TEST_CASE("command line binary exit codes") {
    const auto dir = scratch("binary");
    const std::string exe = ASTRODF_CLI_PATH;
    auto status = [](const std::string& cmd) {
        const int rc = std::system((cmd + " >/dev/null 2>&1").c_str());
        return WEXITSTATUS(rc);
    };
    const auto cfg = write_config(dir, kBasic);
    CHECK(status(exe + " run --config " + cfg.string() + " --out " + (dir / "o").string() +
                  " --seeds 1,2 --parallel 2 --override solver.budget=3000") == 0);
    CHECK(fs::exists(dir / "o" / "trace_2.csv"));
    CHECK_FALSE(fs::exists(dir / "o" / "trace_3.csv"));
    CHECK(status(exe + " run --config " + cfg.string() + " --override nonsense=1") == 2);
    CHECK(status(exe + " run --bogus-flag") == 2);
    CHECK(status(exe + " summarize " + (dir / "none*.csv").string()) == 4);
    CHECK(status(exe + " calibrate error-bound --trials 12") == 0);
}
