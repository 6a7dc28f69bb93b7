#include <doctest.h>

#include <stdexcept>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "oopa/experiment.hpp"

using namespace oopa;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path temp_dir(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() / ("oopa_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("every shipped preset validates") {
    for (const std::string& name : preset_names()) {
        ExperimentConfig cfg = preset_config(name);
        CHECK(validate_config(cfg).empty());
    }
    CHECK_THROWS_AS(preset_config("nope"), std::invalid_argument);
}

TEST_CASE("validation catches incoherent configs") {
    ExperimentConfig cfg = preset_config("paper-standard");
    cfg.planner = "magic";
    CHECK_FALSE(validate_config(cfg).empty());

    cfg = preset_config("paper-standard");
    cfg.n_grid = 1;
    CHECK_FALSE(validate_config(cfg).empty());

    cfg = preset_config("paper-standard");
    cfg.starts = {{9.0, 9.0}};
    CHECK_FALSE(validate_config(cfg).empty());

    cfg = preset_config("paper-standard");
    cfg.llr_neighbors = 2;
    CHECK_FALSE(validate_config(cfg).empty());

    cfg = preset_config("paper-standard");
    cfg.lambda = 0.0;
    CHECK_FALSE(validate_config(cfg).empty());

    cfg = preset_config("paper-standard");
    cfg.steps = 0;
    CHECK_FALSE(validate_config(cfg).empty());
}

TEST_CASE("config files round-trip") {
    fs::path dir = temp_dir("config");
    ExperimentConfig cfg = preset_config("paper-standard");
    cfg.vi_sweeps = 4;
    cfg.lambda = 1.25;
    cfg.starts = {{1.0, 1.8}, {3.0, 2.2}};
    save_config_file(cfg, (dir / "cfg.json").string());
    ExperimentConfig loaded = load_config_file((dir / "cfg.json").string());
    CHECK(loaded.name == cfg.name);
    CHECK(loaded.vi_sweeps == 4);
    CHECK(loaded.lambda == 1.25);
    CHECK(loaded.n_grid == cfg.n_grid);
    CHECK(loaded.starts.size() == 2);
    CHECK(loaded.starts[1][0] == 3.0);
    CHECK(loaded.objective.f_star == cfg.objective.f_star);
    fs::remove_all(dir);
}

TEST_CASE("the 15-start protocol snaps segment points to the grid") {
    GridSpec spec = make_grid({0, 0}, {4, 4}, 21, 2);
    auto starts = baseline_start_positions(paper_3rbf(), spec);
    REQUIRE(starts.size() == 15);
    for (const Vec& s : starts) {
        const GridPos p = spec.snap(s);
        CHECK(spec.coords(p) == s);   // already on-grid
    }
    // First segment (centers [0.75,1.5] -> [2.75,3.5]) hand-checked indices:
    // interior points at t = k/6 snap to (5,9), (7,11), (9,13), (10,14), (12,16).
    CHECK(starts[0] == spec.coords({5, 9}));
    CHECK(starts[1] == spec.coords({7, 11}));
    CHECK(starts[2] == spec.coords({9, 13}));
    CHECK(starts[3] == spec.coords({10, 14}));
    CHECK(starts[4] == spec.coords({12, 16}));
}

TEST_CASE("runs export CSV and JSON that reports can reproduce") {
    fs::path dir = temp_dir("run");
    ExperimentConfig cfg = preset_config("paper-standard");
    cfg.steps = 8;
    SweepResult sweep = run_experiment(cfg, dir.string());
    REQUIRE(sweep.runs.size() == 1);
    CHECK(fs::exists(dir / "run_oopa.csv"));
    CHECK(fs::exists(dir / "run_oopa.json"));
    CHECK(fs::exists(dir / "aggregate.csv"));
    CHECK(fs::exists(dir / "aggregate.json"));
    CHECK(fs::exists(dir / "config.json"));

    const std::string aggregate_before = slurp(dir / "aggregate.csv");
    SweepResult reported = report_directory(dir.string());
    CHECK(reported.runs.size() == 1);
    CHECK(reported.runs[0].steps_taken == sweep.runs[0].steps_taken);
    CHECK(slurp(dir / "aggregate.csv") == aggregate_before);

    // The CSV has a row per step plus the terminal state.
    std::istringstream csv(slurp(dir / "run_oopa.csv"));
    std::string line;
    int rows = 0;
    while (std::getline(csv, line)) ++rows;
    CHECK(rows == 1 + cfg.steps + 1);   // header + steps + terminal row
    fs::remove_all(dir);
}

TEST_CASE("re-running a configuration overwrites with identical bytes") {
    fs::path dir = temp_dir("idempotent");
    ExperimentConfig cfg = preset_config("paper-standard");
    cfg.steps = 10;
    run_experiment(cfg, dir.string());
    const std::string csv1 = slurp(dir / "run_oopa.csv");
    const std::string agg1 = slurp(dir / "aggregate.csv");
    run_experiment(cfg, dir.string());
    CHECK(slurp(dir / "run_oopa.csv") == csv1);
    CHECK(slurp(dir / "aggregate.csv") == agg1);
    fs::remove_all(dir);
}

TEST_CASE("unit multiplier reproduces the base run bit for bit") {
    fs::path dir_a = temp_dir("lam_base");
    fs::path dir_b = temp_dir("lam_unit");
    ExperimentConfig base = preset_config("paper-standard");
    base.steps = 12;
    ExperimentConfig unit = base;
    unit.lambda = 1.0;

    run_experiment(base, dir_a.string());
    run_experiment(unit, dir_b.string());
    CHECK(slurp(dir_a / "run_oopa.csv") == slurp(dir_b / "run_oopa.csv"));
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
}

TEST_CASE("short m-sweep exports one run per sweep count") {
    fs::path dir = temp_dir("msweep");
    ExperimentConfig base = preset_config("paper-msweep");
    base.steps = 4;
    SweepResult result = sweep_m(base, dir.string());
    REQUIRE(result.runs.size() == 5);
    for (int m = 1; m <= 5; ++m) {
        CHECK(result.runs[m - 1].vi_sweeps == m);
        CHECK(fs::exists(dir / ("run_m" + std::to_string(m) + ".csv")));
    }
    // Aggregation from disk agrees with the in-memory sweep.
    SweepResult reported = report_directory(dir.string());
    CHECK(reported.runs.size() == 5);
    fs::remove_all(dir);
}

TEST_CASE("refinement trace exports aligned prediction columns") {
    fs::path dir = temp_dir("refinement");
    ExperimentConfig base = preset_config("paper-refinement");
    base.steps = 12;
    SweepResult result = trace_refinement_accuracy(base, dir.string());
    REQUIRE(result.runs.size() == 1);
    const std::string trace = slurp(dir / "refinement_trace.csv");
    std::istringstream in(trace);
    std::string line;
    std::getline(in, line);
    CHECK(line == "k,predicted_refinement,actual_refinement");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 12);
    fs::remove_all(dir);
}

TEST_CASE("field dumps export bound, reward and Q snapshots") {
    fs::path dir = temp_dir("dumps");
    ExperimentConfig cfg = preset_config("paper-standard");
    cfg.steps = 6;
    cfg.dump_fields_every = 3;
    run_experiment(cfg, dir.string());
    for (const char* name : {"bound_00000.csv", "bound_00003.csv", "rho_00000.csv",
                             "q_00003.csv", "v_00000.csv"}) {
        CHECK(fs::exists(dir / "fields" / "oopa" / name));
    }
    // One row per grid point plus the header.
    std::istringstream in(slurp(dir / "fields" / "oopa" / "q_00000.csv"));
    std::string line;
    std::getline(in, line);
    CHECK(line == "flat,x0,x1,up,down,left,right");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 441);
    fs::remove_all(dir);
}

TEST_CASE("field exports carry one value per grid point") {
    fs::path dir = temp_dir("field");
    GridSpec spec = make_grid({0, 0}, {4, 4}, 5, 2);
    std::vector<double> values(spec.total_points(), 1.5);
    export_field_csv(values, spec, (dir / "field.csv").string());
    std::istringstream in(slurp(dir / "field.csv"));
    std::string line;
    std::getline(in, line);
    CHECK(line == "flat,x0,x1,value");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == spec.total_points());
    fs::remove_all(dir);
}
