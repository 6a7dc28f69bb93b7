#pragma once

#include <memory>
#include <string>
#include <vector>

#include "oopa/objective.hpp"
#include "oopa/simulator.hpp"

namespace oopa {

struct ObjectiveSpec {
    std::string preset = "paper-3rbf";       // or "custom"
    std::vector<RbfComponent> components;    // used when preset == "custom"
    Vec x_star{};
    double f_star = 0.0;
    double lipschitz = 0.0;                  // reference constant for the setup
};

/// One declarative experiment: grid, objective, planner and budget.
struct ExperimentConfig {
    std::string name = "experiment";
    int dim = 2;
    Vec lower{0.0, 0.0};
    Vec upper{4.0, 4.0};
    int n_grid = 21;
    ObjectiveSpec objective;
    double lambda = 1.0;            // effective constant is lambda * objective.lipschitz
    std::string planner = "oopa";   // oopa | cdoo | gradient
    int vi_sweeps = 3;              // m
    int llr_neighbors = 4;          // N
    int steps = 125;                // n
    std::vector<Vec> starts{{2.0, 2.0}};
    double delta = 0.2;             // convergence accuracy
    unsigned seed = 0;              // reserved; all shipped planners are deterministic
    int dump_fields_every = 0;      // >0: export bound (and rho/Q/V for oopa) every k steps
};

std::vector<std::string> preset_names();
ExperimentConfig preset_config(const std::string& name);

ExperimentConfig load_config_file(const std::string& path);
void save_config_file(const ExperimentConfig& config, const std::string& path);

/// Empty string when the configuration is coherent; otherwise a message.
std::string validate_config(const ExperimentConfig& config);

struct PreparedExperiment {
    GridSpec spec;
    RbfObjective objective;
    GroundTruth truth;
    double lipschitz = 0.0;   // lambda applied
};
PreparedExperiment prepare(const ExperimentConfig& config);
std::unique_ptr<Planner> make_planner(const ExperimentConfig& config, const GridSpec& spec);

/// Comparison protocol starts: 5 equidistant interior points on the segment
/// between each pair of objective component centers, snapped to the grid.
std::vector<Vec> baseline_start_positions(const RbfObjective& objective, const GridSpec& spec);

struct RunSummary {
    std::string run_id;
    std::string planner;
    int vi_sweeps = 0;
    double lambda = 1.0;
    int n_grid = 0;
    Vec start{};
    int steps_taken = 0;
    int samples_gathered = 0;
    bool found_optimum = false;
    double distance_to_optimum = 0.0;   // NaN when never within delta
    bool planner_stopped = false;
    double distance_at_stop = 0.0;      // NaN unless the planner stopped
    bool domination_violated = false;
    bool failed = false;                // violated or not converged within the budget
    Metrics final_metrics;
    double mean_plan_seconds = 0.0;     // kept out of CSV exports
};

struct SweepResult {
    std::string sweep;
    std::vector<RunSummary> runs;
};

/// Runs one start of the configuration. When out_dir is nonempty, writes
/// run_<id>.csv and run_<id>.json there.
RunSummary execute_run(const ExperimentConfig& config, int start_index, const std::string& run_id,
                       const std::string& out_dir, RunResult* result_out = nullptr);

/// `run` subcommand: every start of one configuration.
SweepResult run_experiment(const ExperimentConfig& config, const std::string& out_dir);

/// `sweep` subcommand: dispatches on the preset name.
SweepResult run_sweep(const ExperimentConfig& base, const std::string& out_dir);

SweepResult sweep_m(const ExperimentConfig& base, const std::string& out_dir);
SweepResult sweep_grid(const ExperimentConfig& base, const std::string& out_dir);
SweepResult sweep_lipschitz(const ExperimentConfig& base, const std::string& out_dir);
SweepResult compare_baselines(const ExperimentConfig& base, const std::string& out_dir);
SweepResult trace_refinement_accuracy(const ExperimentConfig& base, const std::string& out_dir);

/// Re-aggregates run_*.json from a results directory, recomputing every
/// run's statistics from its CSV and failing on any mismatch, then rewrites
/// aggregate.csv / aggregate.json. Timing figures live only in the JSON so
/// CSV exports stay byte-identical across repeated runs.
SweepResult report_directory(const std::string& dir);

/// Grid/bound/reward snapshots for plotting; one value per line in row-major
/// grid order with index and coordinates.
void export_field_csv(const std::vector<double>& values, const GridSpec& spec,
                      const std::string& path);

/// Per-(state, action) table such as rho or Q: one row per grid point with
/// one column per action.
void export_action_field_csv(const std::vector<double>& values, const GridSpec& spec,
                             const ActionSet& actions, const std::string& path);

}  // namespace oopa
