#include "oopa/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "oopa/baselines.hpp"

namespace oopa {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

double parse_double(const std::string& s) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{}) throw std::runtime_error("bad numeric field '" + s + "'");
    return v;
}

json vec_to_json(const Vec& v, int dim) {
    json a = json::array();
    for (int d = 0; d < dim; ++d) a.push_back(v[d]);
    return a;
}

Vec vec_from_json(const json& a) {
    Vec v{};
    for (size_t d = 0; d < a.size() && d < kMaxDim; ++d) v[d] = a[d].get<double>();
    return v;
}

// NaN is not representable in JSON; use null.
json opt_double(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}

double opt_double_from(const json& j) {
    if (j.is_null()) return kNaN;
    return j.get<double>();
}

void ensure_dir(const std::string& dir) {
    if (!dir.empty()) fs::create_directories(dir);
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    return out;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const size_t n = std::min(a.size(), b.size());
    if (n < 2) return 0.0;
    double ma = 0.0, mb = 0.0;
    for (size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (size_t i = 0; i < n; ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa <= 0.0 || sbb <= 0.0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"paper-standard", "paper-msweep",    "paper-grids",
            "paper-lipschitz", "paper-baselines", "paper-refinement"};
}

ExperimentConfig preset_config(const std::string& name) {
    ExperimentConfig cfg;
    cfg.name = name;
    cfg.dim = 2;
    cfg.lower = {0.0, 0.0};
    cfg.upper = {4.0, 4.0};
    cfg.n_grid = 21;
    cfg.objective.preset = "paper-3rbf";
    GroundTruth truth = paper_3rbf_truth();
    cfg.objective.x_star = truth.x_star;
    cfg.objective.f_star = truth.f_star;
    cfg.objective.lipschitz = truth.lipschitz;
    cfg.lambda = 1.0;
    cfg.planner = "oopa";
    cfg.vi_sweeps = 3;
    cfg.llr_neighbors = 4;
    cfg.steps = 125;
    cfg.starts = {{2.0, 2.0}};
    cfg.delta = 0.2;

    if (name == "paper-standard" || name == "paper-msweep" || name == "paper-grids" ||
        name == "paper-lipschitz") {
        return cfg;
    }
    if (name == "paper-baselines") {
        cfg.steps = 250;
        GridSpec spec = make_grid(cfg.lower, cfg.upper, cfg.n_grid, cfg.dim);
        cfg.starts = baseline_start_positions(paper_3rbf(), spec);
        return cfg;
    }
    if (name == "paper-refinement") {
        cfg.steps = 250;
        return cfg;
    }
    throw std::invalid_argument("unknown preset '" + name + "'");
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    json j = json::parse(in);

    ExperimentConfig cfg;
    if (j.contains("preset")) cfg = preset_config(j["preset"].get<std::string>());
    if (j.contains("name")) cfg.name = j["name"].get<std::string>();
    if (j.contains("grid")) {
        const json& g = j["grid"];
        if (g.contains("dim")) cfg.dim = g["dim"].get<int>();
        if (g.contains("lower")) cfg.lower = vec_from_json(g["lower"]);
        if (g.contains("upper")) cfg.upper = vec_from_json(g["upper"]);
        if (g.contains("n")) cfg.n_grid = g["n"].get<int>();
    }
    if (j.contains("objective")) {
        const json& o = j["objective"];
        if (o.contains("preset")) cfg.objective.preset = o["preset"].get<std::string>();
        if (o.contains("components")) {
            cfg.objective.preset = "custom";
            cfg.objective.components.clear();
            for (const json& c : o["components"]) {
                RbfComponent comp;
                comp.width = vec_from_json(c["width"]);
                comp.height = c["height"].get<double>();
                comp.center = vec_from_json(c["center"]);
                cfg.objective.components.push_back(comp);
            }
        }
        if (o.contains("x_star")) cfg.objective.x_star = vec_from_json(o["x_star"]);
        if (o.contains("f_star")) cfg.objective.f_star = o["f_star"].get<double>();
        if (o.contains("lipschitz")) cfg.objective.lipschitz = o["lipschitz"].get<double>();
        if (cfg.objective.preset == "paper-3rbf" && !o.contains("x_star")) {
            GroundTruth truth = paper_3rbf_truth();
            cfg.objective.x_star = truth.x_star;
            cfg.objective.f_star = truth.f_star;
            if (!o.contains("lipschitz")) cfg.objective.lipschitz = truth.lipschitz;
        }
    }
    if (j.contains("lambda")) cfg.lambda = j["lambda"].get<double>();
    if (j.contains("planner")) cfg.planner = j["planner"].get<std::string>();
    if (j.contains("vi_sweeps")) cfg.vi_sweeps = j["vi_sweeps"].get<int>();
    if (j.contains("llr_neighbors")) cfg.llr_neighbors = j["llr_neighbors"].get<int>();
    if (j.contains("steps")) cfg.steps = j["steps"].get<int>();
    if (j.contains("starts")) {
        cfg.starts.clear();
        for (const json& s : j["starts"]) cfg.starts.push_back(vec_from_json(s));
    }
    if (j.contains("delta")) cfg.delta = j["delta"].get<double>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<unsigned>();
    if (j.contains("dump_fields_every")) cfg.dump_fields_every = j["dump_fields_every"].get<int>();
    return cfg;
}

namespace {
json config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["name"] = cfg.name;
    j["grid"] = {{"dim", cfg.dim},
                 {"lower", vec_to_json(cfg.lower, cfg.dim)},
                 {"upper", vec_to_json(cfg.upper, cfg.dim)},
                 {"n", cfg.n_grid}};
    json o;
    o["preset"] = cfg.objective.preset;
    if (cfg.objective.preset == "custom") {
        json comps = json::array();
        for (const auto& c : cfg.objective.components) {
            comps.push_back({{"width", vec_to_json(c.width, cfg.dim)},
                             {"height", c.height},
                             {"center", vec_to_json(c.center, cfg.dim)}});
        }
        o["components"] = comps;
    }
    o["x_star"] = vec_to_json(cfg.objective.x_star, cfg.dim);
    o["f_star"] = cfg.objective.f_star;
    o["lipschitz"] = cfg.objective.lipschitz;
    j["objective"] = o;
    j["lambda"] = cfg.lambda;
    j["planner"] = cfg.planner;
    j["vi_sweeps"] = cfg.vi_sweeps;
    j["llr_neighbors"] = cfg.llr_neighbors;
    j["steps"] = cfg.steps;
    json starts = json::array();
    for (const auto& s : cfg.starts) starts.push_back(vec_to_json(s, cfg.dim));
    j["starts"] = starts;
    j["delta"] = cfg.delta;
    j["seed"] = cfg.seed;
    if (cfg.dump_fields_every > 0) j["dump_fields_every"] = cfg.dump_fields_every;
    return j;
}
}  // namespace

void save_config_file(const ExperimentConfig& cfg, const std::string& path) {
    auto out = open_out(path);
    out << config_to_json(cfg).dump(2) << "\n";
}

std::string validate_config(const ExperimentConfig& cfg) {
    if (cfg.dim < 1 || cfg.dim > kMaxDim) return "dim must be 1 or 2";
    if (cfg.n_grid < 2) return "grid needs at least 2 points per axis";
    for (int d = 0; d < cfg.dim; ++d) {
        if (!(cfg.upper[d] > cfg.lower[d])) return "grid upper corner must exceed lower corner";
    }
    if (cfg.objective.preset == "paper-3rbf") {
        if (cfg.dim != 2) return "objective preset paper-3rbf needs dim = 2";
    } else if (cfg.objective.preset == "custom") {
        if (cfg.objective.components.empty()) return "custom objective needs components";
        for (const auto& c : cfg.objective.components) {
            for (int d = 0; d < cfg.dim; ++d) {
                if (!(c.width[d] > 0.0)) return "RBF widths must be strictly positive";
            }
        }
    } else {
        return "unknown objective preset '" + cfg.objective.preset + "'";
    }
    if (!(cfg.objective.lipschitz > 0.0)) return "objective Lipschitz constant must be positive";
    if (!(cfg.lambda > 0.0)) return "lambda must be positive";
    if (cfg.planner != "oopa" && cfg.planner != "cdoo" && cfg.planner != "gradient") {
        return "unknown planner '" + cfg.planner + "' (expected oopa, cdoo or gradient)";
    }
    if (cfg.vi_sweeps < 1) return "vi_sweeps must be at least 1";
    if (cfg.llr_neighbors < 3) return "llr_neighbors must be at least 3";
    if (cfg.steps < 1) return "steps must be at least 1";
    if (cfg.starts.empty()) return "at least one start position is required";
    for (const auto& s : cfg.starts) {
        for (int d = 0; d < cfg.dim; ++d) {
            if (s[d] < cfg.lower[d] || s[d] > cfg.upper[d]) {
                return "start position lies outside the operating space";
            }
        }
    }
    if (!(cfg.delta > 0.0)) return "delta must be positive";
    return {};
}

PreparedExperiment prepare(const ExperimentConfig& cfg) {
    const std::string err = validate_config(cfg);
    if (!err.empty()) throw std::invalid_argument("invalid config: " + err);

    GridSpec spec = make_grid(cfg.lower, cfg.upper, cfg.n_grid, cfg.dim);
    RbfObjective objective = cfg.objective.preset == "paper-3rbf"
                                 ? paper_3rbf()
                                 : RbfObjective(cfg.objective.components, cfg.dim);
    GroundTruth truth{cfg.objective.x_star, cfg.objective.f_star, cfg.objective.lipschitz};
    return PreparedExperiment{spec, std::move(objective), truth,
                              cfg.lambda * cfg.objective.lipschitz};
}

std::unique_ptr<Planner> make_planner(const ExperimentConfig& cfg, const GridSpec& spec) {
    if (cfg.planner == "oopa") {
        return std::make_unique<OopaPlanner>(spec, ActionSet::canonical(spec.dim), cfg.vi_sweeps);
    }
    if (cfg.planner == "cdoo") return std::make_unique<CdooPlanner>();
    if (cfg.planner == "gradient") {
        return std::make_unique<GradientAscentPlanner>(cfg.llr_neighbors);
    }
    throw std::invalid_argument("unknown planner '" + cfg.planner + "'");
}

std::vector<Vec> baseline_start_positions(const RbfObjective& objective, const GridSpec& spec) {
    const auto& comps = objective.components();
    std::vector<Vec> starts;
    for (size_t i = 0; i < comps.size(); ++i) {
        for (size_t j = i + 1; j < comps.size(); ++j) {
            for (int k = 1; k <= 5; ++k) {
                const double t = k / 6.0;
                Vec pos{};
                for (int d = 0; d < spec.dim; ++d) {
                    pos[d] = comps[i].center[d] + t * (comps[j].center[d] - comps[i].center[d]);
                }
                starts.push_back(spec.coords(spec.snap(pos)));
            }
        }
    }
    return starts;
}

namespace {

void write_run_csv(const std::string& path, const ExperimentConfig& cfg, const GridSpec& spec,
                   const RunResult& result, const ActionSet& actions) {
    auto out = open_out(path);
    out << "k";
    for (int d = 0; d < cfg.dim; ++d) out << ",x" << d;
    out << ",f,action,predicted_refinement,actual_refinement,cumulative_distance,"
           "f_best,dist_to_opt,value_gap\n";
    auto emit = [&](int k, const GridPos& pos, double f, const std::string& action,
                    double pred, double act, double cum, const Metrics& m) {
        out << k;
        const Vec x = spec.coords(pos);
        for (int d = 0; d < cfg.dim; ++d) out << "," << format_double(x[d]);
        out << "," << format_double(f) << "," << action << "," << format_double(pred) << ","
            << format_double(act) << "," << format_double(cum) << ","
            << format_double(m.f_best) << "," << format_double(m.dist_to_opt) << ","
            << format_double(m.value_gap) << "\n";
    };
    for (const StepRecord& rec : result.log.steps) {
        emit(rec.k, rec.position, rec.sample, actions[rec.action].name,
             rec.predicted_refinement, rec.actual_refinement, rec.cumulative_distance,
             rec.metrics);
    }
    emit(static_cast<int>(result.log.steps.size()), result.log.final_position,
         result.log.final_sample, "", 0.0, 0.0, result.log.final_cumulative_distance,
         result.log.final_metrics);
}

json summary_to_json(const RunSummary& s, const ExperimentConfig& cfg) {
    json j;
    j["run_id"] = s.run_id;
    j["planner"] = s.planner;
    j["vi_sweeps"] = s.vi_sweeps;
    j["lambda"] = s.lambda;
    j["lipschitz_effective"] = cfg.lambda * cfg.objective.lipschitz;
    j["n_grid"] = s.n_grid;
    j["dim"] = cfg.dim;
    j["start"] = vec_to_json(s.start, cfg.dim);
    j["steps_budget"] = cfg.steps;
    j["steps_taken"] = s.steps_taken;
    j["samples_gathered"] = s.samples_gathered;
    j["delta"] = cfg.delta;
    j["x_star"] = vec_to_json(cfg.objective.x_star, cfg.dim);
    j["f_star"] = cfg.objective.f_star;
    j["found_optimum"] = s.found_optimum;
    j["distance_to_optimum"] = opt_double(s.distance_to_optimum);
    j["planner_stopped"] = s.planner_stopped;
    j["distance_at_stop"] = opt_double(s.distance_at_stop);
    j["domination_violated"] = s.domination_violated;
    j["failed"] = s.failed;
    j["final_metrics"] = {{"f_best", s.final_metrics.f_best},
                          {"dist_to_opt", s.final_metrics.dist_to_opt},
                          {"value_gap", s.final_metrics.value_gap}};
    j["mean_plan_seconds"] = s.mean_plan_seconds;
    return j;
}

RunSummary summary_from_json(const json& j) {
    RunSummary s;
    s.run_id = j["run_id"].get<std::string>();
    s.planner = j["planner"].get<std::string>();
    s.vi_sweeps = j["vi_sweeps"].get<int>();
    s.lambda = j["lambda"].get<double>();
    s.n_grid = j["n_grid"].get<int>();
    s.start = vec_from_json(j["start"]);
    s.steps_taken = j["steps_taken"].get<int>();
    s.samples_gathered = j["samples_gathered"].get<int>();
    s.found_optimum = j["found_optimum"].get<bool>();
    s.distance_to_optimum = opt_double_from(j["distance_to_optimum"]);
    s.planner_stopped = j["planner_stopped"].get<bool>();
    s.distance_at_stop = opt_double_from(j["distance_at_stop"]);
    s.domination_violated = j["domination_violated"].get<bool>();
    s.failed = j["failed"].get<bool>();
    s.final_metrics.f_best = j["final_metrics"]["f_best"].get<double>();
    s.final_metrics.dist_to_opt = j["final_metrics"]["dist_to_opt"].get<double>();
    s.final_metrics.value_gap = j["final_metrics"]["value_gap"].get<double>();
    s.mean_plan_seconds = j["mean_plan_seconds"].get<double>();
    return s;
}

const char* kAggregateCsvHeader =
    "run_id,planner,vi_sweeps,lambda,n_grid,start0,start1,steps_taken,samples_gathered,"
    "found_optimum,distance_to_optimum,planner_stopped,distance_at_stop,"
    "domination_violated,failed,f_best,dist_to_opt,value_gap\n";

void write_aggregate_csv(const SweepResult& result, const std::string& path) {
    auto out = open_out(path);
    out << kAggregateCsvHeader;
    for (const RunSummary& s : result.runs) {
        out << s.run_id << "," << s.planner << "," << s.vi_sweeps << ","
            << format_double(s.lambda) << "," << s.n_grid << "," << format_double(s.start[0])
            << "," << format_double(s.start[1]) << "," << s.steps_taken << ","
            << s.samples_gathered << "," << (s.found_optimum ? 1 : 0) << ","
            << format_double(s.distance_to_optimum) << "," << (s.planner_stopped ? 1 : 0) << ","
            << format_double(s.distance_at_stop) << "," << (s.domination_violated ? 1 : 0) << ","
            << (s.failed ? 1 : 0) << "," << format_double(s.final_metrics.f_best) << ","
            << format_double(s.final_metrics.dist_to_opt) << ","
            << format_double(s.final_metrics.value_gap) << "\n";
    }
}

json generic_aggregates(const SweepResult& result) {
    int found = 0;
    double total_distance = 0.0;
    int converged = 0;
    for (const RunSummary& s : result.runs) {
        if (s.found_optimum) {
            ++found;
            total_distance += s.distance_to_optimum;
            ++converged;
        }
    }
    json a;
    a["runs"] = result.runs.size();
    a["found_optimum"] = found;
    a["success_rate"] = result.runs.empty() ? 0.0
                                            : static_cast<double>(found) / result.runs.size();
    a["mean_distance_converged"] =
        converged > 0 ? json(total_distance / converged) : json(nullptr);
    return a;
}

void write_aggregate(const SweepResult& result, const std::string& out_dir,
                     const json& extra = json::object()) {
    if (out_dir.empty()) return;
    ensure_dir(out_dir);
    write_aggregate_csv(result, (fs::path(out_dir) / "aggregate.csv").string());

    json j;
    j["sweep"] = result.sweep;
    json runs = json::array();
    for (const RunSummary& s : result.runs) {
        json r;
        r["run_id"] = s.run_id;
        r["planner"] = s.planner;
        r["vi_sweeps"] = s.vi_sweeps;
        r["lambda"] = s.lambda;
        r["n_grid"] = s.n_grid;
        r["start"] = {s.start[0], s.start[1]};
        r["steps_taken"] = s.steps_taken;
        r["samples_gathered"] = s.samples_gathered;
        r["found_optimum"] = s.found_optimum;
        r["distance_to_optimum"] = opt_double(s.distance_to_optimum);
        r["planner_stopped"] = s.planner_stopped;
        r["distance_at_stop"] = opt_double(s.distance_at_stop);
        r["domination_violated"] = s.domination_violated;
        r["failed"] = s.failed;
        r["f_best"] = s.final_metrics.f_best;
        r["dist_to_opt"] = s.final_metrics.dist_to_opt;
        r["value_gap"] = s.final_metrics.value_gap;
        r["mean_plan_seconds"] = s.mean_plan_seconds;
        runs.push_back(r);
    }
    j["runs"] = runs;
    json agg = generic_aggregates(result);
    for (auto it = extra.begin(); it != extra.end(); ++it) agg[it.key()] = it.value();
    j["aggregates"] = agg;
    auto out = open_out((fs::path(out_dir) / "aggregate.json").string());
    out << j.dump(2) << "\n";
}

}  // namespace

RunSummary execute_run(const ExperimentConfig& cfg, int start_index, const std::string& run_id,
                       const std::string& out_dir, RunResult* result_out) {
    PreparedExperiment prep = prepare(cfg);
    if (start_index < 0 || start_index >= static_cast<int>(cfg.starts.size())) {
        throw std::invalid_argument("start index out of range");
    }
    const GridPos start = prep.spec.snap(cfg.starts[start_index]);
    auto planner = make_planner(cfg, prep.spec);

    RunOptions options;
    options.delta = cfg.delta;
    std::string fields_dir;
    if (cfg.dump_fields_every > 0 && !out_dir.empty()) {
        fields_dir = (fs::path(out_dir) / "fields" / run_id).string();
        ensure_dir(fields_dir);
        const ActionSet dump_actions = ActionSet::canonical(cfg.dim);
        const OopaPlanner* oopa = dynamic_cast<const OopaPlanner*>(planner.get());
        options.observer = [&prep, &cfg, fields_dir, dump_actions, oopa](const StepEvent& event) {
            if (event.k % cfg.dump_fields_every != 0) return;
            char tag[16];
            std::snprintf(tag, sizeof(tag), "%05d", event.k);
            export_field_csv(event.bound.values, prep.spec,
                             fields_dir + "/bound_" + tag + ".csv");
            if (oopa) {
                export_action_field_csv(oopa->last_reward().rho, prep.spec, dump_actions,
                                        fields_dir + "/rho_" + tag + ".csv");
                export_action_field_csv(oopa->qtable().q, prep.spec, dump_actions,
                                        fields_dir + "/q_" + tag + ".csv");
                std::vector<double> value(prep.spec.total_points());
                const auto& q = oopa->qtable().q;
                const int n_act = dump_actions.size();
                for (int f = 0; f < prep.spec.total_points(); ++f) {
                    double best = q[static_cast<size_t>(f) * n_act];
                    for (int a = 1; a < n_act; ++a) {
                        best = std::max(best, q[static_cast<size_t>(f) * n_act + a]);
                    }
                    value[f] = best;
                }
                export_field_csv(value, prep.spec, fields_dir + "/v_" + tag + ".csv");
            }
        };
    }
    RunResult result = run(*planner, prep.objective, prep.spec, start, cfg.steps, prep.lipschitz,
                           prep.truth, options);

    RunSummary s;
    s.run_id = run_id;
    s.planner = cfg.planner;
    s.vi_sweeps = cfg.vi_sweeps;
    s.lambda = cfg.lambda;
    s.n_grid = cfg.n_grid;
    s.start = prep.spec.coords(start);
    s.steps_taken = result.steps_taken;
    s.samples_gathered = result.samples_gathered;
    s.found_optimum = result.found_optimum;
    s.distance_to_optimum = result.distance_to_optimum;
    s.planner_stopped = result.planner_stopped;
    s.distance_at_stop = result.distance_at_stop;
    s.domination_violated = result.domination_violated;
    s.failed = result.domination_violated || !result.found_optimum;
    s.final_metrics = result.log.final_metrics;
    s.mean_plan_seconds = result.log.mean_plan_seconds;

    if (!out_dir.empty()) {
        ensure_dir(out_dir);
        const ActionSet actions = ActionSet::canonical(cfg.dim);
        write_run_csv((fs::path(out_dir) / ("run_" + run_id + ".csv")).string(), cfg, prep.spec,
                      result, actions);
        auto out = open_out((fs::path(out_dir) / ("run_" + run_id + ".json")).string());
        out << summary_to_json(s, cfg).dump(2) << "\n";
    }
    if (result_out) *result_out = std::move(result);
    return s;
}

SweepResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
    SweepResult result;
    result.sweep = cfg.name;
    if (!out_dir.empty()) {
        ensure_dir(out_dir);
        save_config_file(cfg, (fs::path(out_dir) / "config.json").string());
    }
    for (size_t i = 0; i < cfg.starts.size(); ++i) {
        std::string run_id = cfg.starts.size() == 1
                                 ? cfg.planner
                                 : cfg.planner + "_s" + (i < 10 ? "0" : "") + std::to_string(i);
        result.runs.push_back(execute_run(cfg, static_cast<int>(i), run_id, out_dir));
    }
    write_aggregate(result, out_dir);
    return result;
}

SweepResult sweep_m(const ExperimentConfig& base, const std::string& out_dir) {
    SweepResult result;
    result.sweep = "paper-msweep";
    if (!out_dir.empty()) {
        ensure_dir(out_dir);
        save_config_file(base, (fs::path(out_dir) / "config.json").string());
    }
    for (int m = 1; m <= 5; ++m) {
        ExperimentConfig cfg = base;
        cfg.vi_sweeps = m;
        result.runs.push_back(execute_run(cfg, 0, "m" + std::to_string(m), out_dir));
    }
    json extra;
    int best_m = 0;
    double best_distance = std::numeric_limits<double>::infinity();
    for (const RunSummary& s : result.runs) {
        if (s.found_optimum && s.distance_to_optimum < best_distance) {
            best_distance = s.distance_to_optimum;
            best_m = s.vi_sweeps;
        }
    }
    extra["best_m"] = best_m;
    write_aggregate(result, out_dir, extra);
    return result;
}

SweepResult sweep_grid(const ExperimentConfig& base, const std::string& out_dir) {
    SweepResult result;
    result.sweep = "paper-grids";
    if (!out_dir.empty()) {
        ensure_dir(out_dir);
        save_config_file(base, (fs::path(out_dir) / "config.json").string());
    }
    const std::vector<int> grids = {21, 26, 31, 36, 41};
    const double trajectory_length = 75.0;  // meters; steps = length / grid step
    std::vector<double> log_points, log_seconds;
    for (int n : grids) {
        ExperimentConfig cfg = base;
        cfg.n_grid = n;
        const double step = (cfg.upper[0] - cfg.lower[0]) / (n - 1);
        cfg.steps = static_cast<int>(std::llround(trajectory_length / step));
        RunSummary s = execute_run(cfg, 0, "grid" + std::to_string(n), out_dir);
        log_points.push_back(std::log(static_cast<double>(n) * n));
        log_seconds.push_back(std::log(std::max(s.mean_plan_seconds, 1e-12)));
        result.runs.push_back(std::move(s));
    }
    // Least-squares slope of log(time) against log(grid points).
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < log_points.size(); ++i) {
        mx += log_points[i];
        my += log_seconds[i];
    }
    mx /= log_points.size();
    my /= log_seconds.size();
    double sxy = 0.0, sxx = 0.0;
    for (size_t i = 0; i < log_points.size(); ++i) {
        sxy += (log_points[i] - mx) * (log_seconds[i] - my);
        sxx += (log_points[i] - mx) * (log_points[i] - mx);
    }
    json extra;
    extra["time_vs_points_loglog_slope"] = sxx > 0.0 ? sxy / sxx : 0.0;
    write_aggregate(result, out_dir, extra);
    return result;
}

SweepResult sweep_lipschitz(const ExperimentConfig& base, const std::string& out_dir) {
    SweepResult result;
    result.sweep = "paper-lipschitz";
    if (!out_dir.empty()) {
        ensure_dir(out_dir);
        save_config_file(base, (fs::path(out_dir) / "config.json").string());
    }
    const std::vector<double> lambdas = {0.2, 0.4, 0.6, 0.8, 1.0, 1.25, 1.5, 2.0, 2.5, 3.0};
    int failures = 0;
    for (double lam : lambdas) {
        ExperimentConfig cfg = base;
        cfg.lambda = lam;
        RunSummary s = execute_run(cfg, 0, "lam" + format_double(lam), out_dir);
        if (s.failed) ++failures;
        result.runs.push_back(std::move(s));
    }
    json extra;
    extra["failed_runs"] = failures;
    write_aggregate(result, out_dir, extra);
    return result;
}

SweepResult compare_baselines(const ExperimentConfig& base, const std::string& out_dir) {
    SweepResult result;
    result.sweep = "paper-baselines";
    if (!out_dir.empty()) {
        ensure_dir(out_dir);
        save_config_file(base, (fs::path(out_dir) / "config.json").string());
    }
    const std::vector<std::string> planners = {"oopa", "cdoo", "gradient"};
    for (size_t i = 0; i < base.starts.size(); ++i) {
        for (const std::string& planner : planners) {
            ExperimentConfig cfg = base;
            cfg.planner = planner;
            std::string run_id =
                "s" + std::string(i < 10 ? "0" : "") + std::to_string(i) + "_" + planner;
            result.runs.push_back(execute_run(cfg, static_cast<int>(i), run_id, out_dir));
        }
    }

    // Mean distance on starts where both bound-based methods converge.
    json per_planner;
    for (const std::string& planner : planners) {
        int converged = 0;
        double total = 0.0;
        for (const RunSummary& s : result.runs) {
            if (s.planner == planner && s.found_optimum) {
                ++converged;
                total += s.distance_to_optimum;
            }
        }
        per_planner[planner] = {{"converged", converged},
                                {"mean_distance", converged ? json(total / converged)
                                                            : json(nullptr)}};
    }
    double oopa_total = 0.0, cdoo_total = 0.0;
    int mutual = 0;
    for (size_t i = 0; i < base.starts.size(); ++i) {
        const RunSummary& oopa_run = result.runs[i * 3 + 0];
        const RunSummary& cdoo_run = result.runs[i * 3 + 1];
        if (oopa_run.found_optimum && cdoo_run.found_optimum) {
            ++mutual;
            oopa_total += oopa_run.distance_to_optimum;
            cdoo_total += cdoo_run.distance_to_optimum;
        }
    }
    json extra;
    extra["per_planner"] = per_planner;
    extra["mutually_converged_starts"] = mutual;
    if (mutual > 0 && cdoo_total > 0.0) {
        extra["oopa_mean_distance_mutual"] = oopa_total / mutual;
        extra["cdoo_mean_distance_mutual"] = cdoo_total / mutual;
        extra["oopa_vs_cdoo_percent_less"] = 100.0 * (1.0 - oopa_total / cdoo_total);
    }
    write_aggregate(result, out_dir, extra);
    return result;
}

SweepResult trace_refinement_accuracy(const ExperimentConfig& base, const std::string& out_dir) {
    SweepResult result;
    result.sweep = "paper-refinement";
    ExperimentConfig cfg = base;
    cfg.planner = "oopa";
    if (!out_dir.empty()) {
        ensure_dir(out_dir);
        save_config_file(cfg, (fs::path(out_dir) / "config.json").string());
    }
    RunResult run_result;
    result.runs.push_back(execute_run(cfg, 0, "refinement_m" + std::to_string(cfg.vi_sweeps),
                                      out_dir, &run_result));

    std::vector<double> predicted, actual;
    for (const StepRecord& rec : run_result.log.steps) {
        predicted.push_back(rec.predicted_refinement);
        actual.push_back(rec.actual_refinement);
    }
    if (!out_dir.empty()) {
        auto out = open_out((fs::path(out_dir) / "refinement_trace.csv").string());
        out << "k,predicted_refinement,actual_refinement\n";
        for (size_t k = 0; k < predicted.size(); ++k) {
            out << k << "," << format_double(predicted[k]) << "," << format_double(actual[k])
                << "\n";
        }
    }

    const size_t window = std::min<size_t>(50, predicted.size() / 2);
    double mae_first = 0.0, mae_last = 0.0;
    for (size_t k = 0; k < window; ++k) {
        mae_first += std::abs(predicted[k] - actual[k]);
        const size_t j = predicted.size() - window + k;
        mae_last += std::abs(predicted[j] - actual[j]);
    }
    if (window > 0) {
        mae_first /= window;
        mae_last /= window;
    }
    json extra;
    extra["pearson_predicted_actual"] = pearson(predicted, actual);
    extra["mae_first_window"] = mae_first;
    extra["mae_last_window"] = mae_last;
    extra["window"] = window;
    write_aggregate(result, out_dir, extra);
    return result;
}

SweepResult run_sweep(const ExperimentConfig& base, const std::string& out_dir) {
    if (base.name == "paper-msweep") return sweep_m(base, out_dir);
    if (base.name == "paper-grids") return sweep_grid(base, out_dir);
    if (base.name == "paper-lipschitz") return sweep_lipschitz(base, out_dir);
    if (base.name == "paper-baselines") return compare_baselines(base, out_dir);
    if (base.name == "paper-refinement") return trace_refinement_accuracy(base, out_dir);
    return run_experiment(base, out_dir);
}

namespace {

struct CsvRun {
    std::vector<int> k;
    std::vector<Vec> positions;
    std::vector<double> f;
    std::vector<double> cumulative;
};

CsvRun parse_run_csv(const std::string& path, int dim) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty CSV " + path);
    CsvRun run;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        // k, x0[, x1], f, action, predicted, actual, cumulative, f_best, dist, gap
        if (static_cast<int>(fields.size()) != 9 + dim) {
            throw std::runtime_error("unexpected column count in " + path);
        }
        run.k.push_back(static_cast<int>(parse_double(fields[0])));
        Vec pos{};
        for (int d = 0; d < dim; ++d) pos[d] = parse_double(fields[1 + d]);
        run.positions.push_back(pos);
        run.f.push_back(parse_double(fields[1 + dim]));
        run.cumulative.push_back(parse_double(fields[5 + dim]));
    }
    return run;
}

}  // namespace

SweepResult report_directory(const std::string& dir) {
    std::vector<std::string> json_files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("run_", 0) == 0 && entry.path().extension() == ".json") {
            json_files.push_back(entry.path().string());
        }
    }
    std::sort(json_files.begin(), json_files.end());
    if (json_files.empty()) throw std::runtime_error("no run_*.json files in " + dir);

    SweepResult result;
    result.sweep = "report";
    for (const std::string& path : json_files) {
        std::ifstream in(path);
        json j = json::parse(in);
        RunSummary s = summary_from_json(j);

        // Recompute the run's statistics from its CSV; every aggregate must be
        // derivable from the exported rows alone.
        const int dim = j["dim"].get<int>();
        const double delta = j["delta"].get<double>();
        const Vec x_star = vec_from_json(j["x_star"]);
        const double f_star = j["f_star"].get<double>();
        const std::string csv_path = path.substr(0, path.size() - 5) + ".csv";
        const CsvRun rows = parse_run_csv(csv_path, dim);

        Metrics recomputed;
        bool found = false;
        double dist_found = kNaN;
        std::set<std::pair<double, double>> distinct;
        for (size_t i = 0; i < rows.positions.size(); ++i) {
            recomputed.f_best = std::max(recomputed.f_best, rows.f[i]);
            const double dist = distance(x_star, rows.positions[i], dim);
            recomputed.dist_to_opt = std::min(recomputed.dist_to_opt, dist);
            recomputed.value_gap = std::min(recomputed.value_gap, f_star - rows.f[i]);
            if (!found && dist <= delta) {
                found = true;
                dist_found = rows.cumulative[i];
            }
            distinct.insert({rows.positions[i][0], dim > 1 ? rows.positions[i][1] : 0.0});
        }
        const int steps_taken = static_cast<int>(rows.positions.size()) - 1;

        const bool consistent =
            recomputed.f_best == s.final_metrics.f_best &&
            recomputed.dist_to_opt == s.final_metrics.dist_to_opt &&
            recomputed.value_gap == s.final_metrics.value_gap && found == s.found_optimum &&
            (std::isnan(dist_found) ? std::isnan(s.distance_to_optimum)
                                    : dist_found == s.distance_to_optimum) &&
            steps_taken == s.steps_taken &&
            static_cast<int>(distinct.size()) == s.samples_gathered;
        if (!consistent) {
            throw std::runtime_error("summary " + path + " disagrees with its CSV export");
        }
        result.runs.push_back(std::move(s));
    }
    write_aggregate(result, dir);
    return result;
}

void export_field_csv(const std::vector<double>& values, const GridSpec& spec,
                      const std::string& path) {
    if (static_cast<int>(values.size()) != spec.total_points()) {
        throw std::invalid_argument("field size does not match the grid");
    }
    auto out = open_out(path);
    out << "flat";
    for (int d = 0; d < spec.dim; ++d) out << ",x" << d;
    out << ",value\n";
    for (int f = 0; f < spec.total_points(); ++f) {
        out << f;
        const Vec x = spec.coords(spec.unflat(f));
        for (int d = 0; d < spec.dim; ++d) out << "," << format_double(x[d]);
        out << "," << format_double(values[f]) << "\n";
    }
}

void export_action_field_csv(const std::vector<double>& values, const GridSpec& spec,
                             const ActionSet& actions, const std::string& path) {
    if (static_cast<int>(values.size()) != spec.total_points() * actions.size()) {
        throw std::invalid_argument("field size does not match grid x actions");
    }
    auto out = open_out(path);
    out << "flat";
    for (int d = 0; d < spec.dim; ++d) out << ",x" << d;
    for (int a = 0; a < actions.size(); ++a) out << "," << actions[a].name;
    out << "\n";
    for (int f = 0; f < spec.total_points(); ++f) {
        out << f;
        const Vec x = spec.coords(spec.unflat(f));
        for (int d = 0; d < spec.dim; ++d) out << "," << format_double(x[d]);
        for (int a = 0; a < actions.size(); ++a) {
            out << "," << format_double(values[static_cast<size_t>(f) * actions.size() + a]);
        }
        out << "\n";
    }
}

}  // namespace oopa
