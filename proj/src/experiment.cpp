// SPDX-License-Identifier: Apache-2.0
#include "fene/experiment.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "fene/constrained.hpp"
#include "fene/csvio.hpp"
#include "fene/errors.hpp"
#include "fene/fenep_ode.hpp"
#include "fene/histio.hpp"
#include "fene/parallel.hpp"
#include "fene/qe_oracle.hpp"
#include "fene/version.hpp"

namespace fene {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class Outputs {
  public:
    explicit Outputs(std::string dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

    std::string path(const std::string& name) {
        files_.push_back(name);
        return (fs::path(dir_) / name).string();
    }

    const std::vector<std::string>& files() const { return files_; }
    const std::string& dir() const { return dir_; }

    void note(const std::string& key, const json& value) { notes_[key] = value; }
    const json& notes() const { return notes_; }

  private:
    std::string dir_;
    std::vector<std::string> files_;
    json notes_ = json::object();
};

void write_histogram_csv(const Histogram& h, const std::string& path) {
    CsvWriter csv(path);
    csv.row(std::vector<std::string>{"bin_left", "bin_right", "count", "normalized_density"});
    for (int i = 0; i < h.n_bins(); ++i) {
        csv.row(std::vector<double>{h.edges[i], h.edges[i + 1],
                                    static_cast<double>(h.counts[i]), h.density(i)});
    }
}

void write_monitor_csv(const std::vector<double>& monitor, double dt, const std::string& label,
                       const std::string& path) {
    CsvWriter csv(path);
    csv.row(std::vector<std::string>{"constrained_time", label});
    for (std::size_t i = 0; i < monitor.size(); ++i) {
        csv.row(std::vector<double>{static_cast<double>(i + 1) * dt, monitor[i]});
    }
}

void write_density_csv(const QEDensity& density, int n_points, const std::string& path) {
    CsvWriter csv(path);
    csv.row(std::vector<std::string>{"x", "phi"});
    const double lo = density.domain_lo();
    const double hi = density.domain_hi();
    for (int i = 0; i <= n_points; ++i) {
        const double x = lo + (hi - lo) * i / n_points;
        csv.row(std::vector<double>{x, density.pdf(x)});
    }
}

json config_json(const ExperimentConfig& cfg) {
    const char* force = cfg.params.force_model == ForceModel::hookean  ? "hookean"
                        : cfg.params.force_model == ForceModel::fene   ? "fene"
                                                                       : "fenep";
    return json{
        {"experiment", to_string(cfg.experiment)},
        {"model", {{"b", cfg.params.b}, {"we", cfg.params.we}, {"eps", cfg.params.eps},
                   {"force", force}}},
        {"flow", {{"kappa", cfg.flow_token}}},
        {"run",
         {{"strategy", cfg.strategy_token},
          {"n_particles", cfg.n_particles},
          {"dt", cfg.dt},
          {"k_steps", cfg.k_steps},
          {"m_inf", cfg.m_inf},
          {"t_star", cfg.t_star},
          {"t_end", cfg.t_end},
          {"seed", cfg.seed},
          {"lift_mode", cfg.lift_mode == LiftMode::frozen_kappa ? "frozen" : "quasi_equilibrium"},
          {"warm_start", cfg.warm_start},
          {"n_bins", cfg.n_bins},
          {"plateau", cfg.plateau_stop},
          {"plateau_window", cfg.plateau_window}}},
    };
}

// strategy sequence reproduced by the lift/coarse figure experiments
std::vector<StrategySpec> strategy_sequence(const ExperimentConfig& cfg) {
    const StrategySpec full = cfg.make_strategy();
    std::vector<StrategySpec> seq;
    switch (full.strategy()) {
        case Strategy::even_moments:
            for (int l = 1; l <= full.num_observables(); ++l) {
                seq.push_back(StrategySpec::even_moments(l, cfg.params));
            }
            break;
        case Strategy::even_moments_plus_stress:
            for (int l = 2; l <= full.num_observables(); ++l) {
                seq.push_back(StrategySpec::even_moments_plus_stress(l, cfg.params));
            }
            break;
        default:
            seq.push_back(full);
            break;
    }
    return seq;
}

std::string spec_tag(const StrategySpec& spec) {
    std::string t = spec.token();
    for (auto& c : t) {
        if (c == ':' || c == '+') c = '_';
    }
    return t;
}

// --- experiment bodies -----------------------------------------------------

void run_fenep_lift(const ExperimentConfig& cfg, Outputs& out) {
    const Ensemble init = sample_equilibrium(cfg.n_particles, cfg.params, cfg.seed);
    const FlowSchedule flow = cfg.make_flow();
    const StrategySpec spec = cfg.make_strategy();

    const long n_steps = std::lround(cfg.t_star / cfg.dt);
    Ensemble reference = simulate(init, flow, cfg.dt, n_steps, cfg.seed);
    const MacroState target = restrict_ensemble(reference, spec);
    write_histogram_csv(bin_ensemble(reference, cfg.n_bins),
                        out.path("histogram_reference.csv"));

    // constrained reconstruction from a uniform initial condition, with
    // snapshots of the distribution along the way
    const double kappa_star = flow.kappa(reference.time);
    const std::vector<long> snaps = {0, 10, 50, 250, 1000, cfg.m_inf};
    LiftOptions opts;
    opts.kappa_frozen = kappa_star;
    opts.dt = cfg.dt;
    opts.m_inf = 0;
    LiftReport state = lift(target, spec, opts, LiftInit::uniform(cfg.n_particles), cfg.seed);
    write_histogram_csv(bin_ensemble(state.ensemble, cfg.n_bins), out.path("histogram_lift_0.csv"));

    std::vector<double> monitor;
    long done = 0;
    for (std::size_t s = 1; s < snaps.size(); ++s) {
        const long upto = std::min(snaps[s], cfg.m_inf);
        if (upto <= done) continue;
        opts.m_inf = upto - done;
        opts.lift_step_base = state.next_lift_step;
        state = lift(target, spec, opts, LiftInit::given(std::move(state.ensemble)), cfg.seed);
        monitor.insert(monitor.end(), state.monitor.begin(), state.monitor.end());
        done = upto;
        write_histogram_csv(bin_ensemble(state.ensemble, cfg.n_bins),
                            out.path("histogram_lift_" + std::to_string(upto) + ".csv"));
    }
    write_monitor_csv(monitor, cfg.dt, "tau_p", out.path("trajectory.csv"));
    out.note("target_M", target.values);
    out.note("kappa_at_t_star", kappa_star);
}

void run_fenep_coarse(const ExperimentConfig& cfg, Outputs& out) {
    const FlowSchedule flow = cfg.make_flow();
    const StrategySpec spec = cfg.make_strategy();
    const Ensemble init = sample_equilibrium(cfg.n_particles, cfg.params, cfg.seed);

    MacroTrajectory ref = run_micro_reference(init, flow, cfg.dt, cfg.t_end, spec, cfg.seed);
    ref.write_csv(out.path("trajectory_reference.csv"));

    for (const long mult : {1L, 10L, 100L}) {
        CoarseConfig cc{spec,
                        cfg.dt,
                        cfg.k_steps * mult,
                        cfg.m_inf * cfg.k_steps * mult, // constrained interval ~ m_inf * Delta t
                        cfg.n_particles,
                        cfg.lift_mode,
                        cfg.seed,
                        cfg.warm_start,
                        cfg.plateau_stop,
                        cfg.plateau_window};
        const MacroState m0 = restrict_ensemble(init, spec);
        MacroTrajectory traj = run_coarse(m0, flow, cc, cfg.t_end, init);
        traj.write_csv(out.path("trajectory_dt" + std::to_string(mult) + ".csv"));
    }
}

void run_fene_lift(const ExperimentConfig& cfg, Outputs& out) {
    const FlowSchedule flow = cfg.make_flow();
    const Ensemble init = sample_equilibrium(cfg.n_particles, cfg.params, cfg.seed);
    const long n_steps = std::lround(cfg.t_star / cfg.dt);
    StrategySpec record_spec = StrategySpec::even_moments(1, cfg.params);
    Ensemble reference = simulate(init, flow, cfg.dt, n_steps, cfg.seed);
    const Histogram ref_hist = bin_ensemble(reference, cfg.n_bins);
    write_histogram_csv(ref_hist, out.path("histogram_reference.csv"));

    const double kappa_star =
        cfg.lift_mode == LiftMode::quasi_equilibrium ? 0.0 : flow.kappa(reference.time);
    json distances = json::object();
    for (const StrategySpec& spec : strategy_sequence(cfg)) {
        const MacroState target = restrict_ensemble(reference, spec);
        LiftOptions opts;
        opts.kappa_frozen = kappa_star;
        opts.dt = cfg.dt;
        opts.m_inf = cfg.m_inf;
        opts.stop_at_plateau = cfg.plateau_stop;
        opts.plateau_window = cfg.plateau_window;
        const LiftReport report = lift(target, spec, opts, LiftInit::given(reference), cfg.seed);
        const std::string tag = spec_tag(spec);
        const Histogram h = bin_ensemble(report.ensemble, cfg.n_bins);
        write_histogram_csv(h, out.path("histogram_" + tag + ".csv"));
        write_monitor_csv(report.monitor, cfg.dt,
                          spec.stress_constrained() ? "free_even_moment" : "tau_p",
                          out.path("monitor_" + tag + ".csv"));
        distances[tag] = {{"l1_to_reference", l1_distance(h, ref_hist)},
                          {"steps_run", report.steps_run},
                          {"plateau_step", report.plateau_step}};
    }
    out.note("lifted_distances", distances);
    out.note("kappa_frozen", kappa_star);
}

void run_qe_compare(const ExperimentConfig& cfg, Outputs& out) {
    const FlowSchedule flow = cfg.make_flow();
    const Ensemble init = sample_equilibrium(cfg.n_particles, cfg.params, cfg.seed);
    const long n_steps = std::lround(cfg.t_star / cfg.dt);
    Ensemble reference = simulate(init, flow, cfg.dt, n_steps, cfg.seed);
    const double tau_ref = stress(reference, cfg.params);
    const double kappa_star = flow.kappa(reference.time);

    json plateaus = json::object();
    for (const StrategySpec& spec : strategy_sequence(cfg)) {
        const MacroState target = restrict_ensemble(reference, spec);
        LiftOptions opts;
        opts.dt = cfg.dt;
        opts.m_inf = cfg.m_inf;
        opts.plateau_window = cfg.plateau_window;
        opts.kappa_frozen = kappa_star;
        const std::string tag = spec_tag(spec);
        // same seed and same lift-step base: both variants consume identical
        // random numbers
        const LiftReport frozen = lift(target, spec, opts, LiftInit::given(reference), cfg.seed);
        const LiftReport qe =
            quasi_equilibrium_lift(target, spec, opts, LiftInit::given(reference), cfg.seed);
        const char* label = spec.stress_constrained() ? "free_even_moment" : "tau_p";
        write_monitor_csv(frozen.monitor, cfg.dt, label,
                          out.path("monitor_" + tag + "_frozen.csv"));
        write_monitor_csv(qe.monitor, cfg.dt, label, out.path("monitor_" + tag + "_qe.csv"));
        plateaus[tag] = {{"frozen_plateau_step", frozen.plateau_step},
                         {"qe_plateau_step", qe.plateau_step}};
    }

    // quasi-equilibrium oracle density for the first even moment, exported
    // for plotting against lifted histograms
    const StrategySpec s1 = StrategySpec::even_moments(1, cfg.params);
    const MacroState t1 = restrict_ensemble(reference, s1);
    const QEDensity density = qe_solve(t1, s1, cfg.params);
    write_density_csv(density, 400, out.path("qe_density.csv"));

    out.note("tau_reference", tau_ref);
    out.note("kappa_frozen", kappa_star);
    out.note("plateaus", plateaus);
}

void run_fene_coarse(const ExperimentConfig& cfg, Outputs& out) {
    const FlowSchedule flow = cfg.make_flow();
    const Ensemble init = sample_equilibrium(cfg.n_particles, cfg.params, cfg.seed);
    StrategySpec record_spec = StrategySpec::even_moments(1, cfg.params);
    MacroTrajectory ref = run_micro_reference(init, flow, cfg.dt, cfg.t_end, record_spec,
                                              cfg.seed, cfg.k_steps);
    ref.write_csv(out.path("trajectory_reference.csv"));

    for (const StrategySpec& spec : strategy_sequence(cfg)) {
        CoarseConfig cc{spec,      cfg.dt,        cfg.k_steps, cfg.m_inf,
                        cfg.n_particles, cfg.lift_mode, cfg.seed,    cfg.warm_start,
                        cfg.plateau_stop, cfg.plateau_window};
        const MacroState m0 = restrict_ensemble(init, spec);
        MacroTrajectory traj = run_coarse(m0, flow, cc, cfg.t_end, init);
        traj.write_csv(out.path("trajectory_" + spec_tag(spec) + ".csv"));
    }
}

} // namespace

std::string run_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
    Outputs out(out_dir);
    const auto wall_start = std::chrono::steady_clock::now();
    try {
        switch (cfg.experiment) {
            case ExperimentKind::fenep_lift:
                run_fenep_lift(cfg, out);
                break;
            case ExperimentKind::fenep_coarse:
                run_fenep_coarse(cfg, out);
                break;
            case ExperimentKind::fene_lift:
                run_fene_lift(cfg, out);
                break;
            case ExperimentKind::qe_compare:
                run_qe_compare(cfg, out);
                break;
            case ExperimentKind::fene_coarse_startup:
            case ExperimentKind::fene_coarse_complex:
                run_fene_coarse(cfg, out);
                break;
        }
    } catch (const Error& e) {
        json err{{"error", static_cast<int>(e.code())}, {"message", e.what()}};
        std::ofstream f(fs::path(out_dir) / "error.json");
        f << err.dump(2) << '\n';
        throw;
    } catch (const std::exception& e) {
        json err{{"error", static_cast<int>(ErrorCode::internal)}, {"message", e.what()}};
        std::ofstream f(fs::path(out_dir) / "error.json");
        f << err.dump(2) << '\n';
        throw;
    }

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    json manifest{
        {"tool", "fene-closure"},
        {"version", kVersion},
        {"config", config_json(cfg)},
        {"seed", cfg.seed},
        {"threads", num_threads()},
        {"outputs", out.files()},
        {"results", out.notes()},
        {"wall_time_seconds", wall},
    };
    const std::string manifest_path = (fs::path(out_dir) / "manifest.json").string();
    std::ofstream f(manifest_path);
    if (!f) throw IoError("cannot write manifest: " + manifest_path);
    f << manifest.dump(2) << '\n';
    return manifest_path;
}

} // namespace fene
