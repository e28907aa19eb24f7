#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lakevortex/artifacts.hpp"
#include "lakevortex/errors.hpp"
#include "lakevortex/rearrangement.hpp"
#include "lakevortex/scenario.hpp"
#include "lakevortex/version.hpp"

namespace {

using namespace lakevortex;
using ordered_json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitStopped = 3;
constexpr int kExitSolver = 4;

struct CommonOpts {
    std::string config_path;
    std::string output;
    int resolution = 0;
    double dt_cap = -1.0;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("-c,--config", opts.config_path, "run config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("-o,--output", opts.output, "output directory (overrides config)");
    cmd->add_option("--resolution", opts.resolution, "grid cells per unit length (override)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--dt", opts.dt_cap, "hard cap on the time step (override)")
        ->check(CLI::NonNegativeNumber);
}

RunConfig load_with_overrides(const CommonOpts& opts) {
    RunConfig cfg = load_config(opts.config_path);
    if (opts.resolution > 0) cfg.lake.resolution = opts.resolution;
    if (opts.dt_cap >= 0.0) cfg.time.dt_cap = opts.dt_cap;
    if (!opts.output.empty())
        cfg.output_dir = opts.output;
    else if (const char* env = std::getenv("LAKEVORTEX_OUTPUT"))
        cfg.output_dir = env;
    return cfg;
}

void print_run_line(const ScenarioRun& run) {
    const DiagnosticsRecord& last = run.series.blobs[0].back();
    std::cout << "eps=" << fmt_double(run.eps) << "  steps=" << run.series.steps
              << "  t_end=" << fmt_double(run.series.stop.t) << "  z=(" << fmt_double(last.z.x) << ", "
              << fmt_double(last.z.y) << ")  stop=";
    switch (run.series.stop.reason) {
        case StopInfo::Reason::Completed: std::cout << "completed"; break;
        case StopInfo::Reason::MonitorFired:
            std::cout << "monitor_fired (" << run.series.stop.detail << ")";
            break;
        case StopInfo::Reason::GuardTripped:
            std::cout << "guard_tripped (" << run.series.stop.detail << ")";
            break;
    }
    std::cout << "  [" << fmt_double(run.wall_clock_s) << " s]\n";
}

int cmd_simulate(const CommonOpts& opts, double eps_override) {
    RunConfig cfg = load_with_overrides(opts);
    double eps = cfg.eps_values.front();
    if (eps_override > 0.0)
        eps = eps_override;
    else if (cfg.eps_values.size() > 1)
        throw ConfigError("config lists an eps sweep; run `sweep`, or pick one with --eps");
    if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("--eps must lie in (0, 1)");

    ScenarioRun run = run_scenario(cfg, eps);
    RunConfig as_run = cfg;
    as_run.eps_values = {eps};
    write_run_artifacts(cfg.output_dir, as_run, run);
    print_run_line(run);
    std::cout << "artifacts: " << cfg.output_dir << "\n";
    return run.series.stop.reason == StopInfo::Reason::Completed ? kExitOk : kExitStopped;
}

int cmd_sweep(const CommonOpts& opts) {
    RunConfig cfg = load_with_overrides(opts);
    std::vector<ScenarioRun> runs;
    runs.reserve(cfg.eps_values.size());
    for (double eps : cfg.eps_values) {
        runs.push_back(run_scenario(cfg, eps));
        print_run_line(runs.back());
    }
    const SweepReport report = sweep_report(cfg, runs);
    write_sweep_artifacts(cfg.output_dir, cfg, runs, report);
    for (const SweepLaw& law : report.laws) {
        std::cout << law.verdict << "  " << law.name << " [" << law.protocol << "]:";
        for (double v : law.values) std::cout << "  " << fmt_double(v);
        std::cout << "\n";
    }
    std::cout << "energy fit: E(0) = " << fmt_double(report.energy_slope) << " * |ln eps| + "
              << fmt_double(report.energy_offset)
              << "  (max residual " << fmt_double(report.energy_fit_residual) << ")\n"
              << "artifacts: " << cfg.output_dir << "\n";
    for (const ScenarioRun& run : runs)
        if (run.series.stop.reason != StopInfo::Reason::Completed) return kExitStopped;
    return kExitOk;
}

std::string grid_csv(const Lake& lake, const std::vector<double>& values, const char* column) {
    std::ostringstream out;
    out << "x,y," << column << '\n';
    for (int c = 0; c < lake.n_cells(); ++c) {
        const int flat = lake.cell_of[c];
        const Vec2 p = lake.cell_center(flat % lake.nx, flat / lake.nx);
        out << fmt_double(p.x) << ',' << fmt_double(p.y) << ',' << fmt_double(values[flat]) << '\n';
    }
    return out.str();
}

/// Dirichlet Green function of the Laplacian on the disc B(center, R),
/// by the reflection across the circle (rescaled to the unit disc).
double disc_green_image(Vec2 x, Vec2 y, Vec2 center, double R) {
    const Vec2 xs = (x - center) / R, ys = (y - center) / R;
    const double ry = norm(ys);
    if (ry < 1e-12) return std::log(norm(xs)) / (2.0 * M_PI);
    const Vec2 y_image = ys / (ry * ry);
    return std::log(norm(xs - ys) / (ry * norm(xs - y_image))) / (2.0 * M_PI);
}

int cmd_green_probe(const CommonOpts& opts, const std::vector<double>& y_flat) {
    RunConfig cfg = load_with_overrides(opts);
    const Vec2 y{y_flat[0], y_flat[1]};
    const Lake lake = build_lake(cfg.lake);
    const WeightedOperator op = assemble(lake);
    const StreamField green = green_kernel(op, y, cfg.solver);
    const RemainderField remainder = remainder_kernel(op, green, y);

    std::vector<double> singular(green.values.size(), 0.0);
    const double by = depth(lake, y);
    for (int c = 0; c < lake.n_cells(); ++c) {
        const int flat = lake.cell_of[c];
        const Vec2 p = lake.cell_center(flat % lake.nx, flat / lake.nx);
        if (flat == remainder.singular_cell) continue;
        singular[flat] =
            std::sqrt(lake.b[flat] * by) * std::log(norm(p - y)) / (2.0 * M_PI);
    }

    const std::string& dir = cfg.output_dir;
    write_text(dir + "/green.csv", grid_csv(lake, green.values, "g"));
    write_stream_binary(dir + "/green.bin", lake, green);
    write_text(dir + "/singular.csv", grid_csv(lake, singular, "s"));
    write_text(dir + "/remainder.csv", grid_csv(lake, remainder.values, "r"));

    ordered_json m;
    m["schema"] = "lakevortex/green-probe-v1";
    m["config_hash"] = "fnv1a:" + fnv1a_hex(canonical_config(cfg));
    m["versions"] = {{"lakevortex", kVersion}, {"compiler", __VERSION__}};
    m["y"] = {y.x, y.y};
    m["grid"] = {{"h", lake.h}, {"nx", lake.nx}, {"ny", lake.ny}};
    m["solver"] = {{"backend", green.info.backend},
                   {"iterations", green.info.iterations},
                   {"residual", green.info.residual}};

    const bool flat_disc = cfg.lake.shape.kind == Shape::Kind::Disc &&
                           cfg.lake.depth.c.kind == ScalarExpr::Kind::Constant &&
                           cfg.lake.depth.c.a0 == 1.0 && cfg.lake.depth.alpha == 0.0;
    if (flat_disc) {
        const Vec2 c0 = cfg.lake.shape.center;
        const double R = cfg.lake.shape.radius, margin = 0.2 * R;
        double g_err = 0.0, g_range = 0.0, r_err = 0.0, r_lo = 0.0, r_hi = 0.0;
        bool have_r = false;
        for (int c = 0; c < lake.n_cells(); ++c) {
            const int flat = lake.cell_of[c];
            const Vec2 p = lake.cell_center(flat % lake.nx, flat / lake.nx);
            if (dist_boundary(lake, p) < margin) continue;
            const double r_exact = disc_green_image(p, y, c0, R) -
                                   std::log(norm(p - y)) / (2.0 * M_PI);
            if (flat != remainder.singular_cell) {
                r_err = std::max(r_err, std::abs(remainder.values[flat] - r_exact));
                r_lo = have_r ? std::min(r_lo, r_exact) : r_exact;
                r_hi = have_r ? std::max(r_hi, r_exact) : r_exact;
                have_r = true;
            }
            if (norm(p - y) < margin) continue;
            const double g_exact = disc_green_image(p, y, c0, R);
            g_err = std::max(g_err, std::abs(green.values[flat] - g_exact));
            g_range = std::max(g_range, std::abs(g_exact));
        }
        m["image_comparison"] = {{"margin", margin},
                                 {"green_max_abs_err", g_err},
                                 {"green_max_abs", g_range},
                                 {"remainder_max_abs_err", r_err},
                                 {"remainder_range", r_hi - r_lo}};
        std::cout << "image comparison: |G err| " << fmt_double(g_err) << " of " << fmt_double(g_range)
                  << ", |R err| " << fmt_double(r_err) << " of range " << fmt_double(r_hi - r_lo)
                  << "\n";
    }
    write_text(dir + "/manifest.json", m.dump(2) + "\n");
    std::cout << "artifacts: " << dir << "\n";
    return kExitOk;
}

int cmd_limit_ode(const CommonOpts& opts, double fine_dt) {
    RunConfig cfg = load_with_overrides(opts);
    const Lake lake = build_lake(cfg.lake);
    ordered_json report = ordered_json::array();
    for (std::size_t i = 0; i < cfg.vortices.size(); ++i) {
        const VortexConfig& v = cfg.vortices[i];
        const LimitTrajectory traj = integrate_limit(lake.form, v.center, v.gamma, cfg.time.T,
                                                     fine_dt, cfg.time.sample_interval);
        write_text(cfg.output_dir + "/limit" + std::to_string(i) + ".csv",
                   limit_csv(traj, lake.form));
        ordered_json entry;
        entry["vortex"] = i;
        entry["z0"] = {v.center.x, v.center.y};
        entry["level0"] = traj.level0;
        entry["max_level_drift"] = traj.max_level_drift;
        try {
            const LimitTrajectory closed =
                analytic_radial(lake.form, cfg.lake.shape.center, v.center, v.gamma, traj.t);
            entry["radial_closed_form"] = true;
            entry["sup_err_vs_closed_form"] = compare(traj, closed.z).sup_err;
        } catch (const ConfigError&) {
            entry["radial_closed_form"] = false;
        }
        report.push_back(std::move(entry));
    }
    ordered_json m;
    m["schema"] = "lakevortex/limit-ode-v1";
    m["config_hash"] = "fnv1a:" + fnv1a_hex(canonical_config(cfg));
    m["dt"] = fine_dt;
    m["trajectories"] = std::move(report);
    write_text(cfg.output_dir + "/limit_report.json", m.dump(2) + "\n");
    std::cout << "artifacts: " << cfg.output_dir << "\n";
    return kExitOk;
}

RearrangementInstance load_samples_csv(const std::string& path, double M0, double gamma) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read samples file '" + path + "'");
    RearrangementInstance inst;
    inst.M0 = M0;
    inst.gamma = gamma;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (header) {  // tolerate an s,g header row
            header = false;
            if (line.find_first_not_of("0123456789.,+-eE \t\r") == std::string::npos)
                ;  // numeric first row: fall through and parse it
            else
                continue;
        }
        std::istringstream row(line);
        double s, g;
        char comma;
        if (!(row >> s >> comma >> g) || comma != ',')
            throw ConfigError("samples file: bad row '" + line + "' (want s,g)");
        inst.s.push_back(s);
        inst.g.push_back(g);
    }
    return inst;
}

int cmd_rearrange_check(const std::string& samples_path, double M0, double gamma, int m,
                        const std::vector<double>& center, const std::vector<double>& domain,
                        const std::string& output) {
    const RearrangementInstance inst = load_samples_csv(samples_path, M0, gamma);
    const double bound = rearrangement_bound(inst);
    const BruteForceResult brute = brute_force_sup(inst, {center[0], center[1]},
                                                   {domain[0], domain[1]},
                                                   {domain[2], domain[3]}, m);
    const double ratio = bound != 0.0 ? brute.value / bound : 0.0;
    ordered_json rep;
    rep["schema"] = "lakevortex/rearrange-check-v1";
    rep["M0"] = inst.M0;
    rep["gamma"] = inst.gamma;
    rep["R0"] = std::sqrt(inst.gamma / (M_PI * inst.M0));
    rep["upper_bound"] = bound;
    rep["brute_force"] = {{"value", brute.value},
                          {"m", brute.m},
                          {"cell_area", brute.cell_area},
                          {"partial_cells", brute.partial_cells}};
    rep["ratio"] = ratio;
    write_text(output + "/rearrange_report.json", rep.dump(2) + "\n");
    std::cout << "bound=" << fmt_double(bound) << "  brute=" << fmt_double(brute.value)
              << "  ratio=" << fmt_double(ratio) << "\nartifacts: " << output << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lakevortex: particle runs of concentrated vortices in lakes with topography"};
    app.set_version_flag("--version", std::string("lakevortex ") + kVersion);
    app.require_subcommand(1);

    CommonOpts sim_opts;
    double sim_eps = 0.0;
    CLI::App* sim = app.add_subcommand("simulate", "run one scenario and write artifacts");
    add_common(sim, sim_opts);
    sim->add_option("--eps", sim_eps, "blob scale (required if the config lists a sweep)");

    CommonOpts sweep_opts;
    CLI::App* sweep = app.add_subcommand("sweep", "run every eps in the config, report scalings");
    add_common(sweep, sweep_opts);

    CommonOpts green_opts;
    std::vector<double> green_y;
    CLI::App* green = app.add_subcommand("green-probe", "solve G(., y) and its decomposition");
    add_common(green, green_opts);
    green->add_option("--y", green_y, "source point")->expected(2)->required();

    CommonOpts limit_opts;
    double limit_dt = 1e-3;
    CLI::App* limit = app.add_subcommand("limit-ode", "integrate the limit vortex motion");
    add_common(limit, limit_opts);
    limit->add_option("--ode-dt", limit_dt, "internal RK4 step")->check(CLI::PositiveNumber);

    std::string re_samples, re_output = "out";
    double re_M0 = 1.0, re_gamma = 1.0;
    int re_m = 48;
    std::vector<double> re_center{0.0, 0.0}, re_domain{-1.0, -1.0, 1.0, 1.0};
    CLI::App* re = app.add_subcommand("rearrange-check",
                                      "compare the sharp convolution bound with brute force");
    re->add_option("--samples", re_samples, "kernel samples CSV (s,g rows)")
        ->required()
        ->check(CLI::ExistingFile);
    re->add_option("--M0", re_M0, "density cap")->check(CLI::PositiveNumber);
    re->add_option("--gamma", re_gamma, "mass budget")->check(CLI::PositiveNumber);
    re->add_option("--m", re_m, "brute-force grid size")->check(CLI::PositiveNumber);
    re->add_option("--x", re_center, "evaluation point")->expected(2);
    re->add_option("--domain", re_domain, "brute-force box x0 y0 x1 y1")->expected(4);
    re->add_option("-o,--output", re_output, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (sim->parsed()) return cmd_simulate(sim_opts, sim_eps);
        if (sweep->parsed()) return cmd_sweep(sweep_opts);
        if (green->parsed()) return cmd_green_probe(green_opts, green_y);
        if (limit->parsed()) return cmd_limit_ode(limit_opts, limit_dt);
        if (re->parsed())
            return cmd_rearrange_check(re_samples, re_M0, re_gamma, re_m, re_center, re_domain,
                                       re_output);
    } catch (const SolverError& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kExitSolver;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const SeparationError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitConfig;
}
