#include "lakevortex/scenario.hpp"

#include <chrono>
#include <cmath>

#include <json.hpp>

#include "lakevortex/artifacts.hpp"
#include "lakevortex/errors.hpp"
#include "lakevortex/velocity.hpp"
#include "lakevortex/version.hpp"

namespace lakevortex {

ScenarioRun run_scenario(const RunConfig& config, double eps) {
    ScenarioRun run;
    run.eps = eps;
    run.ln_eps = std::abs(std::log(eps));
    run.lake = std::make_unique<Lake>(build_lake(config.lake));
    run.op = std::make_unique<WeightedOperator>(assemble(*run.lake));

    std::vector<Vec2> centers;
    centers.reserve(config.vortices.size());
    for (const VortexConfig& v : config.vortices) centers.push_back(v.center);

    std::vector<ComponentSet> monitor;
    double rho_b = 0.0, r0 = 0.0;
    bool degenerate = false;
    try {
        SeparationConstants sep = separation_constants(*run.lake, centers);
        monitor = std::move(sep.components);
        rho_b = sep.rho_b;
        r0 = sep.r0;
    } catch (const SeparationError& e) {
        if (e.kind == SeparationError::Kind::Overlap) throw;
        // No boundary-disjoint level band exists (constant depth, or bands
        // that always reach the shore): run with a vacuous exit monitor.
        degenerate = true;
        monitor.assign(centers.size(), ComponentSet{});
        run.separation_note = e.what();
    }

    run.blobs0.reserve(config.vortices.size());
    for (const VortexConfig& v : config.vortices)
        run.blobs0.push_back(init_blob(*run.lake, v.center, v.gamma, eps, v.M0, v.profile));

    double delta = 0.0;
    for (const Blob& b : run.blobs0) delta = std::max(delta, kernel_delta(*run.lake, b));

    run.ctx = SimContext{run.lake.get(), run.op.get(), std::move(monitor),
                         eps,            run.ln_eps,   delta,
                         config.solver};

    SimState state;
    state.blobs = run.blobs0;
    const auto t0 = std::chrono::steady_clock::now();
    run.series = simulate(run.ctx, std::move(state), config.time);
    run.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    run.series.rho_b = rho_b;
    run.series.r0 = r0;
    run.series.separation_degenerate = degenerate;
    return run;
}

std::string bounded_verdict(const std::vector<double>& values, double atol) {
    if (values.size() < 2) return "INCONCLUSIVE";
    double lo = values[0], hi = values[0];
    bool nonincreasing = true;
    for (std::size_t k = 0; k < values.size(); ++k) {
        lo = std::min(lo, values[k]);
        hi = std::max(hi, values[k]);
        if (k > 0 && values[k] > values[k - 1] + atol) nonincreasing = false;
    }
    return (hi <= 2.0 * lo + atol || nonincreasing) ? "PASS" : "FAIL";
}

std::string decreasing_verdict(const std::vector<double>& values) {
    if (values.size() < 2) return "INCONCLUSIVE";
    for (std::size_t k = 1; k < values.size(); ++k)
        if (!(values[k] < values[k - 1])) return "FAIL";
    return "PASS";
}

LimitTrajectory limit_reference(const ScenarioRun& run, std::size_t blob) {
    // The right-hand side is analytic and cheap; a fixed fine step makes the
    // reference error negligible next to the quantities compared against it.
    return integrate_limit_at(run.lake->form, run.blobs0[blob].z0, run.blobs0[blob].gamma,
                              run.series.times, 1e-3);
}

std::vector<Vec2> center_path(const ScenarioRun& run, std::size_t blob) {
    std::vector<Vec2> path;
    for (const DiagnosticsRecord& r : run.series.blobs.at(blob)) path.push_back(r.z);
    return path;
}

namespace {

double sweep_atol(const std::vector<double>& values) {
    double scale = 1.0;
    for (double v : values) scale = std::max(scale, std::abs(v));
    return 1e-12 * scale;
}

}  // namespace

SweepReport sweep_report(const RunConfig& config, const std::vector<ScenarioRun>& runs) {
    (void)config;
    SweepReport rep;
    std::vector<double> law_I, law_K, law_E, law_traj, law_Rt, law_mass;
    std::vector<double> E0s, Ls;
    for (const ScenarioRun& run : runs) {
        rep.eps.push_back(run.eps);
        const double L = run.ln_eps;
        double sup_I = 0.0, sup_K = 0.0, sup_Rt = 0.0, sup_mass = 0.0, sup_traj = 0.0;
        for (std::size_t b = 0; b < run.series.blobs.size(); ++b) {
            const LimitTrajectory ref = limit_reference(run, b);
            const auto& recs = run.series.blobs[b];
            for (std::size_t k = 0; k < recs.size(); ++k) {
                sup_I = std::max(sup_I, recs[k].I);
                sup_K = std::max(sup_K, recs[k].K);
                sup_Rt = std::max(sup_Rt, recs[k].R_t);
                sup_mass = std::max(sup_mass, recs[k].mass_out);
                sup_traj = std::max(sup_traj, norm(recs[k].z - ref.z[k]));
            }
        }
        law_I.push_back(sup_I * L);
        law_K.push_back(sup_K * L);
        law_Rt.push_back(sup_Rt * std::pow(L, 0.125));
        law_mass.push_back(sup_mass * std::log(L));
        law_traj.push_back(sup_traj);

        const double E0 = run.series.blobs[0][0].E;
        const double g = run.blobs0[0].gamma;
        law_E.push_back(E0 / ((0.5 / M_PI) * g * g * run.series.b0[0] * L));
        E0s.push_back(E0);
        Ls.push_back(L);
    }

    auto add = [&rep](const char* name, std::vector<double> values, const char* protocol) {
        SweepLaw law;
        law.name = name;
        law.protocol = protocol;
        law.verdict = std::string(protocol) == "decreasing"
                          ? decreasing_verdict(values)
                          : bounded_verdict(values, sweep_atol(values));
        law.values = std::move(values);
        rep.laws.push_back(std::move(law));
    };
    add("inertia_scaled", law_I, "factor2-or-monotone");
    add("transverse_scaled", law_K, "factor2-or-monotone");
    add("energy_ratio", law_E, "factor2-or-monotone");
    add("trajectory_error", law_traj, "decreasing");
    add("support_scaled", law_Rt, "factor2-or-monotone");
    add("mass_out_scaled", law_mass, "factor2-or-monotone");

    // Least-squares affine fit E(0) = slope * L + offset over the members.
    const std::size_t n = E0s.size();
    if (n >= 2) {
        double mL = 0.0, mE = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            mL += Ls[k];
            mE += E0s[k];
        }
        mL /= static_cast<double>(n);
        mE /= static_cast<double>(n);
        double cov = 0.0, var = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            cov += (Ls[k] - mL) * (E0s[k] - mE);
            var += (Ls[k] - mL) * (Ls[k] - mL);
        }
        rep.energy_slope = var > 0.0 ? cov / var : 0.0;
        rep.energy_offset = mE - rep.energy_slope * mL;
        for (std::size_t k = 0; k < n; ++k)
            rep.energy_fit_residual =
                std::max(rep.energy_fit_residual,
                         std::abs(E0s[k] - (rep.energy_slope * Ls[k] + rep.energy_offset)));
    } else if (n == 1) {
        rep.energy_offset = E0s[0];
    }

    rep.all_pass = true;
    for (const SweepLaw& law : rep.laws)
        if (law.verdict != "PASS") rep.all_pass = false;
    return rep;
}

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json point_json(Vec2 p) { return ordered_json::array({p.x, p.y}); }

const char* stop_name(StopInfo::Reason r) {
    switch (r) {
        case StopInfo::Reason::Completed: return "completed";
        case StopInfo::Reason::MonitorFired: return "monitor_fired";
        case StopInfo::Reason::GuardTripped: return "guard_tripped";
    }
    return "unknown";
}

ordered_json manifest_base(const RunConfig& config, const char* kind) {
    const std::string canonical = canonical_config(config);
    ordered_json m;
    m["schema"] = "lakevortex/manifest-v1";
    m["kind"] = kind;
    m["name"] = config.name;
    m["config"] = ordered_json::parse(canonical);
    m["config_hash"] = "fnv1a:" + fnv1a_hex(canonical);
    m["versions"] = {{"lakevortex", kVersion}, {"compiler", __VERSION__}};
    m["seeds"] = "none: particle lattice and Halton probe set are deterministic";
    return m;
}

ordered_json laws_json(const SweepReport& report) {
    ordered_json laws = ordered_json::array();
    for (const SweepLaw& law : report.laws)
        laws.push_back({{"name", law.name},
                        {"values", law.values},
                        {"protocol", law.protocol},
                        {"verdict", law.verdict}});
    return laws;
}

}  // namespace

void write_run_artifacts(const std::string& dir, const RunConfig& config,
                         const ScenarioRun& run) {
    const Lake& lake = *run.lake;
    std::vector<SvgSeries> traj;
    static const char* const kColors[] = {"#1f6fb2", "#c23b22", "#2c8a4b", "#8a2ca0"};
    for (std::size_t b = 0; b < run.series.blobs.size(); ++b) {
        write_text(dir + "/blob" + std::to_string(b) + ".csv",
                   timeseries_csv(run.series, b));
        write_text(dir + "/blob" + std::to_string(b) + "_particles_initial.csv",
                   blob_csv(run.blobs0[b]));
        write_text(dir + "/blob" + std::to_string(b) + "_particles_initial.json",
                   blob_sidecar_json(run.blobs0[b], 0.0));
        const char* color = kColors[b % 4];
        traj.push_back({"vortex " + std::to_string(b), color, center_path(run, b), true});
        const LimitTrajectory ref = limit_reference(run, b);
        traj.push_back({"limit " + std::to_string(b), "#999999", ref.z, false});
    }
    write_text(dir + "/trajectory.svg",
               svg_plot("vortex centers vs limit dynamics (T=" + fmt_double(config.time.T) + ")",
                        traj));

    ordered_json m = manifest_base(config, "run");
    m["eps"] = run.eps;
    m["ln_eps"] = run.ln_eps;
    m["grid"] = {{"h", lake.h},
                 {"nx", lake.nx},
                 {"ny", lake.ny},
                 {"interior_cells", lake.n_cells()}};
    m["separation"] = {{"rho_b", run.series.rho_b},
                       {"r0", run.series.r0},
                       {"degenerate", run.series.separation_degenerate},
                       {"note", run.separation_note}};
    ordered_json blobs = ordered_json::array();
    for (std::size_t b = 0; b < run.blobs0.size(); ++b) {
        const Blob& blob = run.blobs0[b];
        blobs.push_back({{"z0", point_json(blob.z0)},
                         {"gamma", blob.gamma},
                         {"M0", blob.M0},
                         {"particles", blob.count()},
                         {"spacing", blob.spacing},
                         {"omega_eps2", blob.omega_eps2},
                         {"b0", run.series.b0[b]}});
    }
    m["blobs"] = std::move(blobs);
    const double margin = run.series.r0 > 0.0 ? run.series.r0 : 4.0 * lake.h;
    ordered_json probes = ordered_json::array();
    for (Vec2 p : probe_points(lake, margin)) probes.push_back(point_json(p));
    m["probes"] = {{"margin", margin}, {"points", std::move(probes)}};
    if (!run.series.blobs.empty() && !run.series.blobs[0].empty()) {
        const double h0 = run.series.blobs[0][0].h_ladder0;
        ordered_json ladder = ordered_json::array();
        for (int k = 0; k < kMassLadder; ++k) ladder.push_back(h0 / static_cast<double>(1 << k));
        m["h_ladder"] = std::move(ladder);
    }
    m["csv_columns"] = kTimeSeriesHeader;
    m["stop"] = {{"reason", stop_name(run.series.stop.reason)},
                 {"t", run.series.stop.t},
                 {"detail", run.series.stop.detail}};
    m["steps"] = run.series.steps;
    m["dt_min"] = run.series.dt_min;
    m["dt_max"] = run.series.dt_max;
    // Wall clock is informational only; it is the one field reruns may change.
    m["wall_clock_s"] = run.wall_clock_s;
    write_text(dir + "/manifest.json", m.dump(2) + "\n");
}

void write_sweep_artifacts(const std::string& dir, const RunConfig& config,
                           const std::vector<ScenarioRun>& runs, const SweepReport& report) {
    double total_wall = 0.0;
    for (std::size_t k = 0; k < runs.size(); ++k) {
        RunConfig member = config;
        member.eps_values = {runs[k].eps};
        write_run_artifacts(dir + "/eps_" + fmt_double(runs[k].eps), member, runs[k]);
        total_wall += runs[k].wall_clock_s;
    }

    ordered_json rep;
    rep["schema"] = "lakevortex/sweep-report-v1";
    rep["name"] = config.name;
    rep["eps"] = report.eps;
    rep["laws"] = laws_json(report);
    rep["energy_fit"] = {{"slope", report.energy_slope},
                         {"offset", report.energy_offset},
                         {"max_residual", report.energy_fit_residual}};
    rep["all_pass"] = report.all_pass;
    write_text(dir + "/sweep_report.json", rep.dump(2) + "\n");

    // One normalized curve per law against |ln eps| so the six scalings share
    // a single panel; raw values live in the report JSON.
    std::vector<SvgSeries> series;
    static const char* const kColors[] = {"#1f6fb2", "#c23b22", "#2c8a4b",
                                          "#8a2ca0", "#b8860b", "#444444"};
    for (std::size_t i = 0; i < report.laws.size(); ++i) {
        const SweepLaw& law = report.laws[i];
        double scale = 0.0;
        for (double v : law.values) scale = std::max(scale, std::abs(v));
        if (scale == 0.0) scale = 1.0;
        SvgSeries s{law.name + " (" + law.verdict + ")", kColors[i % 6], {}, true};
        for (std::size_t k = 0; k < runs.size(); ++k)
            s.points.push_back({runs[k].ln_eps, law.values[k] / scale});
        series.push_back(std::move(s));
    }
    write_text(dir + "/sweep_scalings.svg",
               svg_plot("scaling laws vs |ln eps| (each normalized by its max)", series));

    ordered_json m = manifest_base(config, "sweep");
    m["eps"] = report.eps;
    ordered_json members = ordered_json::array();
    for (const ScenarioRun& run : runs) members.push_back("eps_" + fmt_double(run.eps));
    m["members"] = std::move(members);
    m["laws"] = laws_json(report);
    m["all_pass"] = report.all_pass;
    m["wall_clock_s"] = total_wall;
    write_text(dir + "/manifest.json", m.dump(2) + "\n");
}

}  // namespace lakevortex
