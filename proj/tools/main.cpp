#include "noperr/config.hpp"
#include "noperr/experiments.hpp"
#include "noperr/io.hpp"
#include "noperr/parallel.hpp"
#include "noperr/records.hpp"
#include "svg_plot.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace noperr;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kRuntime = 1, kMissing = 2, kSchema = 3, kBounds = 4 };

struct Options {
    std::string command;
    std::string config;
    std::string out;
    std::string model;
    std::size_t N = 0;
    double s = -1;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    bool plot = false;
    bool strict = false;
};

struct Outputs {
    fs::path dir;
    std::string name;
    std::vector<std::string> written;

    fs::path file(const std::string& suffix) const { return dir / (name + suffix); }

    template <class F>
    void text(const std::string& suffix, F&& f) {
        fs::path p = file(suffix);
        std::ofstream os(p, std::ios::binary);
        if (!os) throw std::runtime_error("cannot write '" + p.string() + "'");
        f(os);
        os.close();
        if (!os) throw std::runtime_error("failed writing '" + p.string() + "'");
        written.push_back(p.string());
    }
    void svg(const std::string& suffix, const std::vector<svg::Panel>& panels, std::size_t cols = 3) {
        svg::write(file(suffix).string(), panels, cols);
        written.push_back(file(suffix).string());
    }
};

// ---- plots

void plot_sweep(Outputs& o, const std::vector<ErrorCurve>& curves, double c_ds) {
    svg::Panel rel{"relative error", "N", "mean RelErr"};
    svg::Panel bnd{"absolute error and bound", "N", "|E_T|"};
    for (std::size_t i = 0; i < curves.size(); ++i) {
        const auto& c = curves[i];
        char lab[32];
        std::snprintf(lab, sizeof lab, "s=%g", c.s);
        svg::Series r{lab, {}, {}, svg::palette(i)};
        svg::Series a = r, b = r;
        b.label += " bound";
        b.dashed = true;
        b.markers = false;
        for (const auto& p : c.points) {
            r.x.push_back(double(p.N));
            r.y.push_back(p.mean_rel);
            a.x.push_back(double(p.N));
            a.y.push_back(p.mean_abs);
            b.x.push_back(double(p.N));
            b.y.push_back(c_ds * p.mean_bound);
        }
        rel.series.push_back(r);
        bnd.series.push_back(a);
        bnd.series.push_back(b);
    }
    o.svg("_error.svg", {rel, bnd}, 2);
}

svg::Panel stability_panel(const PerturbationCurve& c, std::size_t color) {
    svg::Panel p{"T=" + std::to_string(c.T), "epsilon", "mean |L(v+eps xi) - L(v)|"};
    p.logx = p.logy = false;
    svg::Series f{"f(eps)", c.eps, c.mean, svg::palette(color)};
    svg::Series cn{"C_NT eps", {}, {}, "#555", false, true};
    svg::Series em{"emp. Lipschitz", {}, {}, "#2ca02c", false, true};
    for (double e : c.eps) {
        cn.x.push_back(e);
        cn.y.push_back(c.c_nt * e);
        em.x.push_back(e);
        em.y.push_back(c.empirical_lipschitz * e);
    }
    p.series = {f, em, cn};
    return p;
}

void plot_nyquist(Outputs& o, const std::vector<NyquistCurve>& curves) {
    std::vector<svg::Panel> panels;
    for (std::size_t i = 0; i < curves.size(); ++i) {
        const auto& c = curves[i];
        svg::Panel p{"k=" + std::to_string(c.k), "L", "mean RelErr"};
        svg::Series s{"", {}, {}, svg::palette(i)};
        for (const auto& q : c.points) {
            s.x.push_back(double(q.N));
            s.y.push_back(q.mean_rel);
        }
        p.series.push_back(s);
        p.vlines.push_back({double(c.nyquist_L), "L=2k"});
        panels.push_back(p);
    }
    o.svg("_nyquist.svg", panels, 3);
}

// ---- commands

json sweep_input_json(const SweepConfig& s) {
    return {{"n_full", s.n_full},
            {"factors", s.factors},
            {"smoothness", s.smoothness},
            {"samples", s.samples},
            {"seed_offset", s.seed_offset},
            {"metric", metric_name(s.metric)},
            {"lift", lift_name(s.lift)},
            {"regime", regime_name(s.regime)},
            {"conv", s.mode.name()}};
}

int bound_exit(bool violated, const Options& opt, const std::string& what) {
    if (!violated) return kOk;
    std::cerr << "warning: " << what << "\n";
    return opt.strict ? kBounds : kOk;
}

int cmd_sweep(RunConfig& cfg, const Options& opt, Outputs& o, json& summary) {
    std::vector<ErrorCurve> curves;
    if (cfg.model_file) {
        OperatorModel m = build_model(cfg);
        cfg.sweep.arch.dim = m.dim;
        cfg.sweep.validate();
        for (double s : cfg.sweep.smoothness) curves.push_back(run_discretization_sweep(cfg.sweep, m, s));
    } else {
        curves = run_discretization_sweep(cfg.sweep);
    }
    o.text(".csv", [&](std::ostream& os) { write_discretization_csv(os, curves); });
    json cj = json::array();
    for (const auto& c : curves) cj.push_back(to_json(c));
    const double cal = calibrate_cds(curves);
    summary["curves"] = cj;
    summary["calibrated_c_ds"] = cal;
    summary["c_ds"] = cfg.sweep.c_ds;
    bool violated = cal > cfg.sweep.c_ds;
    summary["bound_dominated"] = !violated;
    if (opt.plot) plot_sweep(o, curves, cfg.sweep.c_ds);
    return bound_exit(violated, opt, "measured error exceeds C_{d,s} * bound at c_ds = " + fmt_num(cfg.sweep.c_ds) +
                                         " (calibrated " + fmt_num(cal) + ")");
}

bool curve_dominated(const PerturbationCurve& c) {
    if (c.empirical_lipschitz > c.c_nt) return false;
    for (double r : c.max_ratio)
        if (r > c.c_nt) return false;
    return true;
}

int cmd_stability(RunConfig& cfg, const Options& opt, Outputs& o, json& summary) {
    PerturbationCurve c;
    if (cfg.model_file) {
        OperatorModel m = build_model(cfg);
        cfg.stability.arch.dim = m.dim;
        c = run_stability_sweep(cfg.stability, m);
    } else {
        c = run_stability_sweep(cfg.stability);
    }
    o.text(".csv", [&](std::ostream& os) { write_stability_csv(os, {c}); });
    summary["curve"] = to_json(c);
    bool ok = curve_dominated(c);
    summary["bound_dominated"] = ok;
    if (opt.plot) o.svg("_stability.svg", {stability_panel(c, 0)}, 1);
    return bound_exit(!ok, opt, "perturbation response exceeds C_{N,T}");
}

int cmd_depth(RunConfig& cfg, const Options& opt, Outputs& o, json& summary) {
    DepthConfig d{cfg.stability, cfg.depths};
    DepthResult r = run_depth_sweep(d);
    o.text(".csv", [&](std::ostream& os) { write_stability_csv(os, r.curves); });
    summary["depth"] = to_json(r);
    bool ok = true;
    for (const auto& c : r.curves) ok = ok && curve_dominated(c);
    summary["bound_dominated"] = ok;
    if (opt.plot) {
        std::vector<svg::Panel> panels;
        for (std::size_t i = 0; i < r.curves.size(); ++i) panels.push_back(stability_panel(r.curves[i], i));
        svg::Panel t{"Lipschitz vs depth", "T", "constant"};
        svg::Series emp{"empirical", {}, {}, svg::palette(0)}, cn{"C_NT", {}, {}, "#555", true, true};
        for (const auto& row : r.table) {
            emp.x.push_back(double(row.T));
            emp.y.push_back(row.empirical_lipschitz);
            cn.x.push_back(double(row.T));
            cn.y.push_back(row.c_nt);
        }
        t.series = {emp, cn};
        panels.push_back(t);
        o.svg("_depth.svg", panels, 3);
    }
    return bound_exit(!ok, opt, "perturbation response exceeds C_{N,T} at some depth");
}

int cmd_nyquist(RunConfig& cfg, const Options& opt, Outputs& o, json& summary) {
    auto curves = run_nyquist_stress(cfg.nyquist);
    o.text(".csv", [&](std::ostream& os) { write_nyquist_csv(os, curves); });
    json cj = json::array();
    for (const auto& c : curves) cj.push_back(to_json(c));
    summary["curves"] = cj;
    if (opt.plot) plot_nyquist(o, curves);
    return kOk;
}

int cmd_iss(RunConfig& cfg, const Options& opt, Outputs& o, json& summary) {
    IssConfig ic;
    ic.sweep = cfg.sweep;
    ic.s = cfg.iss_s;
    ic.deltas = cfg.iss_deltas;
    if (cfg.iss_c_ds) {
        ic.sweep.c_ds = *cfg.iss_c_ds;
        summary["c_ds_source"] = "config";
    } else {
        SweepConfig cal = cfg.sweep;
        cal.seed_offset = 0;
        cal.samples = cfg.iss_calibration.samples;
        cal.smoothness = {cfg.iss_s};
        cal.c_ds = 1.0;
        if (cfg.sweep.seed_offset < cal.samples)
            std::cerr << "warning: iss samples overlap the calibration samples (seed_offset "
                      << cfg.sweep.seed_offset << " < " << cal.samples << ")\n";
        ic.sweep.c_ds = calibrate_cds(run_discretization_sweep(cal));
        summary["c_ds_source"] = "calibrated";
        summary["calibration_samples"] = cal.samples;
    }
    IssReport r = run_iss_check(ic);
    o.text(".csv", [&](std::ostream& os) { write_iss_csv(os, r); });
    summary["iss"] = to_json(r);
    summary["calibrated_c_ds"] = r.c_ds;
    summary["bound_dominated"] = r.all_dominated;
    return bound_exit(!r.all_dominated, opt, "total error exceeds C_NT delta + discretization term");
}

int cmd_grf(RunConfig& cfg, const Options&, Outputs& o, json& summary) {
    auto rows = run_grf_check(cfg.grf);
    o.text(".csv", [&](std::ostream& os) { write_grf_check_csv(os, rows); });
    json j = json::array();
    for (const auto& r : rows) j.push_back(to_json(r));
    summary["rows"] = j;
    return kOk;
}

int cmd_kernel(RunConfig& cfg, const Options& opt, Outputs& o, json& summary) {
    auto rows = run_kernel_check(cfg.kernel_check);
    o.text(".csv", [&](std::ostream& os) { write_kernel_check_csv(os, rows); });
    json j = json::array();
    bool ok = true;
    for (const auto& r : rows) {
        j.push_back(to_json(r));
        ok = ok && r.grid_norm.holds;
    }
    summary["rows"] = j;
    summary["bound_dominated"] = ok;
    return bound_exit(!ok, opt, "kernel grid norm exceeds its bound");
}

// BoundReport for one model at resolution N; states come from one GRF input
// on a grid four times finer
json bounds_report(const OperatorModel& m, std::size_t N, double s, const RunConfig& cfg) {
    const std::size_t n_ref = std::max<std::size_t>(4 * N, cfg.sweep.n_full);
    SweepConfig sw = cfg.sweep;
    sw.arch.dim = m.dim;
    sw.n_full = n_ref;
    StackPlan full(m, n_ref, cfg.mode);
    std::vector<GridField> st;
    full.apply(sweep_input(sw, s, 0, m.lift.d_in()), &st);
    std::size_t kc = cfg.mode.cutoff;
    if (kc == 0)
        for (const auto& l : m.layers) kc = std::max(kc, kernel_modes(l.kernel));
    BoundReport b = make_bound_report(m, st, N, s, sw.regime, kc, sw.kernel_alpha, sw.c_ds);
    return {{"bound", to_json(b)},
            {"lipschitz", to_json(discrete_stack_lipschitz(m, N, cfg.mode))},
            {"A", b.A},
            {"continuous_lipschitz", continuous_stack_lipschitz(m)},
            {"reference_N", n_ref}};
}

int run(const Options& opt) {
    RunConfig cfg;
    if (!opt.config.empty()) {
        if (!fs::exists(opt.config)) {
            std::cerr << "error: config file not found: " << opt.config << "\n";
            return kMissing;
        }
        cfg = load_run_config(opt.config);
        if (cfg.experiment != opt.command)
            throw ConfigError(opt.config + ": experiment '" + cfg.experiment + "' does not match command '" +
                              opt.command + "'");
    } else if (opt.command == "bounds") {
        cfg = parse_run_config("{\"experiment\":\"bounds\",\"conv\":{\"mode\":\"analytic\"}}", "<defaults>");
    } else {
        std::cerr << "error: --config is required for '" << opt.command << "'\n";
        return kMissing;
    }

    if (opt.seed) cfg.seed = *opt.seed;
    if (opt.threads) {
        cfg.threads = *opt.threads;
    } else if (cfg.threads == 0) {
        cfg.threads = resolve_threads(0);
    }
    if (!opt.model.empty()) {
        if (!fs::exists(opt.model)) {
            std::cerr << "error: model file not found: " << opt.model << "\n";
            return kMissing;
        }
        cfg.model_file = opt.model;
    }
    cfg.finalize();

    if (opt.command == "bounds") {
        OperatorModel m = build_model(cfg);
        std::size_t N = opt.N ? opt.N : cfg.bounds_n;
        double s = opt.s > 0 ? opt.s : cfg.bounds_s;
        json r = bounds_report(m, N, s, cfg);
        std::cout << r.dump(2) << "\n";
        if (!opt.out.empty()) {
            fs::create_directories(opt.out);
            std::ofstream(fs::path(opt.out) / (cfg.name + ".json")) << r.dump(2) << "\n";
        }
        return kOk;
    }
    if (cfg.model_file && opt.command != "sweep" && opt.command != "stability")
        throw ConfigError("a model file is only supported by sweep, stability and bounds");

    Outputs o;
    o.dir = opt.out.empty() ? fs::path("results") / cfg.name : fs::path(opt.out);
    o.name = cfg.name;
    fs::create_directories(o.dir);

    json summary;
    summary["experiment"] = cfg.experiment;
    summary["name"] = cfg.name;
    summary["seed"] = cfg.seed;
    summary["model_seed"] = cfg.effective_model_seed();
    summary["config"] = cfg.raw;
    if (cfg.model_file) summary["model_file"] = *cfg.model_file;
    if (opt.command == "sweep" || opt.command == "iss") summary["resolved"] = sweep_input_json(cfg.sweep);

    int rc = kOk;
    if (opt.command == "sweep") rc = cmd_sweep(cfg, opt, o, summary);
    else if (opt.command == "stability") rc = cmd_stability(cfg, opt, o, summary);
    else if (opt.command == "depth") rc = cmd_depth(cfg, opt, o, summary);
    else if (opt.command == "nyquist") rc = cmd_nyquist(cfg, opt, o, summary);
    else if (opt.command == "iss") rc = cmd_iss(cfg, opt, o, summary);
    else if (opt.command == "grf-check") rc = cmd_grf(cfg, opt, o, summary);
    else if (opt.command == "kernel-check") rc = cmd_kernel(cfg, opt, o, summary);

    o.text(".json", [&](std::ostream& os) { os << summary.dump(2) << "\n"; });
    for (const auto& f : o.written) std::cerr << "wrote " << f << "\n";
    return rc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discretization and stability experiments for neural-operator layer stacks"};
    app.require_subcommand(1);
    CLI::App* run_cmd = app.add_subcommand("run", "run one experiment");
    Options opt;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    run_cmd->add_option("command", opt.command, "experiment to run")
        ->required()
        ->check(CLI::IsMember(kCommands));
    run_cmd->add_option("-c,--config", opt.config, "JSON config file");
    run_cmd->add_option("-o,--out", opt.out, "output directory (default results/<name>)");
    auto* seed_opt = run_cmd->add_option("--seed", seed, "override the top-level seed");
    auto* thr_opt = run_cmd->add_option("--threads", threads, "worker threads (env NOPERR_THREADS)");
    run_cmd->add_option("--model", opt.model, "model JSON file");
    run_cmd->add_option("--N", opt.N, "resolution for the bounds command");
    run_cmd->add_option("--s", opt.s, "input smoothness for the bounds command");
    run_cmd->add_flag("--plot", opt.plot, "write SVG figures");
    run_cmd->add_flag("--strict-bounds", opt.strict, "exit nonzero when a bound is violated");

    CLI11_PARSE(app, argc, argv);
    if (*seed_opt) opt.seed = seed;
    if (*thr_opt) opt.threads = threads;

    try {
        return run(opt);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kSchema;
    } catch (const ModelLoadError& e) {
        std::cerr << "model error: " << e.what() << "\n";
        return kSchema;
    } catch (const std::exception& e) {
        std::cerr << "error in '" << opt.command << "'" << (opt.config.empty() ? "" : " (" + opt.config + ")") << ": "
                  << e.what() << "\n";
        return kRuntime;
    }
}
