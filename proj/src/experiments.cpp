#include "noperr/experiments.hpp"

#include "noperr/linalg.hpp"
#include "noperr/parallel.hpp"
#include "noperr/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string>

namespace noperr {

unsigned resolve_threads(unsigned requested) {
    if (requested) return requested;
    if (const char* env = std::getenv("NOPERR_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return unsigned(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

std::string metric_name(ErrorMetric m) { return m == ErrorMetric::OnGrid ? "on_grid" : "lifted"; }

std::string lift_name(LiftMethod m) {
    switch (m) {
        case LiftMethod::Trigonometric: return "trigonometric";
        case LiftMethod::Nearest: return "nearest";
        case LiftMethod::Linear: return "linear";
    }
    return "trigonometric";
}

ErrorMetric parse_metric(const std::string& s) {
    if (s == "on_grid") return ErrorMetric::OnGrid;
    if (s == "lifted") return ErrorMetric::Lifted;
    throw DomainError("unknown error metric '" + s + "' (expected on_grid or lifted)");
}

LiftMethod parse_lift(const std::string& s) {
    if (s == "trigonometric") return LiftMethod::Trigonometric;
    if (s == "nearest") return LiftMethod::Nearest;
    if (s == "linear") return LiftMethod::Linear;
    throw DomainError("unknown lift '" + s + "' (expected trigonometric, nearest or linear)");
}

GridField lift_to(const GridField& f, std::size_t n_target, LiftMethod how) {
    check_grid_shape(f.dim(), n_target);
    if (how == LiftMethod::Trigonometric) return resample(f, n_target);
    const std::size_t n = f.n(), H = f.channels();
    const int d = f.dim();
    // per-axis taps: (index, weight) pairs
    std::vector<std::array<std::pair<std::size_t, double>, 2>> taps(n_target);
    for (std::size_t i = 0; i < n_target; ++i) {
        double pos = double(i) * double(n) / double(n_target);
        if (how == LiftMethod::Nearest) {
            std::size_t j = std::size_t(std::llround(pos)) % n;
            taps[i] = {{{j, 1.0}, {j, 0.0}}};
        } else {
            std::size_t j = std::size_t(std::floor(pos));
            double w = pos - double(j);
            taps[i] = {{{j % n, 1 - w}, {(j + 1) % n, w}}};
        }
    }
    GridField out(d, n_target, H);
    if (d == 1) {
        for (std::size_t i = 0; i < n_target; ++i)
            for (auto [j, w] : taps[i])
                for (std::size_t c = 0; c < H; ++c) out.at(i, c) += w * f.at(j, c);
    } else {
        for (std::size_t i0 = 0; i0 < n_target; ++i0)
            for (std::size_t i1 = 0; i1 < n_target; ++i1)
                for (auto [j0, w0] : taps[i0])
                    for (auto [j1, w1] : taps[i1])
                        for (std::size_t c = 0; c < H; ++c)
                            out.at(i0 * n_target + i1, c) += w0 * w1 * f.at(j0 * n + j1, c);
    }
    return out;
}

namespace {

struct Stats {
    double mean = 0, sd = 0;
};

Stats stats(const std::vector<double>& v) {
    Stats s;
    if (v.empty()) return s;
    for (double x : v) s.mean += x;
    s.mean /= double(v.size());
    if (v.size() > 1) {
        double q = 0;
        for (double x : v) q += (x - s.mean) * (x - s.mean);
        s.sd = std::sqrt(q / double(v.size() - 1));
    }
    return s;
}

// fit that tolerates degenerate data (zero errors, too few points)
LogLogFit safe_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    try {
        return loglog_fit(x, y);
    } catch (const DomainError&) {
        return {};
    }
}

std::size_t band_cutoff(const OperatorModel& m, ConvMode mode) {
    if (mode.kind == ConvKind::AnalyticSpectrumCutoff) return mode.cutoff;
    std::size_t k = 0;
    for (const auto& l : m.layers) k = std::max(k, kernel_modes(l.kernel));
    return k;
}

std::vector<std::size_t> coarse_grid(const SweepConfig& cfg) {
    std::vector<std::size_t> out;
    for (std::size_t f : cfg.factors) out.push_back(cfg.n_full / f);
    return out;
}

// |E| and |E|/|ref| of a coarse final state against the fine reference
std::pair<double, double> compare(const GridField& coarse, const GridField& ref, ErrorMetric metric,
                                  LiftMethod lift) {
    if (metric == ErrorMetric::OnGrid) {
        GridField r = subsample_stride(ref, coarse.n());
        double e = grid_l2_distance(coarse, r);
        double nr = grid_l2_norm(r);
        return {e, nr > 0 ? e / nr : e};
    }
    GridField up = lift_to(coarse, ref.n(), lift);
    double e = grid_l2_distance(up, ref);
    double nr = grid_l2_norm(ref);
    // keep the absolute error on the coarse-grid l2 scale
    double scale = std::pow(double(coarse.n()) / double(ref.n()), ref.dim() / 2.0);
    return {e * scale, nr > 0 ? e / nr : e};
}

}  // namespace

void SweepConfig::validate() const {
    check_grid_shape(arch.dim, n_full);
    if (factors.empty()) throw DomainError("sweep needs at least one coarsening factor");
    for (std::size_t f : factors) {
        if (f < 2 || n_full % f) throw DomainError("factor " + std::to_string(f) + " does not divide N_full");
        check_grid_shape(arch.dim, n_full / f);
    }
    if (smoothness.empty()) throw DomainError("sweep needs at least one smoothness value");
    for (double s : smoothness)
        if (!(s > 0)) throw DomainError("smoothness must be positive");
    if (samples == 0) throw DomainError("sweep needs at least one sample");
    if (mode.kind == ConvKind::AnalyticSpectrumCutoff && mode.cutoff == 0)
        throw DomainError("cutoff mode needs a positive cutoff");
}

GridField sweep_input(const SweepConfig& cfg, double s, std::size_t sample, std::size_t channels) {
    GrfSpec g;
    g.dim = cfg.arch.dim;
    g.n = cfg.n_full;
    g.s = s;
    g.eps = cfg.input.eps;
    g.seed = derive_seed(cfg.seed, 0x5a5a0000ull + cfg.seed_offset + sample);
    g.channels = channels;
    g.normalize = cfg.input.normalize;
    g.convention = cfg.input.convention;
    return sample_grf(g);
}

ErrorCurve run_discretization_sweep(const SweepConfig& cfg, const OperatorModel& model, double s) {
    cfg.validate();
    const auto Ns = coarse_grid(cfg);
    const std::size_t T = model.layers.size();
    StackPlan full(model, cfg.n_full, cfg.mode);
    std::vector<StackPlan> coarse;
    for (std::size_t N : Ns) coarse.emplace_back(model, N, cfg.mode);
    const std::size_t kc = band_cutoff(model, cfg.mode);
    const std::size_t n_top = *std::max_element(Ns.begin(), Ns.end());

    struct Sample {
        std::vector<double> rel, abs;
        BoundReport report;
    };
    std::vector<Sample> out(cfg.samples);
    parallel_for(cfg.samples, cfg.threads, [&](std::size_t i) {
        GridField a = sweep_input(cfg, s, i, model.lift.d_in());
        std::vector<GridField> st;
        full.apply(a, &st);
        Sample& r = out[i];
        r.report = make_bound_report(model, st, n_top, s, cfg.regime, kc, cfg.kernel_alpha, cfg.c_ds);
        for (std::size_t k = 0; k < Ns.size(); ++k) {
            std::vector<GridField> sc;
            coarse[k].apply(subsample_stride(a, Ns[k]), &sc);
            auto [e, rel] = compare(sc.back(), st.back(), cfg.metric, cfg.lift);
            r.abs.push_back(e);
            r.rel.push_back(rel);
        }
    });

    ErrorCurve c;
    c.experiment = cfg.name;
    c.seed = cfg.seed;
    c.s = s;
    c.activation = model.layers.empty() ? "identity" : model.layers.front().act.name();
    std::size_t worst = 0;
    for (std::size_t i = 1; i < out.size(); ++i)
        if (out[i].report.B > out[worst].report.B) worst = i;
    c.bound = out[worst].report;
    std::vector<double> xs, ys, ya;
    for (std::size_t k = 0; k < Ns.size(); ++k) {
        CurvePoint p;
        p.N = Ns[k];
        p.n_samples = cfg.samples;
        for (const auto& r : out) {
            p.rel.push_back(r.rel[k]);
            p.abs.push_back(r.abs[k]);
            p.bound.push_back(discretization_bound_value(r.report.A, r.report.B, r.report.beta, Ns[k], T));
        }
        auto sr = stats(p.rel), sa = stats(p.abs), sb = stats(p.bound);
        p.mean_rel = sr.mean;
        p.std_rel = sr.sd;
        p.mean_abs = sa.mean;
        p.std_abs = sa.sd;
        p.mean_bound = sb.mean;
        xs.push_back(double(p.N));
        ys.push_back(p.mean_rel);
        ya.push_back(p.mean_abs);
        c.points.push_back(std::move(p));
    }
    c.fit = safe_loglog(xs, ys);
    c.abs_fit = safe_loglog(xs, ya);
    return c;
}

std::vector<ErrorCurve> run_discretization_sweep(const SweepConfig& cfg) {
    cfg.validate();
    OperatorModel model = model_random_init(cfg.arch, cfg.model_seed);
    std::vector<ErrorCurve> out;
    for (double s : cfg.smoothness) out.push_back(run_discretization_sweep(cfg, model, s));
    return out;
}

double calibrate_cds(const std::vector<ErrorCurve>& curves) {
    double c = 0;
    for (const auto& cv : curves)
        for (const auto& p : cv.points)
            for (std::size_t i = 0; i < p.abs.size(); ++i) {
                if (!(p.bound[i] > 0)) throw DomainError("calibration needs positive bound values");
                c = std::max(c, p.abs[i] / p.bound[i]);
            }
    return c;
}

std::vector<double> StabilityConfig::eps_grid() const {
    if (!epsilons.empty()) return epsilons;
    std::vector<double> e;
    for (int i = 0; i <= 32; ++i) e.push_back(0.025 * i);
    return e;
}

void StabilityConfig::validate() const {
    check_grid_shape(arch.dim, n);
    if (arch.depth == 0) throw DomainError("stability sweep needs at least one layer");
    if (inputs == 0 || directions == 0) throw DomainError("stability sweep needs inputs and directions");
    for (double e : eps_grid())
        if (e < 0) throw DomainError("perturbation sizes must be >= 0");
    if (!(s > 0)) throw DomainError("smoothness must be positive");
}

GridField state_input(int dim, std::size_t n, std::size_t channels, double s, const InputSpec& in,
                      std::uint64_t seed) {
    GrfSpec g;
    g.dim = dim;
    g.n = n;
    g.s = s;
    g.eps = in.eps;
    g.seed = seed;
    g.channels = channels;
    g.normalize = in.normalize;
    g.convention = in.convention;
    return sample_grf(g);
}

GridField unit_direction(int dim, std::size_t n, std::size_t channels, std::uint64_t seed) {
    GridField xi(dim, n, channels);
    auto v = xi.values();
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = normal_at(seed, 0, k);
    double nrm = grid_l2_norm(xi);
    for (auto& x : v) x /= nrm;
    return xi;
}

namespace {

GridField activate(GridField z, const Activation& act) {
    if (act.kind != ActKind::Identity)
        for (auto& y : z.values()) y = act(y);
    return z;
}

GridField run_from(const StackPlan& plan, GridField v, std::size_t first) {
    for (std::size_t t = first; t < plan.layers().size(); ++t) v = plan.layers()[t].apply(v);
    return v;
}

}  // namespace

double estimate_empirical_lipschitz(const StackPlan& plan, std::size_t pairs, std::uint64_t seed, double s,
                                    const InputSpec& in, unsigned threads) {
    const auto& m = plan.model();
    if (m.layers.empty()) return 1.0;
    const std::size_t H = m.layers.front().d_in();
    std::vector<double> ratio(pairs, 0.0);
    parallel_for(pairs, threads, [&](std::size_t p) {
        GridField v1 = state_input(m.dim, plan.n(), H, s, in, derive_seed(seed, 2 * p));
        GridField v2 = state_input(m.dim, plan.n(), H, s, in, derive_seed(seed, 2 * p + 1));
        double den = grid_l2_distance(v1, v2);
        if (den > 0) ratio[p] = grid_l2_distance(plan.run_layers(v1), plan.run_layers(v2)) / den;
    });
    return ratio.empty() ? 0.0 : *std::max_element(ratio.begin(), ratio.end());
}

PerturbationCurve run_stability_sweep(const StabilityConfig& cfg, const OperatorModel& model) {
    cfg.validate();
    StackPlan plan(model, cfg.n, cfg.mode);
    const auto eps = cfg.eps_grid();
    const std::size_t H = model.layers.front().d_in();
    const LayerPlan& first = plan.layers().front();
    const Activation act = model.layers.front().act;

    std::vector<GridField> z0(cfg.inputs), base(cfg.inputs);
    parallel_for(cfg.inputs, cfg.threads, [&](std::size_t i) {
        GridField v = state_input(model.dim, cfg.n, H, cfg.s, cfg.input, derive_seed(cfg.seed, 0x1000 + i));
        z0[i] = first.preactivation(v, true);
        base[i] = run_from(plan, activate(z0[i], act), 1);
    });

    const std::size_t P = cfg.inputs * cfg.directions;
    std::vector<std::vector<double>> f(P);
    parallel_for(P, cfg.threads, [&](std::size_t p) {
        const std::size_t i = p / cfg.directions;
        GridField xi = unit_direction(model.dim, cfg.n, H, derive_seed(cfg.seed, 0x200000 + p));
        // first layer: act(z0 + eps z1) with z1 the linear part applied to xi
        GridField z1 = first.preactivation(xi, false);
        auto& row = f[p];
        for (double e : eps) {
            if (e == 0) {
                row.push_back(0.0);
                continue;
            }
            GridField z = z0[i];
            auto zv = z.values();
            auto dv = z1.values();
            for (std::size_t k = 0; k < zv.size(); ++k) zv[k] += e * dv[k];
            row.push_back(grid_l2_distance(run_from(plan, activate(std::move(z), act), 1), base[i]));
        }
    });

    PerturbationCurve c;
    c.experiment = cfg.name;
    c.seed = cfg.seed;
    c.T = model.layers.size();
    c.eps = eps;
    for (std::size_t k = 0; k < eps.size(); ++k) {
        std::vector<double> col;
        double mr = 0;
        for (const auto& row : f) {
            col.push_back(row[k]);
            if (eps[k] > 0) mr = std::max(mr, row[k] / eps[k]);
        }
        auto st = stats(col);
        c.mean.push_back(st.mean);
        c.std.push_back(st.sd);
        c.max_ratio.push_back(mr);
    }
    if (eps.size() >= 2) c.linear = linear_fit(c.eps, c.mean);
    c.empirical_lipschitz =
        estimate_empirical_lipschitz(plan, cfg.lipschitz_pairs, derive_seed(cfg.seed, 31), cfg.s, cfg.input, cfg.threads);
    c.lipschitz = discrete_stack_lipschitz(plan);
    c.c_nt = c.lipschitz.value;
    return c;
}

PerturbationCurve run_stability_sweep(const StabilityConfig& cfg) {
    cfg.validate();
    OperatorModel model = model_random_init(cfg.arch, cfg.model_seed);
    return run_stability_sweep(cfg, model);
}

DepthResult run_depth_sweep(const DepthConfig& cfg) {
    if (cfg.depths.empty()) throw DomainError("depth sweep needs at least one depth");
    DepthResult r;
    for (std::size_t T : cfg.depths) {
        StabilityConfig c = cfg.base;
        c.arch.depth = T;
        c.name = cfg.base.name;
        auto curve = run_stability_sweep(c);
        DepthRow row;
        row.T = T;
        row.empirical_lipschitz = curve.empirical_lipschitz;
        row.c_nt = curve.c_nt;
        row.mean_err_max_eps = curve.mean.back();
        r.table.push_back(row);
        r.curves.push_back(std::move(curve));
    }
    return r;
}

void NyquistConfig::validate() const {
    check_grid_shape(arch.dim, n_ref);
    if (ks.empty() || Ls.empty()) throw DomainError("nyquist stress needs frequencies and resolutions");
    for (long k : ks)
        if (k <= 0) throw DomainError("probe frequencies must be positive");
    for (std::size_t L : Ls) {
        check_grid_shape(arch.dim, L);
        if (L >= n_ref || n_ref % L) throw DomainError("resolution " + std::to_string(L) + " must divide n_ref");
    }
    if (samples == 0) throw DomainError("nyquist stress needs at least one sample");
}

std::vector<NyquistCurve> run_nyquist_stress(const NyquistConfig& cfg) {
    cfg.validate();
    OperatorModel model = model_random_init(cfg.arch, cfg.model_seed);
    StackPlan ref(model, cfg.n_ref, cfg.mode);
    std::vector<StackPlan> plans;
    for (std::size_t L : cfg.Ls) plans.emplace_back(model, L, cfg.mode);
    const std::size_t da = model.lift.d_in();
    const int d = model.dim;

    const std::size_t P = cfg.ks.size() * cfg.samples;
    std::vector<std::vector<double>> rel(P);
    parallel_for(P, cfg.threads, [&](std::size_t p) {
        const std::size_t ki = p / cfg.samples, j = p % cfg.samples;
        const long k = cfg.ks[ki];
        const double phi = 2 * std::numbers::pi * uniform_at(cfg.seed, std::uint64_t(k), j);
        GridField a(d, cfg.n_ref, da);
        for (std::size_t q = 0; q < a.points(); ++q) {
            std::size_t i0 = d == 1 ? q : q / cfg.n_ref;
            double x = double(i0) / double(cfg.n_ref);
            double v = std::sin(2 * std::numbers::pi * double(k) * x + phi);
            for (std::size_t c = 0; c < da; ++c) a.at(q, c) = v;
        }
        std::vector<GridField> st;
        ref.apply(a, &st);
        for (std::size_t li = 0; li < cfg.Ls.size(); ++li) {
            std::vector<GridField> sc;
            plans[li].apply(subsample_stride(a, cfg.Ls[li]), &sc);
            rel[p].push_back(compare(sc.back(), st.back(), ErrorMetric::OnGrid, LiftMethod::Trigonometric).second);
        }
    });

    std::vector<NyquistCurve> out;
    for (std::size_t ki = 0; ki < cfg.ks.size(); ++ki) {
        NyquistCurve c;
        c.k = cfg.ks[ki];
        c.nyquist_L = std::size_t(2 * c.k);
        std::vector<double> xs, ys;
        for (std::size_t li = 0; li < cfg.Ls.size(); ++li) {
            CurvePoint pt;
            pt.N = cfg.Ls[li];
            pt.n_samples = cfg.samples;
            for (std::size_t j = 0; j < cfg.samples; ++j) pt.rel.push_back(rel[ki * cfg.samples + j][li]);
            auto s = stats(pt.rel);
            pt.mean_rel = s.mean;
            pt.std_rel = s.sd;
            if (pt.N >= c.nyquist_L) {
                xs.push_back(double(pt.N));
                ys.push_back(pt.mean_rel);
            }
            c.points.push_back(std::move(pt));
        }
        c.fit = safe_loglog(xs, ys);
        out.push_back(std::move(c));
    }
    return out;
}

IssReport run_iss_check(const IssConfig& cfg) {
    const SweepConfig& sw = cfg.sweep;
    sw.validate();
    for (double dl : cfg.deltas)
        if (dl < 0) throw DomainError("noise levels must be >= 0");
    OperatorModel model = model_random_init(sw.arch, sw.model_seed);
    StackPlan full(model, sw.n_full, sw.mode);
    const auto Ns = coarse_grid(sw);
    std::vector<StackPlan> plans;
    IssReport rep;
    rep.c_ds = sw.c_ds;
    for (std::size_t N : Ns) {
        plans.emplace_back(model, N, sw.mode);
        rep.lipschitz.push_back(discrete_stack_lipschitz(plans.back()));
    }
    const std::size_t kc = band_cutoff(model, sw.mode);
    const std::size_t H = model.layers.front().d_in();
    const std::size_t T = model.layers.size();

    std::vector<std::vector<IssRow>> rows(sw.samples);
    parallel_for(sw.samples, sw.threads, [&](std::size_t i) {
        GridField a = sweep_input(sw, cfg.s, i, model.lift.d_in());
        std::vector<GridField> st;
        full.apply(a, &st);
        BoundReport b = make_bound_report(model, st, Ns.front(), cfg.s, sw.regime, kc, sw.kernel_alpha, sw.c_ds);
        for (std::size_t k = 0; k < Ns.size(); ++k) {
            const std::size_t N = Ns[k];
            GridField ref = subsample_stride(st.back(), N);
            GridField v0 = plans[k].lift(subsample_stride(a, N));
            double term = discretization_bound_value(b.A, b.B, b.beta, N, T);
            GridField xi = unit_direction(model.dim, N, H, derive_seed(sw.seed, 0x155000 + (sw.seed_offset + i) * 64 + k));
            for (double dl : cfg.deltas) {
                IssRow r;
                r.sample = sw.seed_offset + i;
                r.N = N;
                r.delta = dl;
                r.measured = grid_l2_distance(plans[k].run_layers(v0 + scaled(xi, dl)), ref);
                r.discretization_term = term;
                r.bound = iss_total_bound(rep.lipschitz[k].value, dl, term);
                r.dominated = r.measured <= r.bound;
                rows[i].push_back(r);
            }
        }
    });
    rep.all_dominated = true;
    for (auto& rs : rows)
        for (auto& r : rs) {
            rep.all_dominated = rep.all_dominated && r.dominated;
            rep.rows.push_back(r);
        }
    return rep;
}

std::vector<DecompositionRow> error_decomposition(const OperatorModel& model, const GridField& a_full,
                                                  std::size_t n_coarse, ConvMode mode) {
    StackPlan fine(model, a_full.n(), mode), coarse(model, n_coarse, mode);
    std::vector<GridField> sf, sc;
    fine.apply(a_full, &sf);
    coarse.apply(subsample_stride(a_full, n_coarse), &sc);
    const double Nd = std::pow(double(n_coarse), model.dim / 2.0);
    std::vector<DecompositionRow> out;
    for (std::size_t t = 0; t < model.layers.size(); ++t) {
        const LayerPlan& lc = coarse.layers()[t];
        GridField rv = subsample_stride(sf[t], n_coarse);
        GridField e0 = sc[t] - rv;
        GridField e1 = lc.convolve(rv) - subsample_stride(fine.layers()[t].convolve(sf[t]), n_coarse);
        GridField e2 = lc.convolve(e0);
        DecompositionRow r;
        r.t = t;
        r.e0 = grid_l2_norm(e0);
        r.e1 = grid_l2_norm(e1);
        r.e2 = grid_l2_norm(e2);
        r.e0_next = grid_l2_distance(sc[t + 1], subsample_stride(sf[t + 1], n_coarse));
        r.recursion_rhs = activation_lipschitz(model.layers[t].act) * (spectral_norm(model.layers[t].W) * r.e0 + r.e1 + r.e2);
        double l2 = 0;
        for (double v : lc.kernel_opnorms()) l2 += v * v;
        r.e2_bound = r.e0 * std::sqrt(l2) / Nd;
        out.push_back(r);
    }
    return out;
}

std::vector<GrfCheckRow> run_grf_check(const GrfCheckConfig& cfg) {
    check_grid_shape(cfg.dim, cfg.n);
    if (cfg.seeds == 0) throw DomainError("grf check needs at least one seed");
    std::vector<GrfCheckRow> out;
    for (double s : cfg.smoothness) {
        std::vector<DecayFit> fits(cfg.seeds);
        parallel_for(cfg.seeds, cfg.threads, [&](std::size_t i) {
            GridField f = state_input(cfg.dim, cfg.n, 1, s, cfg.input, derive_seed(cfg.seed, 0x6000 + i));
            fits[i] = measured_decay_exponent(f, cfg.xi_min, cfg.xi_max);
        });
        GrfCheckRow r;
        r.s = s;
        GrfSpec g;
        g.dim = cfg.dim;
        g.s = s;
        r.alpha = g.alpha();
        r.seeds = cfg.seeds;
        std::vector<double> a;
        for (const auto& f : fits) {
            a.push_back(f.alpha_hat);
            r.r2_mean += f.r2 / double(cfg.seeds);
        }
        auto st = stats(a);
        r.alpha_hat_mean = st.mean;
        r.alpha_hat_std = st.sd;
        out.push_back(r);
    }
    return out;
}

std::vector<KernelCheckRow> run_kernel_check(const KernelCheckConfig& cfg) {
    std::vector<KernelCheckRow> out;
    for (std::size_t i = 0; i < cfg.seeds; ++i) {
        const std::uint64_t sd = derive_seed(cfg.seed, 0x7000 + i);
        Kernel ks = ssno_random(1, SSNOForm::Sum, cfg.modes, cfg.channels, cfg.channels, sd);
        Kernel kf = fno_random(1, cfg.modes, cfg.channels, cfg.channels, sd);
        for (std::size_t n : cfg.grid) {
            KernelCheckRow a;
            a.seed = sd;
            a.kind = "ssno";
            a.decay = spectral_decay_fit(ks, cfg.xi_min, cfg.xi_max);
            a.n = n;
            a.grid_norm = kernel_grid_l2(ks, n);
            out.push_back(a);
            KernelCheckRow b;
            b.seed = sd;
            b.kind = "fno";
            b.decay = spectral_decay_fit(kf, 1, cfg.xi_max);
            b.n = n;
            b.grid_norm = kernel_grid_l2(kf, n);
            out.push_back(b);
        }
    }
    return out;
}

}  // namespace noperr
