#include "noperr/records.hpp"

#include <cmath>
#include <cstdio>

namespace noperr {

std::string fmt_num(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10e", x);
    return buf;
}

namespace {

std::string fmt_s(double s) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", s);
    return buf;
}

// json cannot hold inf/nan; store them as strings
json num(double x) {
    if (std::isfinite(x)) return x;
    return fmt_num(x);
}

json nums(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(num(x));
    return a;
}

}  // namespace

void write_discretization_csv(std::ostream& os, const std::vector<ErrorCurve>& curves) {
    os << "experiment,seed,s,activation,N,mean_rel_err,std_rel_err,n_samples\n";
    for (const auto& c : curves)
        for (const auto& p : c.points)
            os << c.experiment << ',' << c.seed << ',' << fmt_s(c.s) << ',' << c.activation << ',' << p.N << ','
               << fmt_num(p.mean_rel) << ',' << fmt_num(p.std_rel) << ',' << p.n_samples << '\n';
}

void write_stability_csv(std::ostream& os, const std::vector<PerturbationCurve>& curves) {
    os << "experiment,seed,T,epsilon,mean_err,std_err\n";
    for (const auto& c : curves)
        for (std::size_t k = 0; k < c.eps.size(); ++k)
            os << c.experiment << ',' << c.seed << ',' << c.T << ',' << fmt_num(c.eps[k]) << ',' << fmt_num(c.mean[k])
               << ',' << fmt_num(c.std[k]) << '\n';
}

void write_nyquist_csv(std::ostream& os, const std::vector<NyquistCurve>& curves) {
    os << "k,L,mean_rel_err,std_rel_err\n";
    for (const auto& c : curves)
        for (const auto& p : c.points)
            os << c.k << ',' << p.N << ',' << fmt_num(p.mean_rel) << ',' << fmt_num(p.std_rel) << '\n';
}

void write_iss_csv(std::ostream& os, const IssReport& r) {
    os << "sample,N,delta,measured,discretization_term,bound,dominated\n";
    for (const auto& row : r.rows)
        os << row.sample << ',' << row.N << ',' << fmt_num(row.delta) << ',' << fmt_num(row.measured) << ','
           << fmt_num(row.discretization_term) << ',' << fmt_num(row.bound) << ',' << (row.dominated ? 1 : 0) << '\n';
}

void write_grf_check_csv(std::ostream& os, const std::vector<GrfCheckRow>& rows) {
    os << "s,alpha,alpha_hat_mean,alpha_hat_std,r2_mean,seeds\n";
    for (const auto& r : rows)
        os << fmt_num(r.s) << ',' << fmt_num(r.alpha) << ',' << fmt_num(r.alpha_hat_mean) << ','
           << fmt_num(r.alpha_hat_std) << ',' << fmt_num(r.r2_mean) << ',' << r.seeds << '\n';
}

void write_kernel_check_csv(std::ostream& os, const std::vector<KernelCheckRow>& rows) {
    os << "seed,kind,alpha_hat,r2,band_limited,cutoff,N,grid_l2,bound,rigorous_bound,holds\n";
    for (const auto& r : rows)
        os << r.seed << ',' << r.kind << ',' << fmt_num(r.decay.alpha_hat) << ',' << fmt_num(r.decay.r2) << ','
           << (r.decay.band_limited ? 1 : 0) << ',' << r.decay.cutoff << ',' << r.n << ','
           << fmt_num(r.grid_norm.measured) << ',' << fmt_num(r.grid_norm.bound) << ','
           << fmt_num(r.grid_norm.rigorous_bound) << ',' << (r.grid_norm.holds ? 1 : 0) << '\n';
}

json to_json(const LogLogFit& f) {
    return {{"slope", num(f.slope)}, {"intercept", num(f.intercept)}, {"r2", num(f.r2)}, {"points", f.points}};
}

json to_json(const BoundReport& r) {
    json layers = json::array();
    for (const auto& l : r.layers)
        layers.push_back({{"w_norm", num(l.w_norm)},
                          {"kernel_term", num(l.kernel_term)},
                          {"a_factor", num(l.a_factor)},
                          {"khat_sup", num(l.khat_sup)},
                          {"hs_norm", num(l.hs_norm)},
                          {"b_term", num(l.b_term)}});
    return {{"A", num(r.A)},
            {"B", num(r.B)},
            {"beta", num(r.beta)},
            {"N", r.N},
            {"T", r.T},
            {"d", r.d},
            {"bound_value", num(r.bound_value)},
            {"regime", regime_name(r.regime)},
            {"s", r.s},
            {"s_eff", r.s_eff},
            {"s_capped", r.s_capped},
            {"alpha", r.alpha},
            {"k_cutoff", r.k_cutoff},
            {"c_ds", num(r.c_ds)},
            {"layers", layers}};
}

json to_json(const StackLipschitz& l) {
    return {{"value", num(l.value)},
            {"w_norm", nums(l.w_norm)},
            {"young", nums(l.young)},
            {"l2", nums(l.l2)},
            {"l2_normalized", nums(l.l2_normalized)},
            {"factors", nums(l.factors)}};
}

json to_json(const ErrorCurve& c) {
    json pts = json::array();
    for (const auto& p : c.points)
        pts.push_back({{"N", p.N},
                       {"mean_rel_err", num(p.mean_rel)},
                       {"std_rel_err", num(p.std_rel)},
                       {"mean_abs_err", num(p.mean_abs)},
                       {"std_abs_err", num(p.std_abs)},
                       {"mean_bound", num(p.mean_bound)},
                       {"n_samples", p.n_samples}});
    return {{"experiment", c.experiment}, {"seed", c.seed},           {"s", c.s},
            {"activation", c.activation}, {"points", pts},            {"fit", to_json(c.fit)},
            {"abs_fit", to_json(c.abs_fit)}, {"bound", to_json(c.bound)}};
}

json to_json(const PerturbationCurve& c) {
    return {{"experiment", c.experiment},
            {"seed", c.seed},
            {"T", c.T},
            {"epsilon", nums(c.eps)},
            {"mean_err", nums(c.mean)},
            {"std_err", nums(c.std)},
            {"max_ratio", nums(c.max_ratio)},
            {"linear_fit", to_json(c.linear)},
            {"empirical_lipschitz", num(c.empirical_lipschitz)},
            {"c_nt", num(c.c_nt)},
            {"lipschitz", to_json(c.lipschitz)}};
}

json to_json(const DepthResult& r) {
    json table = json::array();
    for (const auto& row : r.table)
        table.push_back({{"T", row.T},
                         {"empirical_lipschitz", num(row.empirical_lipschitz)},
                         {"c_nt", num(row.c_nt)},
                         {"mean_err_max_eps", num(row.mean_err_max_eps)}});
    json curves = json::array();
    for (const auto& c : r.curves) curves.push_back(to_json(c));
    return {{"table", table}, {"curves", curves}};
}

json to_json(const NyquistCurve& c) {
    json pts = json::array();
    for (const auto& p : c.points)
        pts.push_back({{"L", p.N}, {"mean_rel_err", num(p.mean_rel)}, {"std_rel_err", num(p.std_rel)}});
    return {{"k", c.k}, {"nyquist_L", c.nyquist_L}, {"points", pts}, {"fit", to_json(c.fit)}};
}

json to_json(const IssReport& r) {
    json lips = json::array();
    for (const auto& l : r.lipschitz) lips.push_back(to_json(l));
    std::size_t dominated = 0;
    for (const auto& row : r.rows) dominated += row.dominated;
    return {{"c_ds", num(r.c_ds)},
            {"all_dominated", r.all_dominated},
            {"rows", r.rows.size()},
            {"dominated_rows", dominated},
            {"lipschitz", lips}};
}

json to_json(const GrfCheckRow& r) {
    return {{"s", num(r.s)},
            {"alpha", num(r.alpha)},
            {"alpha_hat_mean", num(r.alpha_hat_mean)},
            {"alpha_hat_std", num(r.alpha_hat_std)},
            {"r2_mean", num(r.r2_mean)},
            {"seeds", r.seeds}};
}

json to_json(const KernelCheckRow& r) {
    return {{"seed", r.seed},
            {"kind", r.kind},
            {"alpha_hat", num(r.decay.alpha_hat)},
            {"r2", num(r.decay.r2)},
            {"band_limited", r.decay.band_limited},
            {"cutoff", r.decay.cutoff},
            {"N", r.n},
            {"grid_l2", num(r.grid_norm.measured)},
            {"bound", num(r.grid_norm.bound)},
            {"rigorous_bound", num(r.grid_norm.rigorous_bound)},
            {"holds", r.grid_norm.holds}};
}

}  // namespace noperr
