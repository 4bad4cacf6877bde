#include "noperr/bounds.hpp"

#include "noperr/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace noperr {

LogLogFit linear_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw StructuralError("fit: x and y lengths differ");
    if (x.size() < 2) throw DomainError("fit needs at least 2 points");
    const double n = double(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0) throw DomainError("fit: all x values coincide");
    LogLogFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    // a perfectly flat y is fit exactly
    f.r2 = syy == 0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    f.points = x.size();
    return f;
}

LogLogFit loglog_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw StructuralError("fit: x and y lengths differ");
    if (x.size() < 3) throw DomainError("log-log fit needs at least 3 points");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0) || !(y[i] > 0)) throw DomainError("log-log fit needs positive data");
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    return linear_fit(lx, ly);
}

namespace {

double gelu_derivative(double x) {
    const double phi = std::exp(-0.5 * x * x) / std::sqrt(2 * std::numbers::pi);
    return 0.5 * std::erfc(-x / std::numbers::sqrt2) + x * phi;
}

double max_abs_derivative(double (*df)(double)) {
    constexpr int M = 2000000;
    double best = 0;
    for (int i = 0; i <= M; ++i) best = std::max(best, std::abs(df(-20.0 + 40.0 * i / M)));
    return best;
}

double tanh_derivative(double x) {
    double t = std::tanh(x);
    return 1 - t * t;
}

}  // namespace

double activation_lipschitz(const Activation& a) {
    switch (a.kind) {
        case ActKind::ReLU:
        case ActKind::Identity: return 1.0;
        case ActKind::LeakyReLU: return std::max(1.0, std::abs(a.slope));
        case ActKind::GELU: {
            static const double v = max_abs_derivative(gelu_derivative);
            return v;
        }
        case ActKind::Tanh: {
            static const double v = max_abs_derivative(tanh_derivative);
            return v;
        }
    }
    return 1.0;
}

double c_kernel(const SSNOKernel& k) { return ssno_c_constant(k); }

double kernel_term_A(const Kernel& kern) {
    if (auto* f = std::get_if<FNOKernel>(&kern)) {
        double s = 0;
        for (std::size_t b = 0; b < f->block_count(); ++b) s += spectral_norm(f->block(f->block_frequency(b)));
        return s;
    }
    const auto& k = std::get<SSNOKernel>(kern);
    const double K = double(k.modes), d = double(k.dim), C = c_kernel(k);
    if (k.form == SSNOForm::Sum || k.dim == 1) return K * d * C;
    return std::pow(K, d / 2) * std::pow(C, d / 2);
}

double constant_A(const OperatorModel& m) {
    double best = 0;
    for (const auto& l : m.layers)
        best = std::max(best, activation_lipschitz(l.act) * (spectral_norm(l.W) + kernel_term_A(l.kernel)));
    return best;
}

std::string regime_name(Regime r) { return r == Regime::Cutoff ? "cutoff" : "polynomial"; }

double discretization_exponent(Regime r, int d, double s, double alpha) {
    double b = d / 2.0 - s;
    if (r == Regime::PolynomialDecay) b = std::max(b, d - alpha);
    return b;
}

double discretization_bound_value(double A, double B, double beta, std::size_t N, std::size_t T) {
    double nb = std::pow(double(N), beta);
    if (std::abs(A - 1) < 1e-12) return B * double(T) * nb;
    return nb * B * (std::pow(A, double(T)) - 1) / (A - 1);
}

BoundReport discretization_bound(const BoundInputs& in) {
    BoundReport r;
    r.A = in.A;
    r.B = in.B;
    r.d = in.d;
    r.N = in.N;
    r.T = in.T;
    r.s = r.s_eff = in.s;
    r.alpha = in.alpha;
    r.regime = in.regime;
    r.beta = discretization_exponent(in.regime, in.d, in.s, in.alpha);
    r.bound_value = discretization_bound_value(in.A, in.B, r.beta, in.N, in.T);
    return r;
}

double effective_smoothness(const OperatorModel& m, double s, bool* capped) {
    bool rough = false;
    for (const auto& l : m.layers) rough = rough || l.act.kind == ActKind::ReLU || l.act.kind == ActKind::LeakyReLU;
    double out = rough ? std::min(1.49, s) : s;
    if (capped) *capped = rough && out < s;
    return out;
}

namespace {

void check_states(const OperatorModel& m, const std::vector<GridField>& states) {
    if (states.size() < m.layers.size())
        throw StructuralError("bound constant needs the states v_0..v_{T-1}, got " + std::to_string(states.size()));
}

}  // namespace

double constant_B_cutoff(const OperatorModel& m, const std::vector<GridField>& states, double s, std::size_t k_cutoff,
                         double c_ds, std::vector<LayerBoundTerms>* terms) {
    check_states(m, states);
    if (k_cutoff == 0) throw DomainError("K_cutoff must be positive");
    const int d = m.dim;
    const double kc = std::pow(double(k_cutoff), d / 2.0 + s);
    double best = 0;
    for (std::size_t t = 0; t < m.layers.size(); ++t) {
        const Layer& l = m.layers[t];
        // sup over the band |xi|_inf < K_cutoff of the analytic coefficients
        double khat = 0;
        long kcl = static_cast<long>(k_cutoff);
        Frequency xi;
        xi.dim = d;
        for (long a = -kcl + 1; a < kcl; ++a)
            for (long b = (d == 2 ? -kcl + 1 : 0); b < (d == 2 ? kcl : 1); ++b) {
                xi.xi = {a, b};
                khat = std::max(khat, spectral_norm(kernel_fourier_coeff(l.kernel, xi)));
            }
        double hs = sobolev_norm(states[t], s);
        double lt = activation_lipschitz(l.act) * c_ds * kc * khat * hs;
        if (terms) {
            if (terms->size() <= t) terms->resize(t + 1);
            (*terms)[t].khat_sup = khat;
            (*terms)[t].hs_norm = hs;
            (*terms)[t].b_term = lt;
        }
        best = std::max(best, lt);
    }
    return best;
}

double constant_B_polynomial(const OperatorModel& m, const std::vector<GridField>& states, double s, double alpha,
                             double c_ds, std::vector<LayerBoundTerms>* terms) {
    check_states(m, states);
    const int d = m.dim;
    if (!(alpha > d)) throw DomainError("polynomial regime needs kernel decay alpha > d");
    double best = 0;
    for (std::size_t t = 0; t < m.layers.size(); ++t) {
        const Layer& l = m.layers[t];
        const std::size_t n = states[t].n();
        double cda = 0, khat = 0;
        for (std::size_t f = 0; f < grid_points(d, n); ++f) {
            Frequency xi = Frequency::from_index(f, d, n);
            if (d == 2 && xi.xi[0] != 0 && xi.xi[1] != 0 && std::holds_alternative<SSNOKernel>(l.kernel) &&
                std::get<SSNOKernel>(l.kernel).form == SSNOForm::Sum)
                continue;
            double v = spectral_norm(kernel_fourier_coeff(l.kernel, xi));
            khat = std::max(khat, v);
            cda = std::max(cda, v * std::pow(1 + xi.norm(), alpha));
        }
        double hs = sobolev_norm(states[t], s);
        double lt = activation_lipschitz(l.act) * c_ds * cda * hs;
        if (terms) {
            if (terms->size() <= t) terms->resize(t + 1);
            (*terms)[t].khat_sup = khat;
            (*terms)[t].hs_norm = hs;
            (*terms)[t].b_term = lt;
        }
        best = std::max(best, lt);
    }
    return best;
}

BoundReport make_bound_report(const OperatorModel& m, const std::vector<GridField>& states, std::size_t N, double s,
                              Regime regime, std::size_t k_cutoff, double alpha, double c_ds) {
    BoundReport r;
    r.d = m.dim;
    r.N = N;
    r.T = m.layers.size();
    r.s = s;
    r.s_eff = effective_smoothness(m, s, &r.s_capped);
    r.regime = regime;
    r.alpha = alpha;
    r.k_cutoff = k_cutoff;
    r.c_ds = c_ds;
    r.layers.resize(m.layers.size());
    for (std::size_t t = 0; t < m.layers.size(); ++t) {
        auto& lt = r.layers[t];
        const Layer& l = m.layers[t];
        lt.w_norm = spectral_norm(l.W);
        lt.kernel_term = kernel_term_A(l.kernel);
        lt.a_factor = activation_lipschitz(l.act) * (lt.w_norm + lt.kernel_term);
        r.A = std::max(r.A, lt.a_factor);
    }
    r.B = regime == Regime::Cutoff ? constant_B_cutoff(m, states, r.s_eff, k_cutoff, c_ds, &r.layers)
                                   : constant_B_polynomial(m, states, r.s_eff, alpha, c_ds, &r.layers);
    r.beta = discretization_exponent(regime, r.d, r.s_eff, alpha);
    r.bound_value = discretization_bound_value(r.A, r.B, r.beta, N, r.T);
    return r;
}

double continuous_stack_lipschitz(const OperatorModel& m) {
    double c = 1;
    for (const auto& l : m.layers) {
        double kn;
        if (auto* k = std::get_if<SSNOKernel>(&l.kernel)) {
            kn = ssno_l1_opnorm_bound(*k);
        } else {
            // FNO: |K(z)|_op <= sum_k |P_k|_op pointwise on a unit-volume torus
            kn = kernel_term_A(l.kernel);
        }
        c *= activation_lipschitz(l.act) * (spectral_norm(l.W) + kn);
    }
    return c;
}

StackLipschitz discrete_stack_lipschitz(const StackPlan& plan) {
    StackLipschitz out;
    out.value = 1;
    const auto& m = plan.model();
    const double P = double(grid_points(m.dim, plan.n()));
    for (std::size_t t = 0; t < m.layers.size(); ++t) {
        const Layer& l = m.layers[t];
        auto norms = plan.layers()[t].kernel_opnorms();
        double s1 = 0, s2 = 0;
        for (double v : norms) {
            s1 += v;
            s2 += v * v;
        }
        double w = spectral_norm(l.W);
        double young = s1 / P;
        double f = activation_lipschitz(l.act) * (w + young);
        out.w_norm.push_back(w);
        out.young.push_back(young);
        out.l2.push_back(std::sqrt(s2));
        out.l2_normalized.push_back(std::sqrt(s2 / P));
        out.factors.push_back(f);
        out.value *= f;
    }
    return out;
}

StackLipschitz discrete_stack_lipschitz(const OperatorModel& m, std::size_t N, ConvMode mode) {
    return discrete_stack_lipschitz(StackPlan(m, N, mode));
}

double iss_total_bound(double c_nt, double delta, double discretization_term) {
    if (delta < 0) throw DomainError("noise level must be >= 0");
    return c_nt * delta + discretization_term;
}

double iss_total_bound(const StackLipschitz& lip, double delta, const BoundReport& bound) {
    return iss_total_bound(lip.value, delta, bound.bound_value);
}

}  // namespace noperr
