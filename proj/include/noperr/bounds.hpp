#pragma once

#include "noperr/grid.hpp"
#include "noperr/kernels.hpp"
#include "noperr/operator.hpp"

#include <span>
#include <string>
#include <vector>

namespace noperr {

struct LogLogFit {
    double slope = 0;
    double intercept = 0;
    double r2 = 0;
    std::size_t points = 0;
};

// ordinary least squares on (log x, log y); needs >= 3 positive points
LogLogFit loglog_fit(std::span<const double> x, std::span<const double> y);
// plain OLS y = slope x + intercept
LogLogFit linear_fit(std::span<const double> x, std::span<const double> y);

double activation_lipschitz(const Activation& a);
double c_kernel(const SSNOKernel& k);

// kernel part of the per-layer factor of A: K d C(K) for the sum form,
// K^{d/2} C(K)^{d/2} for the product form. FNO kernels use the sup-norm
// bound sum_k |P_k|_op in the same slot.
double kernel_term_A(const Kernel& k);
double constant_A(const OperatorModel& m);

enum class Regime { Cutoff, PolynomialDecay };
std::string regime_name(Regime r);

struct LayerBoundTerms {
    double w_norm = 0;
    double kernel_term = 0;
    double a_factor = 0;  // L_sigma (|W| + kernel_term)
    double khat_sup = 0;
    double hs_norm = 0;
    double b_term = 0;
};

struct BoundReport {
    double A = 0, B = 0, beta = 0;
    std::size_t N = 0, T = 0;
    int d = 1;
    double bound_value = 0;
    Regime regime = Regime::Cutoff;
    double s = 0;
    double s_eff = 0;
    bool s_capped = false;  // non-smooth activation: s replaced by min(1.49, s)
    double alpha = 0;       // kernel decay exponent, polynomial regime only
    std::size_t k_cutoff = 0;
    double c_ds = 1.0;
    std::vector<LayerBoundTerms> layers;
};

// beta = d/2 - s (cutoff) or max(d/2 - s, d - alpha) (polynomial decay)
double discretization_exponent(Regime r, int d, double s, double alpha);
// N^beta B (A^T - 1)/(A - 1), or B T N^beta when |A - 1| < 1e-12
double discretization_bound_value(double A, double B, double beta, std::size_t N, std::size_t T);

struct BoundInputs {
    double A = 0, B = 0;
    int d = 1;
    std::size_t N = 0, T = 0;
    double s = 0;
    double alpha = 0;
    Regime regime = Regime::Cutoff;
};
BoundReport discretization_bound(const BoundInputs& in);

// smoothness used in the bound: capped at 1.49 when any layer uses a
// non-smooth activation
double effective_smoothness(const OperatorModel& m, double s, bool* capped = nullptr);

// B = L_sigma C_{d,s} K_c^{d/2+s} sup_t |K_hat_t|_inf |v_t|_{H^s}; states are
// v_0..v_{T-1} (extra trailing states are ignored)
double constant_B_cutoff(const OperatorModel& m, const std::vector<GridField>& states, double s, std::size_t k_cutoff,
                         double c_ds = 1.0, std::vector<LayerBoundTerms>* terms = nullptr);
// polynomial regime: B = L_sigma C sup_t C_{d,alpha,t} |v_t|_{H^s} with
// C_{d,alpha,t} = max_xi |K_hat_t(xi)| (1+|xi|)^alpha over the state grid
double constant_B_polynomial(const OperatorModel& m, const std::vector<GridField>& states, double s, double alpha,
                             double c_ds = 1.0, std::vector<LayerBoundTerms>* terms = nullptr);

// full report for a model evaluated at coarse resolution N, given the
// reference states (captured on the fine grid)
BoundReport make_bound_report(const OperatorModel& m, const std::vector<GridField>& states, std::size_t N, double s,
                              Regime regime, std::size_t k_cutoff, double alpha = 0, double c_ds = 1.0);

double continuous_stack_lipschitz(const OperatorModel& m);

struct StackLipschitz {
    double value = 0;                      // prod_t L_sigma (|W_t| + young_t)
    std::vector<double> w_norm;
    std::vector<double> young;             // (1/N^d) sum_x |K_N(x)|_op
    std::vector<double> l2;                // (sum_x |K_N(x)|_op^2)^{1/2}, unnormalized
    std::vector<double> l2_normalized;     // N^{-d/2} times the above
    std::vector<double> factors;
};

StackLipschitz discrete_stack_lipschitz(const OperatorModel& m, std::size_t N, ConvMode mode);
StackLipschitz discrete_stack_lipschitz(const StackPlan& plan);

double iss_total_bound(double c_nt, double delta, double discretization_term);
double iss_total_bound(const StackLipschitz& lip, double delta, const BoundReport& bound);

}  // namespace noperr
