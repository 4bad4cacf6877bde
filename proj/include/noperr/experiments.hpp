#pragma once

#include "noperr/bounds.hpp"
#include "noperr/grid.hpp"
#include "noperr/operator.hpp"
#include "noperr/random_fields.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace noperr {

inline constexpr std::uint64_t kDefaultSeed = 20240917;

// OnGrid: coarse final state against the reference restricted to the coarse
// grid. Lifted: coarse state resampled to the fine grid and compared there.
enum class ErrorMetric { OnGrid, Lifted };
enum class LiftMethod { Trigonometric, Nearest, Linear };

std::string metric_name(ErrorMetric m);
std::string lift_name(LiftMethod m);
ErrorMetric parse_metric(const std::string& s);
LiftMethod parse_lift(const std::string& s);

GridField lift_to(const GridField& f, std::size_t n_target, LiftMethod how);

struct InputSpec {
    double eps = 1.0;
    GrfConvention convention = GrfConvention::Variance;
    bool normalize = true;
};

struct SweepConfig {
    std::string name = "sweep";
    Architecture arch;
    std::uint64_t model_seed = kDefaultSeed;
    std::uint64_t seed = kDefaultSeed;
    std::size_t seed_offset = 0;  // samples use indices offset .. offset+samples-1
    std::size_t n_full = 4096;
    std::vector<std::size_t> factors{2, 4, 8, 16, 32, 64, 128};
    std::vector<double> smoothness{1, 2, 4};
    std::size_t samples = 50;
    InputSpec input;
    ConvMode mode = ConvMode::analytic_cutoff(16);
    ErrorMetric metric = ErrorMetric::OnGrid;
    LiftMethod lift = LiftMethod::Trigonometric;
    Regime regime = Regime::Cutoff;
    double kernel_alpha = 0;  // polynomial regime only
    double c_ds = 1.0;
    unsigned threads = 0;

    void validate() const;
};

struct CurvePoint {
    std::size_t N = 0;
    double mean_rel = 0, std_rel = 0;
    double mean_abs = 0, std_abs = 0;  // unnormalized grid l2 of E_T^(0)
    double mean_bound = 0;             // C_{d,s} = 1
    std::size_t n_samples = 0;
    std::vector<double> rel, abs, bound;  // per sample
};

struct ErrorCurve {
    std::string experiment;
    std::uint64_t seed = 0;
    double s = 0;
    std::string activation;
    std::vector<CurvePoint> points;
    LogLogFit fit;      // mean relative error vs N
    LogLogFit abs_fit;  // mean absolute error vs N
    BoundReport bound;  // worst sample, at the finest coarse resolution
};

// deterministic GRF input of d_a channels for sample index i
GridField sweep_input(const SweepConfig& cfg, double s, std::size_t sample, std::size_t channels);

std::vector<ErrorCurve> run_discretization_sweep(const SweepConfig& cfg);
ErrorCurve run_discretization_sweep(const SweepConfig& cfg, const OperatorModel& model, double s);

// smallest C_{d,s} with C * bound >= measured at every sample and resolution
double calibrate_cds(const std::vector<ErrorCurve>& curves);

struct StabilityConfig {
    std::string name = "stability";
    Architecture arch{1, 1, 1, 32, 1, KernelKind::SSNOSum, 16, {}};
    std::uint64_t model_seed = kDefaultSeed;
    std::uint64_t seed = kDefaultSeed;
    std::size_t n = 4096;
    double s = 2.0;
    InputSpec input;
    std::size_t inputs = 20;
    std::size_t directions = 20;
    std::vector<double> epsilons;  // default 0:0.025:0.8
    std::size_t lipschitz_pairs = 200;
    ConvMode mode = ConvMode::sampled();
    unsigned threads = 0;

    std::vector<double> eps_grid() const;
    void validate() const;
};

struct PerturbationCurve {
    std::string experiment;
    std::uint64_t seed = 0;
    std::size_t T = 0;
    std::vector<double> eps, mean, std;
    std::vector<double> max_ratio;  // max_samples f(eps)/eps (0 at eps=0)
    LogLogFit linear;               // mean f vs eps
    double empirical_lipschitz = 0;
    double c_nt = 0;
    StackLipschitz lipschitz;
};

// H-channel GRF state used as layer-stack input
GridField state_input(int dim, std::size_t n, std::size_t channels, double s, const InputSpec& in, std::uint64_t seed);
// Gaussian direction with unit (unnormalized) grid l2 norm
GridField unit_direction(int dim, std::size_t n, std::size_t channels, std::uint64_t seed);

PerturbationCurve run_stability_sweep(const StabilityConfig& cfg);
PerturbationCurve run_stability_sweep(const StabilityConfig& cfg, const OperatorModel& model);

// max over seeded GRF pairs of |L v1 - L v2| / |v1 - v2| for the layer stack
double estimate_empirical_lipschitz(const StackPlan& plan, std::size_t pairs, std::uint64_t seed, double s,
                                    const InputSpec& in, unsigned threads = 0);

struct DepthConfig {
    StabilityConfig base;
    std::vector<std::size_t> depths{1, 2, 4, 8, 16, 32};
};

struct DepthRow {
    std::size_t T = 0;
    double empirical_lipschitz = 0;
    double c_nt = 0;
    double mean_err_max_eps = 0;
};

struct DepthResult {
    std::vector<PerturbationCurve> curves;
    std::vector<DepthRow> table;
};

DepthResult run_depth_sweep(const DepthConfig& cfg);

struct NyquistConfig {
    std::string name = "nyquist";
    Architecture arch{1, 3, 1, 16, 1, KernelKind::SSNOSum, 16, {}};
    std::uint64_t model_seed = kDefaultSeed;
    std::uint64_t seed = kDefaultSeed;
    std::vector<long> ks{4, 8, 16, 32, 64, 128};
    std::vector<std::size_t> Ls{16, 32, 64, 128, 256, 512, 1024};
    std::size_t n_ref = 8192;
    std::size_t samples = 10;
    ConvMode mode = ConvMode::sampled();
    unsigned threads = 0;

    void validate() const;
};

struct NyquistCurve {
    long k = 0;
    std::vector<CurvePoint> points;  // N = L
    std::size_t nyquist_L = 0;       // 2k marker
    LogLogFit fit;                   // over L >= 2k (when >= 3 points)
};

std::vector<NyquistCurve> run_nyquist_stress(const NyquistConfig& cfg);

struct IssConfig {
    SweepConfig sweep;  // model, inputs, mode; factors pick the coarse grids
    double s = 2.0;
    std::vector<double> deltas{0.0, 1e-3, 1e-2, 1e-1};
};

struct IssRow {
    std::uint64_t sample = 0;
    std::size_t N = 0;
    double delta = 0;
    double measured = 0;
    double discretization_term = 0;
    double bound = 0;
    bool dominated = false;
};

struct IssReport {
    std::vector<IssRow> rows;
    std::vector<StackLipschitz> lipschitz;  // one per coarse N
    double c_ds = 1.0;
    bool all_dominated = false;
};

IssReport run_iss_check(const IssConfig& cfg);

// Per-layer error decomposition against the fine reference.
struct DecompositionRow {
    std::size_t t = 0;
    double e0 = 0, e1 = 0, e2 = 0;
    double e0_next = 0;
    double recursion_rhs = 0;  // L_sigma (|W| |E0| + |E1| + |E2|)
    double e2_bound = 0;       // N^{-d/2} |E0| |K_N|_l2
};

std::vector<DecompositionRow> error_decomposition(const OperatorModel& model, const GridField& a_full,
                                                  std::size_t n_coarse, ConvMode mode);

struct GrfCheckConfig {
    int dim = 1;
    std::size_t n = 4096;
    std::vector<double> smoothness{1, 2, 4};
    std::size_t seeds = 50;
    double xi_min = 8, xi_max = 1024;
    InputSpec input;
    std::uint64_t seed = kDefaultSeed;
    unsigned threads = 0;
};

struct GrfCheckRow {
    double s = 0, alpha = 0;
    double alpha_hat_mean = 0, alpha_hat_std = 0, r2_mean = 0;
    std::size_t seeds = 0;
};

std::vector<GrfCheckRow> run_grf_check(const GrfCheckConfig& cfg);

struct KernelCheckConfig {
    std::size_t seeds = 5;
    std::size_t channels = 32;
    std::size_t modes = 16;
    double xi_min = 64, xi_max = 2048;
    std::vector<std::size_t> grid{64, 256, 1024};
    std::uint64_t seed = kDefaultSeed;
};

struct KernelCheckRow {
    std::uint64_t seed = 0;
    std::string kind;
    SpectralDecay decay;
    std::size_t n = 0;
    GridNormCheck grid_norm;
};

std::vector<KernelCheckRow> run_kernel_check(const KernelCheckConfig& cfg);

}  // namespace noperr
