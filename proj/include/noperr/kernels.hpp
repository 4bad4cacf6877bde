#pragma once

#include "noperr/grid.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace noperr {

// Band-limited kernel sum_{|k|_inf <= K} P^(k) e^{2 pi i k.z}.
// Blocks are stored for every k in {-K..K}^d, row-major over the shifted
// index (k_0+K, k_1+K), each block d_out x d_in row-major.
struct FNOKernel {
    int dim = 1;
    std::size_t modes = 0;
    std::size_t d_out = 0, d_in = 0;
    std::vector<cplx> weights;

    FNOKernel() = default;
    FNOKernel(int dim, std::size_t modes, std::size_t d_out, std::size_t d_in);

    std::size_t side() const { return 2 * modes + 1; }
    std::size_t block_count() const { return dim == 1 ? side() : side() * side(); }
    // index of k in the block table; k must lie in the band
    std::size_t block_index(const Frequency& k) const;
    Frequency block_frequency(std::size_t b) const;
    Eigen::MatrixXcd block(const Frequency& k) const;
    void set_block(const Frequency& k, const Eigen::MatrixXcd& p);  // also sets conj partner

    // throws unless shapes match and P^(-k) = conj(P^(k)) within tol
    void validate(double tol = 1e-12) const;
};

enum class SSNOForm { Sum, Product };

// Damped-oscillation kernel built from 1D directional components
//   K_pm^(i)(z_i) = 1{pm z_i >= 0} sum_k c_{k,i} e^{-rho_{k,i}|z_i|} e^{i omega_{k,i} z_i} C_pm^(k) B_pm^(k)^T
// with the forward part on [0,1/2) and the backward part on [-1/2,0), so z = 0
// is counted once.
// Per-direction scalars are indexed [k*dim + i]; vectors [k*d_out + o] / [k*d_in + j].
// phase is an optional extension (amplitude c e^{i phase}); it stays zero for
// ordinary kernels and is only needed to embed complex FNO weights.
struct SSNOKernel {
    int dim = 1;
    SSNOForm form = SSNOForm::Sum;
    std::size_t modes = 0;
    std::size_t d_out = 0, d_in = 0;
    std::vector<double> c, rho, omega, phase;
    std::vector<double> c_plus, b_plus, c_minus, b_minus;

    SSNOKernel() = default;
    SSNOKernel(int dim, SSNOForm form, std::size_t modes, std::size_t d_out, std::size_t d_in);

    double& amp(std::size_t k, int i) { return c[k * dim + i]; }
    double amp(std::size_t k, int i) const { return c[k * dim + i]; }
    double damping(std::size_t k, int i) const { return rho[k * dim + i]; }
    double freq(std::size_t k, int i) const { return omega[k * dim + i]; }
    Eigen::Map<const Eigen::VectorXd> cp(std::size_t k) const { return {c_plus.data() + k * d_out, Eigen::Index(d_out)}; }
    Eigen::Map<const Eigen::VectorXd> bp(std::size_t k) const { return {b_plus.data() + k * d_in, Eigen::Index(d_in)}; }
    Eigen::Map<const Eigen::VectorXd> cm(std::size_t k) const { return {c_minus.data() + k * d_out, Eigen::Index(d_out)}; }
    Eigen::Map<const Eigen::VectorXd> bm(std::size_t k) const { return {b_minus.data() + k * d_in, Eigen::Index(d_in)}; }

    // throws unless shapes are consistent and every rho > 0
    void validate() const;
};

using Kernel = std::variant<FNOKernel, SSNOKernel>;

std::size_t kernel_d_out(const Kernel& k);
std::size_t kernel_d_in(const Kernel& k);
int kernel_dim(const Kernel& k);
std::size_t kernel_modes(const Kernel& k);

// map a grid point j in {0..N-1} to z in [-1/2, 1/2)
double wrap_coordinate(std::size_t j, std::size_t n);

// forward / backward 1D scalar profile e^{-rho|z|}e^{i omega z} with its indicator
cplx ssno_profile(double rho, double omega, double z, bool forward);
// closed-form transforms of the forward / backward profiles over [0,1/2) and [-1/2,0)
cplx ssno_f_plus(double rho, double omega, double xi);
cplx ssno_f_minus(double rho, double omega, double xi);

Eigen::MatrixXcd ssno_directional_eval(const SSNOKernel& k, int axis, double z);
Eigen::MatrixXcd ssno_spatial_eval(const SSNOKernel& k, std::span<const double> z);
// 1D transform of the directional component along one axis
Eigen::MatrixXcd ssno_directional_coeff(const SSNOKernel& k, int axis, double xi);
// sum form: sum over axes with the other components of xi equal to zero;
// product form: Hadamard product of the directional transforms
Eigen::MatrixXcd ssno_fourier_coeff(const SSNOKernel& k, const Frequency& xi);

Eigen::MatrixXcd fno_fourier_coeff(const FNOKernel& k, const Frequency& xi);
Eigen::MatrixXd fno_spatial_eval(const FNOKernel& k, std::span<const double> z);

Eigen::MatrixXcd kernel_fourier_coeff(const Kernel& k, const Frequency& xi);

// integral of the pointwise operator norm, upper bound
double ssno_l1_opnorm_bound(const SSNOKernel& k);
// the bound exactly as printed: sum_i sum_k (1-e^{-rho})/rho |C+||B+|
double ssno_l1_opnorm_bound_printed(const SSNOKernel& k);

// sup_{i,k} |c_{k,i}| (|C+||B+| + |C-||B-|)
double ssno_c_constant(const SSNOKernel& k);

struct GridNormCheck {
    double measured = 0;        // (sum_x |K(x)|_op^2)^{1/2}
    double bound = 0;           // stated bound
    double rigorous_bound = 0;  // bound provable from the pointwise estimate
    bool holds = false;
};

// grid samples K(x), x on (1/N){0..N-1}^d folded into [-1/2,1/2)^d
KernelSamples sample_kernel(const Kernel& k, std::size_t n);
GridNormCheck kernel_grid_l2(const Kernel& k, std::size_t n);

struct SpectralDecay {
    double alpha_hat = 0;
    double r2 = 0;
    bool band_limited = false;
    long cutoff = -1;  // largest |xi| with a nonzero coefficient when band limited
};

// log-log slope of |K_hat(xi)|_op along xi = (t, 0..) for integer t in the window
SpectralDecay spectral_decay_fit(const Kernel& k, double xi_min, double xi_max);
SpectralDecay spectral_decay_fit_table(std::span<const double> xi, std::span<const double> mag);

// FNO atoms written as SS-NO directional terms with rho -> 0
SSNOKernel fno_to_ssno_embedding(const FNOKernel& k, double rho = 1e-8);

struct SSNOInit {
    double rho_min = 0.1, rho_max = 10.0;
};

SSNOKernel ssno_random(int dim, SSNOForm form, std::size_t modes, std::size_t d_out, std::size_t d_in,
                       std::uint64_t seed, SSNOInit init = {});
FNOKernel fno_random(int dim, std::size_t modes, std::size_t d_out, std::size_t d_in, std::uint64_t seed);

}  // namespace noperr
