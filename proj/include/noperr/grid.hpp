#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace noperr {

using cplx = std::complex<double>;

struct StructuralError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};
struct SymmetryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

bool is_power_of_two(std::size_t n);
// throws unless dim in {1,2} and n an even power of two
void check_grid_shape(int dim, std::size_t n);
std::size_t grid_points(int dim, std::size_t n);

// Real samples on the grid (1/N){0..N-1}^d. Storage is row-major over the
// axes, channel index fastest: values[(i0*N + i1)*H + c].
class GridField {
public:
    GridField() = default;
    GridField(int dim, std::size_t n, std::size_t channels);
    GridField(int dim, std::size_t n, std::size_t channels, std::vector<double> values);

    int dim() const { return dim_; }
    std::size_t n() const { return n_; }
    std::size_t channels() const { return channels_; }
    std::size_t points() const { return values_.size() / (channels_ ? channels_ : 1); }

    double& at(std::size_t point, std::size_t ch) { return values_[point * channels_ + ch]; }
    double at(std::size_t point, std::size_t ch) const { return values_[point * channels_ + ch]; }
    double* point(std::size_t p) { return values_.data() + p * channels_; }
    const double* point(std::size_t p) const { return values_.data() + p * channels_; }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }
    std::vector<double>& raw() { return values_; }

    bool same_shape(const GridField& o) const {
        return dim_ == o.dim_ && n_ == o.n_ && channels_ == o.channels_;
    }

private:
    int dim_ = 1;
    std::size_t n_ = 0;
    std::size_t channels_ = 0;
    std::vector<double> values_;
};

// Fourier coefficients, same layout as GridField with frequency index
// {0..N-1}^d in place of the grid point.
class SpectralField {
public:
    SpectralField() = default;
    SpectralField(int dim, std::size_t n, std::size_t channels);

    int dim() const { return dim_; }
    std::size_t n() const { return n_; }
    std::size_t channels() const { return channels_; }
    std::size_t points() const { return coeffs_.size() / (channels_ ? channels_ : 1); }

    cplx& at(std::size_t freq, std::size_t ch) { return coeffs_[freq * channels_ + ch]; }
    cplx at(std::size_t freq, std::size_t ch) const { return coeffs_[freq * channels_ + ch]; }
    cplx* mode(std::size_t f) { return coeffs_.data() + f * channels_; }
    const cplx* mode(std::size_t f) const { return coeffs_.data() + f * channels_; }

    std::span<cplx> coeffs() { return coeffs_; }
    std::span<const cplx> coeffs() const { return coeffs_; }

private:
    int dim_ = 1;
    std::size_t n_ = 0;
    std::size_t channels_ = 0;
    std::vector<cplx> coeffs_;
};

// integer frequency; components are kept as given, centered() folds them
struct Frequency {
    int dim = 1;
    std::array<long, 2> xi{0, 0};

    static Frequency from_index(std::size_t flat, int dim, std::size_t n);  // centered rep
    Frequency centered(std::size_t n) const;
    std::size_t index(std::size_t n) const;  // flat index of xi mod N
    double norm() const;
    long max_abs() const;
};

long centered_index(std::size_t j, std::size_t n);
std::size_t fold_index(long xi, std::size_t n);

SpectralField dft_forward(const GridField& f);
// real inverse; throws SymmetryError if the imaginary residue exceeds tol
GridField dft_inverse(const SpectralField& F, double imag_tol = 1e-10);
// inverse keeping the real part only (used after multiplying by complex kernels)
GridField dft_inverse_real_part(const SpectralField& F);

// Per-frequency complex matrices K_hat(xi) (rows x cols), frequency-major,
// each matrix row-major.
struct KernelSpectrum {
    int dim = 1;
    std::size_t n = 0, rows = 0, cols = 0;
    std::vector<cplx> data;

    KernelSpectrum() = default;
    KernelSpectrum(int dim, std::size_t n, std::size_t rows, std::size_t cols);
    cplx* block(std::size_t f) { return data.data() + f * rows * cols; }
    const cplx* block(std::size_t f) const { return data.data() + f * rows * cols; }
};

// Kernel samples K(x) on the grid, same layout as KernelSpectrum.
struct KernelSamples {
    int dim = 1;
    std::size_t n = 0, rows = 0, cols = 0;
    std::vector<cplx> data;

    KernelSamples() = default;
    KernelSamples(int dim, std::size_t n, std::size_t rows, std::size_t cols);
    cplx* block(std::size_t p) { return data.data() + p * rows * cols; }
    const cplx* block(std::size_t p) const { return data.data() + p * rows * cols; }
};

// normalized DFT of every matrix entry
KernelSpectrum kernel_spectrum(const KernelSamples& k);
KernelSamples kernel_samples(const KernelSpectrum& s);

// w(x) = (1/N^d) sum_y K(x-y) v(y), computed as w_hat = K_hat v_hat; real part kept
GridField discrete_convolve(const KernelSpectrum& K, const GridField& v);

double grid_l2_norm(const GridField& f);
// N^{-d/2} * grid_l2_norm, the L2 norm of the trigonometric interpolant
double grid_l2_norm_normalized(const GridField& f);
double grid_l2_distance(const GridField& a, const GridField& b);
double sobolev_norm(const GridField& f, double s);
double sobolev_norm(const SpectralField& F, double s);

GridField resample(const GridField& f, std::size_t n_target);
// restriction to the coarse grid by taking every stride-th point per axis
GridField subsample_stride(const GridField& f, std::size_t n_target);

GridField operator-(const GridField& a, const GridField& b);
GridField operator+(const GridField& a, const GridField& b);
GridField scaled(const GridField& a, double s);

}  // namespace noperr
