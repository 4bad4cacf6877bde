#include "noperr/grid.hpp"

#include "noperr/fft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace noperr {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void check_grid_shape(int dim, std::size_t n) {
    if (dim != 1 && dim != 2) throw StructuralError("grid dimension must be 1 or 2, got " + std::to_string(dim));
    if (n < 2 || !is_power_of_two(n))
        throw DomainError("grid size must be an even power of two, got " + std::to_string(n));
}

std::size_t grid_points(int dim, std::size_t n) { return dim == 1 ? n : n * n; }

GridField::GridField(int dim, std::size_t n, std::size_t channels)
    : dim_(dim), n_(n), channels_(channels) {
    check_grid_shape(dim, n);
    if (channels == 0) throw StructuralError("field needs at least one channel");
    values_.assign(grid_points(dim, n) * channels, 0.0);
}

GridField::GridField(int dim, std::size_t n, std::size_t channels, std::vector<double> values)
    : dim_(dim), n_(n), channels_(channels), values_(std::move(values)) {
    check_grid_shape(dim, n);
    if (channels == 0) throw StructuralError("field needs at least one channel");
    if (values_.size() != grid_points(dim, n) * channels)
        throw StructuralError("field value count " + std::to_string(values_.size()) + " != N^d*H = " +
                              std::to_string(grid_points(dim, n) * channels));
}

SpectralField::SpectralField(int dim, std::size_t n, std::size_t channels)
    : dim_(dim), n_(n), channels_(channels) {
    check_grid_shape(dim, n);
    if (channels == 0) throw StructuralError("field needs at least one channel");
    coeffs_.assign(grid_points(dim, n) * channels, cplx{});
}

long centered_index(std::size_t j, std::size_t n) {
    return j < n / 2 ? static_cast<long>(j) : static_cast<long>(j) - static_cast<long>(n);
}

std::size_t fold_index(long xi, std::size_t n) {
    long m = static_cast<long>(n);
    long r = xi % m;
    return static_cast<std::size_t>(r < 0 ? r + m : r);
}

Frequency Frequency::from_index(std::size_t flat, int dim, std::size_t n) {
    Frequency f;
    f.dim = dim;
    if (dim == 1) {
        f.xi[0] = centered_index(flat, n);
    } else {
        f.xi[0] = centered_index(flat / n, n);
        f.xi[1] = centered_index(flat % n, n);
    }
    return f;
}

Frequency Frequency::centered(std::size_t n) const {
    Frequency f = *this;
    for (int i = 0; i < dim; ++i) f.xi[i] = centered_index(fold_index(xi[i], n), n);
    return f;
}

std::size_t Frequency::index(std::size_t n) const {
    if (dim == 1) return fold_index(xi[0], n);
    return fold_index(xi[0], n) * n + fold_index(xi[1], n);
}

double Frequency::norm() const {
    double s = 0;
    for (int i = 0; i < dim; ++i) s += double(xi[i]) * double(xi[i]);
    return std::sqrt(s);
}

long Frequency::max_abs() const {
    long m = 0;
    for (int i = 0; i < dim; ++i) m = std::max(m, std::labs(xi[i]));
    return m;
}

SpectralField dft_forward(const GridField& f) {
    check_grid_shape(f.dim(), f.n());
    SpectralField F(f.dim(), f.n(), f.channels());
    std::vector<cplx> in(f.values().begin(), f.values().end());
    fft::transform(f.dim(), f.n(), f.channels(), -1, in.data(), F.coeffs().data());
    double scale = 1.0 / double(grid_points(f.dim(), f.n()));
    for (auto& c : F.coeffs()) c *= scale;
    return F;
}

namespace {

std::vector<cplx> inverse_complex(const SpectralField& F) {
    std::vector<cplx> out(F.coeffs().size());
    fft::transform(F.dim(), F.n(), F.channels(), +1, F.coeffs().data(), out.data());
    return out;
}

}  // namespace

GridField dft_inverse(const SpectralField& F, double imag_tol) {
    auto out = inverse_complex(F);
    double peak = 0, resid = 0;
    for (const auto& c : out) {
        peak = std::max(peak, std::abs(c.real()));
        resid = std::max(resid, std::abs(c.imag()));
    }
    // relative to the field scale, absolute for tiny fields
    if (resid > imag_tol * std::max(1.0, peak))
        throw SymmetryError("inverse DFT: imaginary residue " + std::to_string(resid) +
                            " exceeds tolerance; spectrum is not Hermitian");
    std::vector<double> v(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) v[i] = out[i].real();
    return GridField(F.dim(), F.n(), F.channels(), std::move(v));
}

GridField dft_inverse_real_part(const SpectralField& F) {
    auto out = inverse_complex(F);
    std::vector<double> v(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) v[i] = out[i].real();
    return GridField(F.dim(), F.n(), F.channels(), std::move(v));
}

KernelSpectrum::KernelSpectrum(int dim_, std::size_t n_, std::size_t rows_, std::size_t cols_)
    : dim(dim_), n(n_), rows(rows_), cols(cols_) {
    check_grid_shape(dim, n);
    data.assign(grid_points(dim, n) * rows * cols, cplx{});
}

KernelSamples::KernelSamples(int dim_, std::size_t n_, std::size_t rows_, std::size_t cols_)
    : dim(dim_), n(n_), rows(rows_), cols(cols_) {
    check_grid_shape(dim, n);
    data.assign(grid_points(dim, n) * rows * cols, cplx{});
}

KernelSpectrum kernel_spectrum(const KernelSamples& k) {
    KernelSpectrum s(k.dim, k.n, k.rows, k.cols);
    fft::transform(k.dim, k.n, k.rows * k.cols, -1, k.data.data(), s.data.data());
    double scale = 1.0 / double(grid_points(k.dim, k.n));
    for (auto& c : s.data) c *= scale;
    return s;
}

KernelSamples kernel_samples(const KernelSpectrum& s) {
    KernelSamples k(s.dim, s.n, s.rows, s.cols);
    fft::transform(s.dim, s.n, s.rows * s.cols, +1, s.data.data(), k.data.data());
    return k;
}

GridField discrete_convolve(const KernelSpectrum& K, const GridField& v) {
    if (K.dim != v.dim() || K.n != v.n()) throw StructuralError("kernel spectrum and field grids differ");
    if (K.cols != v.channels())
        throw StructuralError("kernel has " + std::to_string(K.cols) + " input channels, field has " +
                              std::to_string(v.channels()));
    SpectralField V = dft_forward(v);
    SpectralField W(v.dim(), v.n(), K.rows);
    const std::size_t P = V.points();
    for (std::size_t f = 0; f < P; ++f) {
        const cplx* k = K.block(f);
        const cplx* x = V.mode(f);
        cplx* y = W.mode(f);
        for (std::size_t r = 0; r < K.rows; ++r) {
            cplx acc{};
            for (std::size_t c = 0; c < K.cols; ++c) acc += k[r * K.cols + c] * x[c];
            y[r] = acc;
        }
    }
    return dft_inverse_real_part(W);
}

double grid_l2_norm(const GridField& f) {
    double s = 0;
    for (double x : f.values()) s += x * x;
    return std::sqrt(s);
}

double grid_l2_norm_normalized(const GridField& f) {
    return grid_l2_norm(f) / std::sqrt(double(grid_points(f.dim(), f.n())));
}

double grid_l2_distance(const GridField& a, const GridField& b) {
    if (!a.same_shape(b)) throw StructuralError("distance between fields of different shape");
    double s = 0;
    auto x = a.values();
    auto y = b.values();
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
    return std::sqrt(s);
}

double sobolev_norm(const SpectralField& F, double s) {
    if (!(s >= 0)) throw DomainError("Sobolev index must be >= 0");
    double acc = 0;
    for (std::size_t f = 0; f < F.points(); ++f) {
        Frequency xi = Frequency::from_index(f, F.dim(), F.n());
        double r2 = xi.norm() * xi.norm();
        double w = std::pow(1.0 + r2, s);
        const cplx* m = F.mode(f);
        double e = 0;
        for (std::size_t c = 0; c < F.channels(); ++c) e += std::norm(m[c]);
        acc += w * e;
    }
    return std::sqrt(acc);
}

double sobolev_norm(const GridField& f, double s) {
    if (!(s >= 0)) throw DomainError("Sobolev index must be >= 0");
    return sobolev_norm(dft_forward(f), s);
}

namespace {

struct Tap {
    std::size_t src;
    double w;
};

// per-axis source taps for each target index; Nyquist mode is split on
// upsampling and folded back on downsampling so both stay real
std::vector<std::vector<Tap>> axis_taps(std::size_t n_src, std::size_t n_dst) {
    std::vector<std::vector<Tap>> taps(n_dst);
    long hs = static_cast<long>(n_src / 2);
    long hd = static_cast<long>(n_dst / 2);
    for (std::size_t j = 0; j < n_dst; ++j) {
        long eta = centered_index(j, n_dst);
        if (n_dst >= n_src) {
            if (std::labs(eta) < hs) taps[j].push_back({fold_index(eta, n_src), 1.0});
            else if (std::labs(eta) == hs) taps[j].push_back({fold_index(-hs, n_src), n_dst == n_src ? 1.0 : 0.5});
        } else {
            taps[j].push_back({fold_index(eta, n_src), 1.0});
            if (eta == -hd) taps[j].push_back({fold_index(hd, n_src), 1.0});
        }
    }
    return taps;
}

}  // namespace

GridField resample(const GridField& f, std::size_t n_target) {
    if (n_target < 2 || !is_power_of_two(n_target))
        throw DomainError("resample target must be an even power of two, got " + std::to_string(n_target));
    if (n_target == f.n()) return f;
    SpectralField F = dft_forward(f);
    SpectralField G(f.dim(), n_target, f.channels());
    auto taps = axis_taps(f.n(), n_target);
    const std::size_t H = f.channels();
    if (f.dim() == 1) {
        for (std::size_t j = 0; j < n_target; ++j)
            for (const auto& t : taps[j])
                for (std::size_t c = 0; c < H; ++c) G.at(j, c) += t.w * F.at(t.src, c);
    } else {
        for (std::size_t j0 = 0; j0 < n_target; ++j0)
            for (std::size_t j1 = 0; j1 < n_target; ++j1)
                for (const auto& a : taps[j0])
                    for (const auto& b : taps[j1]) {
                        std::size_t src = a.src * f.n() + b.src;
                        std::size_t dst = j0 * n_target + j1;
                        for (std::size_t c = 0; c < H; ++c) G.at(dst, c) += a.w * b.w * F.at(src, c);
                    }
    }
    return dft_inverse_real_part(G);
}

GridField subsample_stride(const GridField& f, std::size_t n_target) {
    if (n_target == 0 || f.n() % n_target != 0)
        throw DomainError("stride subsampling needs a divisor of N, got " + std::to_string(n_target));
    check_grid_shape(f.dim(), n_target);
    std::size_t stride = f.n() / n_target;
    GridField g(f.dim(), n_target, f.channels());
    const std::size_t H = f.channels();
    if (f.dim() == 1) {
        for (std::size_t i = 0; i < n_target; ++i)
            std::copy_n(f.point(i * stride), H, g.point(i));
    } else {
        for (std::size_t i = 0; i < n_target; ++i)
            for (std::size_t j = 0; j < n_target; ++j)
                std::copy_n(f.point(i * stride * f.n() + j * stride), H, g.point(i * n_target + j));
    }
    return g;
}

GridField operator-(const GridField& a, const GridField& b) {
    if (!a.same_shape(b)) throw StructuralError("field shapes differ");
    GridField r = a;
    auto y = b.values();
    auto x = r.values();
    for (std::size_t i = 0; i < x.size(); ++i) x[i] -= y[i];
    return r;
}

GridField operator+(const GridField& a, const GridField& b) {
    if (!a.same_shape(b)) throw StructuralError("field shapes differ");
    GridField r = a;
    auto y = b.values();
    auto x = r.values();
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += y[i];
    return r;
}

GridField scaled(const GridField& a, double s) {
    GridField r = a;
    for (auto& x : r.values()) x *= s;
    return r;
}

}  // namespace noperr
