#include "noperr/kernels.hpp"

#include "noperr/bounds.hpp"
#include "noperr/linalg.hpp"
#include "noperr/rng.hpp"

#include <cmath>
#include <numbers>

namespace noperr {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

FNOKernel::FNOKernel(int dim_, std::size_t modes_, std::size_t d_out_, std::size_t d_in_)
    : dim(dim_), modes(modes_), d_out(d_out_), d_in(d_in_) {
    if (dim != 1 && dim != 2) throw StructuralError("FNO kernel dimension must be 1 or 2");
    weights.assign(block_count() * d_out * d_in, cplx{});
}

std::size_t FNOKernel::block_index(const Frequency& k) const {
    long K = static_cast<long>(modes);
    if (k.max_abs() > K) throw DomainError("frequency outside the FNO band");
    if (dim == 1) return static_cast<std::size_t>(k.xi[0] + K);
    return static_cast<std::size_t>(k.xi[0] + K) * side() + static_cast<std::size_t>(k.xi[1] + K);
}

Frequency FNOKernel::block_frequency(std::size_t b) const {
    Frequency f;
    f.dim = dim;
    long K = static_cast<long>(modes);
    if (dim == 1) {
        f.xi[0] = static_cast<long>(b) - K;
    } else {
        f.xi[0] = static_cast<long>(b / side()) - K;
        f.xi[1] = static_cast<long>(b % side()) - K;
    }
    return f;
}

Eigen::MatrixXcd FNOKernel::block(const Frequency& k) const {
    const cplx* p = weights.data() + block_index(k) * d_out * d_in;
    Eigen::MatrixXcd m(d_out, d_in);
    for (std::size_t r = 0; r < d_out; ++r)
        for (std::size_t c = 0; c < d_in; ++c) m(r, c) = p[r * d_in + c];
    return m;
}

void FNOKernel::set_block(const Frequency& k, const Eigen::MatrixXcd& p) {
    if (std::size_t(p.rows()) != d_out || std::size_t(p.cols()) != d_in)
        throw StructuralError("FNO block shape mismatch");
    Frequency neg = k;
    for (int i = 0; i < dim; ++i) neg.xi[i] = -k.xi[i];
    cplx* a = weights.data() + block_index(k) * d_out * d_in;
    cplx* b = weights.data() + block_index(neg) * d_out * d_in;
    for (std::size_t r = 0; r < d_out; ++r)
        for (std::size_t c = 0; c < d_in; ++c) {
            a[r * d_in + c] = p(r, c);
            b[r * d_in + c] = std::conj(p(r, c));
        }
    if (a == b)
        for (std::size_t i = 0; i < d_out * d_in; ++i) a[i] = cplx(a[i].real(), 0.0);
}

void FNOKernel::validate(double tol) const {
    if (dim != 1 && dim != 2) throw StructuralError("FNO kernel dimension must be 1 or 2");
    if (weights.size() != block_count() * d_out * d_in) throw StructuralError("FNO weight count mismatch");
    for (std::size_t b = 0; b < block_count(); ++b) {
        Frequency k = block_frequency(b);
        Frequency neg = k;
        for (int i = 0; i < dim; ++i) neg.xi[i] = -k.xi[i];
        const cplx* p = weights.data() + b * d_out * d_in;
        const cplx* q = weights.data() + block_index(neg) * d_out * d_in;
        for (std::size_t i = 0; i < d_out * d_in; ++i)
            if (std::abs(p[i] - std::conj(q[i])) > tol * (1.0 + std::abs(p[i])))
                throw StructuralError("FNO weights violate Hermitian pairing P(-k) = conj(P(k))");
    }
}

SSNOKernel::SSNOKernel(int dim_, SSNOForm form_, std::size_t modes_, std::size_t d_out_, std::size_t d_in_)
    : dim(dim_), form(form_), modes(modes_), d_out(d_out_), d_in(d_in_) {
    if (dim != 1 && dim != 2) throw StructuralError("SS-NO kernel dimension must be 1 or 2");
    std::size_t m = modes * dim;
    c.assign(m, 0.0);
    rho.assign(m, 1.0);
    omega.assign(m, 0.0);
    phase.assign(m, 0.0);
    c_plus.assign(modes * d_out, 0.0);
    c_minus.assign(modes * d_out, 0.0);
    b_plus.assign(modes * d_in, 0.0);
    b_minus.assign(modes * d_in, 0.0);
}

void SSNOKernel::validate() const {
    if (dim != 1 && dim != 2) throw StructuralError("SS-NO kernel dimension must be 1 or 2");
    std::size_t m = modes * dim;
    if (c.size() != m || rho.size() != m || omega.size() != m || phase.size() != m)
        throw StructuralError("SS-NO per-direction arrays must have K*d entries");
    if (c_plus.size() != modes * d_out || c_minus.size() != modes * d_out)
        throw StructuralError("SS-NO C vectors must have K*d_out entries");
    if (b_plus.size() != modes * d_in || b_minus.size() != modes * d_in)
        throw StructuralError("SS-NO B vectors must have K*d_in entries");
    for (double r : rho)
        if (!(r > 0)) throw DomainError("SS-NO damping rho must be > 0");
}

std::size_t kernel_d_out(const Kernel& k) {
    return std::visit([](const auto& x) { return x.d_out; }, k);
}
std::size_t kernel_d_in(const Kernel& k) {
    return std::visit([](const auto& x) { return x.d_in; }, k);
}
int kernel_dim(const Kernel& k) {
    return std::visit([](const auto& x) { return x.dim; }, k);
}
std::size_t kernel_modes(const Kernel& k) {
    return std::visit([](const auto& x) { return x.modes; }, k);
}

double wrap_coordinate(std::size_t j, std::size_t n) {
    return j < n / 2 ? double(j) / double(n) : double(j) / double(n) - 1.0;
}

cplx ssno_profile(double rho, double omega, double z, bool forward) {
    // forward on [0,1/2), backward on [-1/2,0)
    if (forward ? z < 0 : z >= 0) return {};
    return std::exp(cplx(-rho * std::abs(z), omega * z));
}

namespace {

// (1 - e^{-a/2}) / a with the a -> 0 limit handled
cplx half_interval_transform(cplx a) {
    if (std::abs(a) < 1e-6) return 0.5 - a / 8.0 + a * a / 48.0;
    return (1.0 - std::exp(-a / 2.0)) / a;
}

cplx amplitude(const SSNOKernel& k, std::size_t m, int i) {
    double ph = k.phase[m * k.dim + i];
    double c = k.amp(m, i);
    return ph == 0.0 ? cplx(c, 0.0) : std::polar(c, ph);
}

}  // namespace

cplx ssno_f_plus(double rho, double omega, double xi) {
    return half_interval_transform(cplx(rho, -(omega - kTwoPi * xi)));
}

cplx ssno_f_minus(double rho, double omega, double xi) {
    return half_interval_transform(cplx(rho, omega - kTwoPi * xi));
}

Eigen::MatrixXcd ssno_directional_eval(const SSNOKernel& k, int axis, double z) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(k.d_out, k.d_in);
    bool fwd = z >= 0;
    for (std::size_t q = 0; q < k.modes; ++q) {
        cplx a = amplitude(k, q, axis) * ssno_profile(k.damping(q, axis), k.freq(q, axis), z, fwd);
        if (a == cplx{}) continue;
        if (fwd) m += a * (k.cp(q) * k.bp(q).transpose()).cast<cplx>();
        else m += a * (k.cm(q) * k.bm(q).transpose()).cast<cplx>();
    }
    return m;
}

Eigen::MatrixXcd ssno_spatial_eval(const SSNOKernel& k, std::span<const double> z) {
    if (z.size() != std::size_t(k.dim)) throw StructuralError("evaluation point has wrong dimension");
    for (double x : z)
        if (!(x >= -0.5 && x < 0.5)) throw DomainError("SS-NO evaluation point outside [-1/2,1/2)^d");
    Eigen::MatrixXcd m = ssno_directional_eval(k, 0, z[0]);
    for (int i = 1; i < k.dim; ++i) {
        Eigen::MatrixXcd mi = ssno_directional_eval(k, i, z[i]);
        if (k.form == SSNOForm::Sum) m += mi;
        else m = m.cwiseProduct(mi);
    }
    return m;
}

Eigen::MatrixXcd ssno_directional_coeff(const SSNOKernel& k, int axis, double xi) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(k.d_out, k.d_in);
    for (std::size_t q = 0; q < k.modes; ++q) {
        cplx a = amplitude(k, q, axis);
        if (a == cplx{}) continue;
        double r = k.damping(q, axis), w = k.freq(q, axis);
        m += (a * ssno_f_plus(r, w, xi)) * (k.cp(q) * k.bp(q).transpose()).cast<cplx>();
        m += (a * ssno_f_minus(r, w, xi)) * (k.cm(q) * k.bm(q).transpose()).cast<cplx>();
    }
    return m;
}

Eigen::MatrixXcd ssno_fourier_coeff(const SSNOKernel& k, const Frequency& xi) {
    if (xi.dim != k.dim) throw StructuralError("frequency dimension mismatch");
    if (k.form == SSNOForm::Product || k.dim == 1) {
        Eigen::MatrixXcd m = ssno_directional_coeff(k, 0, double(xi.xi[0]));
        for (int i = 1; i < k.dim; ++i) m = m.cwiseProduct(ssno_directional_coeff(k, i, double(xi.xi[i])));
        return m;
    }
    // a directional term is constant along the other axes, so its transform
    // lives on the line where the other components vanish
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(k.d_out, k.d_in);
    for (int i = 0; i < k.dim; ++i) {
        bool on_line = true;
        for (int j = 0; j < k.dim; ++j)
            if (j != i && xi.xi[j] != 0) on_line = false;
        if (on_line) m += ssno_directional_coeff(k, i, double(xi.xi[i]));
    }
    return m;
}

Eigen::MatrixXcd fno_fourier_coeff(const FNOKernel& k, const Frequency& xi) {
    if (xi.dim != k.dim) throw StructuralError("frequency dimension mismatch");
    if (xi.max_abs() > static_cast<long>(k.modes)) return Eigen::MatrixXcd::Zero(k.d_out, k.d_in);
    return k.block(xi);
}

Eigen::MatrixXd fno_spatial_eval(const FNOKernel& k, std::span<const double> z) {
    if (z.size() != std::size_t(k.dim)) throw StructuralError("evaluation point has wrong dimension");
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(k.d_out, k.d_in);
    for (std::size_t b = 0; b < k.block_count(); ++b) {
        Frequency f = k.block_frequency(b);
        double ph = 0;
        for (int i = 0; i < k.dim; ++i) ph += kTwoPi * double(f.xi[i]) * z[i];
        cplx e = std::polar(1.0, ph);
        const cplx* p = k.weights.data() + b * k.d_out * k.d_in;
        for (std::size_t r = 0; r < k.d_out; ++r)
            for (std::size_t c = 0; c < k.d_in; ++c) m(r, c) += p[r * k.d_in + c] * e;
    }
    return m.real();
}

Eigen::MatrixXcd kernel_fourier_coeff(const Kernel& k, const Frequency& xi) {
    if (auto* f = std::get_if<FNOKernel>(&k)) return fno_fourier_coeff(*f, xi);
    return ssno_fourier_coeff(std::get<SSNOKernel>(k), xi);
}

namespace {

double factor_norms(const SSNOKernel& k, std::size_t q) {
    return k.cp(q).norm() * k.bp(q).norm() + k.cm(q).norm() * k.bm(q).norm();
}

}  // namespace

double ssno_l1_opnorm_bound(const SSNOKernel& k) {
    // per axis: int |K^(i)(z)| dz <= sum_k |c| (1-e^{-rho})/rho (|C+||B+| + |C-||B-|)
    std::vector<double> per_axis(k.dim, 0.0);
    for (int i = 0; i < k.dim; ++i)
        for (std::size_t q = 0; q < k.modes; ++q) {
            double r = k.damping(q, i);
            per_axis[i] += std::abs(k.amp(q, i)) * (-std::expm1(-r)) / r * factor_norms(k, q);
        }
    double out = k.form == SSNOForm::Sum ? 0.0 : 1.0;
    for (double a : per_axis) out = k.form == SSNOForm::Sum ? out + a : out * a;
    return out;
}

double ssno_l1_opnorm_bound_printed(const SSNOKernel& k) {
    double s = 0;
    for (int i = 0; i < k.dim; ++i)
        for (std::size_t q = 0; q < k.modes; ++q) {
            double r = k.damping(q, i);
            s += (-std::expm1(-r)) / r * k.cp(q).norm() * k.bp(q).norm();
        }
    return s;
}

double ssno_c_constant(const SSNOKernel& k) {
    double best = 0;
    for (int i = 0; i < k.dim; ++i)
        for (std::size_t q = 0; q < k.modes; ++q) best = std::max(best, std::abs(k.amp(q, i)) * factor_norms(k, q));
    return best;
}

KernelSamples sample_kernel(const Kernel& kern, std::size_t n) {
    const int d = kernel_dim(kern);
    KernelSamples out(d, n, kernel_d_out(kern), kernel_d_in(kern));
    const std::size_t R = out.rows, C = out.cols;
    auto store = [&](std::size_t p, const Eigen::MatrixXcd& m) {
        cplx* b = out.block(p);
        for (std::size_t r = 0; r < R; ++r)
            for (std::size_t c = 0; c < C; ++c) b[r * C + c] = m(r, c);
    };
    if (auto* f = std::get_if<FNOKernel>(&kern)) {
        double z[2];
        for (std::size_t p = 0; p < out.data.size() / (R * C); ++p) {
            if (d == 1) z[0] = wrap_coordinate(p, n);
            else {
                z[0] = wrap_coordinate(p / n, n);
                z[1] = wrap_coordinate(p % n, n);
            }
            store(p, fno_spatial_eval(*f, std::span<const double>(z, d)).cast<cplx>());
        }
        return out;
    }
    const auto& k = std::get<SSNOKernel>(kern);
    // directional components only depend on one coordinate
    std::vector<std::vector<Eigen::MatrixXcd>> dir(d, std::vector<Eigen::MatrixXcd>(n));
    for (int i = 0; i < d; ++i)
        for (std::size_t j = 0; j < n; ++j) dir[i][j] = ssno_directional_eval(k, i, wrap_coordinate(j, n));
    if (d == 1) {
        for (std::size_t j = 0; j < n; ++j) store(j, dir[0][j]);
        return out;
    }
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            store(a * n + b, k.form == SSNOForm::Sum ? Eigen::MatrixXcd(dir[0][a] + dir[1][b])
                                                      : Eigen::MatrixXcd(dir[0][a].cwiseProduct(dir[1][b])));
    return out;
}

GridNormCheck kernel_grid_l2(const Kernel& kern, std::size_t n) {
    const int d = kernel_dim(kern);
    KernelSamples s = sample_kernel(kern, n);
    const std::size_t R = s.rows, C = s.cols;
    double acc = 0;
    for (std::size_t p = 0; p < grid_points(d, n); ++p) {
        Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(s.block(p), R, C);
        double v = spectral_norm(Eigen::MatrixXcd(m));
        acc += v * v;
    }
    GridNormCheck out;
    out.measured = std::sqrt(acc);
    const double K = double(kernel_modes(kern));
    const double N = double(n);
    if (auto* f = std::get_if<FNOKernel>(&kern)) {
        double sup = 0, total = 0;
        for (std::size_t b = 0; b < f->block_count(); ++b) {
            Eigen::MatrixXcd p = f->block(f->block_frequency(b));
            sup = std::max(sup, p.norm());
            total += p.squaredNorm();
        }
        // Frobenius block norms make the bound provable
        out.bound = std::pow(3.0, d / 2.0) * std::pow(N * K, d / 2.0) * sup;
        out.rigorous_bound = std::pow(N, d / 2.0) * std::sqrt(total);
    } else {
        const auto& k = std::get<SSNOKernel>(kern);
        double Cd = ssno_c_constant(k);
        if (k.form == SSNOForm::Sum || d == 1) {
            out.bound = Cd * K * d * std::pow(N, d / 2.0);
            out.rigorous_bound = out.bound;
        } else {
            out.bound = std::pow(Cd * N * K, d / 2.0);
            out.rigorous_bound = std::pow(N, d / 2.0) * std::pow(Cd * K, d);
        }
    }
    out.holds = out.measured <= out.bound * (1 + 1e-12);
    return out;
}

SpectralDecay spectral_decay_fit_table(std::span<const double> xi, std::span<const double> mag) {
    SpectralDecay out;
    std::vector<double> x, y;
    for (std::size_t i = 0; i < xi.size(); ++i) {
        if (mag[i] == 0.0) {
            out.band_limited = true;
            continue;
        }
        out.cutoff = std::max(out.cutoff, static_cast<long>(std::lround(xi[i])));
        x.push_back(1.0 + xi[i]);
        y.push_back(mag[i]);
    }
    if (x.size() >= 3) {
        LogLogFit f = loglog_fit(x, y);
        out.alpha_hat = -f.slope;
        out.r2 = f.r2;
    }
    return out;
}

SpectralDecay spectral_decay_fit(const Kernel& k, double xi_min, double xi_max) {
    if (xi_min < 0 || xi_max < xi_min) throw DomainError("bad decay window");
    Frequency f;
    f.dim = kernel_dim(k);
    if (std::holds_alternative<FNOKernel>(k)) {
        // no slope to fit: report the support edge along the first axis
        SpectralDecay out;
        out.band_limited = true;
        for (long t = 0; t <= static_cast<long>(xi_max); ++t) {
            f.xi[0] = t;
            if (kernel_fourier_coeff(k, f).cwiseAbs().maxCoeff() > 0) out.cutoff = t;
        }
        return out;
    }
    std::vector<double> xs, ms;
    for (long t = static_cast<long>(std::ceil(xi_min)); t <= static_cast<long>(std::floor(xi_max)); ++t) {
        f.xi[0] = t;
        xs.push_back(double(t));
        ms.push_back(spectral_norm(kernel_fourier_coeff(k, f)));
    }
    return spectral_decay_fit_table(xs, ms);
}

SSNOKernel fno_to_ssno_embedding(const FNOKernel& k, double rho) {
    if (k.dim != 1) throw StructuralError("FNO to SS-NO embedding is only defined in 1D");
    // every Fourier atom P e^{2 pi i k z} split into real and imaginary parts,
    // each written as a sum of column rank-one terms C e_j^T
    const std::size_t per_atom = 2 * k.d_in;
    SSNOKernel s(1, SSNOForm::Sum, k.block_count() * per_atom, k.d_out, k.d_in);
    std::size_t q = 0;
    for (std::size_t b = 0; b < k.block_count(); ++b) {
        Frequency f = k.block_frequency(b);
        Eigen::MatrixXcd p = k.block(f);
        for (int part = 0; part < 2; ++part)
            for (std::size_t j = 0; j < k.d_in; ++j, ++q) {
                s.c[q] = 1.0;
                s.rho[q] = rho;
                s.omega[q] = kTwoPi * double(f.xi[0]);
                s.phase[q] = part == 0 ? 0.0 : std::numbers::pi / 2;
                for (std::size_t o = 0; o < k.d_out; ++o) {
                    double v = part == 0 ? p(o, j).real() : p(o, j).imag();
                    s.c_plus[q * k.d_out + o] = v;
                    s.c_minus[q * k.d_out + o] = v;
                }
                s.b_plus[q * k.d_in + j] = 1.0;
                s.b_minus[q * k.d_in + j] = 1.0;
            }
    }
    return s;
}

SSNOKernel ssno_random(int dim, SSNOForm form, std::size_t modes, std::size_t d_out, std::size_t d_in,
                       std::uint64_t seed, SSNOInit init) {
    SSNOKernel k(dim, form, modes, d_out, d_in);
    CounterRng rng(seed, 0x55a0);
    const double K = double(modes);
    const double lo = std::log(init.rho_min), hi = std::log(init.rho_max);
    for (std::size_t q = 0; q < modes; ++q)
        for (int i = 0; i < dim; ++i) {
            std::size_t m = q * dim + i;
            k.rho[m] = std::exp(rng.uniform(lo, hi));
            k.omega[m] = rng.uniform(-kTwoPi * K, kTwoPi * K);
            k.c[m] = rng.normal(0.0, std::sqrt(1.0 / K));
        }
    double so = 1.0 / std::sqrt(double(d_out)), si = 1.0 / std::sqrt(double(d_in));
    for (auto& x : k.c_plus) x = rng.normal(0.0, so);
    for (auto& x : k.b_plus) x = rng.normal(0.0, si);
    for (auto& x : k.c_minus) x = rng.normal(0.0, so);
    for (auto& x : k.b_minus) x = rng.normal(0.0, si);
    return k;
}

FNOKernel fno_random(int dim, std::size_t modes, std::size_t d_out, std::size_t d_in, std::uint64_t seed) {
    FNOKernel k(dim, modes, d_out, d_in);
    CounterRng rng(seed, 0xf40);
    double var = 1.0 / (double(d_in) * std::pow(double(k.side()), dim));
    for (std::size_t b = 0; b < k.block_count(); ++b) {
        Frequency f = k.block_frequency(b);
        // visit each conjugate pair once, from the nonnegative half
        Frequency neg = f;
        for (int i = 0; i < dim; ++i) neg.xi[i] = -f.xi[i];
        if (k.block_index(neg) < b) continue;
        Eigen::MatrixXcd p(d_out, d_in);
        bool self = k.block_index(neg) == b;
        for (Eigen::Index r = 0; r < p.rows(); ++r)
            for (Eigen::Index c = 0; c < p.cols(); ++c) {
                if (self) p(r, c) = cplx(rng.normal(0.0, std::sqrt(var)), 0.0);
                else p(r, c) = cplx(rng.normal(0.0, std::sqrt(var / 2)), rng.normal(0.0, std::sqrt(var / 2)));
            }
        k.set_block(f, p);
    }
    return k;
}

}  // namespace noperr
