#pragma once

#include "noperr/grid.hpp"
#include "noperr/kernels.hpp"
#include "noperr/operator.hpp"
#include "noperr/rng.hpp"

#include <cmath>
#include <numbers>

namespace testutil {

using namespace noperr;

inline GridField random_field(int d, std::size_t n, std::size_t h, std::uint64_t seed) {
    GridField f(d, n, h);
    CounterRng r(seed);
    for (auto& x : f.values()) x = r.normal();
    return f;
}

inline std::array<double, 2> point_coords(std::size_t p, int d, std::size_t n) {
    if (d == 1) return {double(p) / double(n), 0.0};
    return {double(p / n) / double(n), double(p % n) / double(n)};
}

// direct O(P^2) normalized DFT
inline SpectralField naive_dft(const GridField& f) {
    const int d = f.dim();
    const std::size_t n = f.n(), P = f.points();
    SpectralField F(d, n, f.channels());
    for (std::size_t k = 0; k < P; ++k) {
        Frequency xi = Frequency::from_index(k, d, n);
        for (std::size_t p = 0; p < P; ++p) {
            auto x = point_coords(p, d, n);
            double ph = -2 * std::numbers::pi * (double(xi.xi[0]) * x[0] + (d == 2 ? double(xi.xi[1]) * x[1] : 0.0));
            cplx e = std::polar(1.0, ph);
            for (std::size_t c = 0; c < f.channels(); ++c) F.at(k, c) += e * f.at(p, c);
        }
        for (std::size_t c = 0; c < f.channels(); ++c) F.at(k, c) /= double(P);
    }
    return F;
}

// flat index of x - y on the periodic grid
inline std::size_t diff_index(std::size_t p, std::size_t q, int d, std::size_t n) {
    if (d == 1) return (p + n - q) % n;
    std::size_t a = (p / n + n - q / n) % n, b = (p % n + n - q % n) % n;
    return a * n + b;
}

// (1/N^d) sum_y K(x-y) v(y), real part
inline GridField brute_convolve(const KernelSamples& K, const GridField& v) {
    const std::size_t P = v.points();
    GridField w(v.dim(), v.n(), K.rows);
    for (std::size_t p = 0; p < P; ++p)
        for (std::size_t q = 0; q < P; ++q) {
            const cplx* k = K.block(diff_index(p, q, v.dim(), v.n()));
            for (std::size_t r = 0; r < K.rows; ++r) {
                cplx acc{};
                for (std::size_t c = 0; c < K.cols; ++c) acc += k[r * K.cols + c] * v.at(q, c);
                w.at(p, r) += acc.real() / double(P);
            }
        }
    return w;
}

inline double max_abs_diff(const GridField& a, const GridField& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.values().size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
    return m;
}

inline double max_abs(const GridField& a) {
    double m = 0;
    for (double x : a.values()) m = std::max(m, std::abs(x));
    return m;
}

inline Layer make_layer(Kernel k, Activation act, std::uint64_t seed) {
    Layer l;
    const auto dout = kernel_d_out(k), din = kernel_d_in(k);
    l.W.resize(dout, din);
    l.b.resize(dout);
    CounterRng r(seed, 77);
    for (Eigen::Index i = 0; i < l.W.size(); ++i) l.W.data()[i] = r.normal() / std::sqrt(double(din));
    for (Eigen::Index i = 0; i < l.b.size(); ++i) l.b[i] = 0.1 * r.normal();
    l.kernel = std::move(k);
    l.act = act;
    return l;
}

}  // namespace testutil
