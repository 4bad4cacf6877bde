#include "doctest.h"
#include "helpers.hpp"

#include "noperr/linalg.hpp"

using namespace noperr;
using namespace testutil;

TEST_SUITE("grid") {

TEST_CASE("grid shape checks") {
    CHECK_NOTHROW(check_grid_shape(1, 64));
    CHECK_NOTHROW(check_grid_shape(2, 2));
    CHECK_THROWS_AS(check_grid_shape(1, 48), DomainError);
    CHECK_THROWS_AS(check_grid_shape(1, 1), DomainError);
    CHECK_THROWS_AS(check_grid_shape(3, 8), StructuralError);
    CHECK_THROWS_AS(GridField(1, 8, 2, std::vector<double>(15)), StructuralError);
}

TEST_CASE("centered frequencies round trip") {
    for (std::size_t n : {2u, 8u, 32u})
        for (std::size_t j = 0; j < n; ++j) {
            long c = centered_index(j, n);
            CHECK(c >= -long(n / 2));
            CHECK(c < long(n / 2));
            CHECK(fold_index(c, n) == j);
            CHECK(fold_index(c + 3 * long(n), n) == j);
        }
    for (std::size_t f = 0; f < 64; ++f) CHECK(Frequency::from_index(f, 2, 8).index(8) == f);
}

TEST_CASE("FFT matches the naive DFT") {
    for (int d : {1, 2}) {
        std::size_t n = d == 1 ? 16 : 8;
        GridField f = random_field(d, n, 3, 11 + d);
        SpectralField a = dft_forward(f), b = naive_dft(f);
        for (std::size_t i = 0; i < a.coeffs().size(); ++i)
            CHECK(std::abs(a.coeffs()[i] - b.coeffs()[i]) < 1e-12);
    }
}

TEST_CASE("inverse undoes forward and Parseval holds") {
    for (int d : {1, 2}) {
        GridField f = random_field(d, 16, 2, 5);
        SpectralField F = dft_forward(f);
        GridField g = dft_inverse(F);
        CHECK(max_abs_diff(f, g) < 1e-12);
        double e = 0;
        for (auto c : F.coeffs()) e += std::norm(c);
        double P = double(grid_points(d, 16));
        CHECK(std::abs(P * e - std::pow(grid_l2_norm(f), 2)) < 1e-10 * P * e);
    }
}

TEST_CASE("inverse rejects a non-Hermitian spectrum") {
    SpectralField F(1, 8, 1);
    F.at(1, 0) = cplx(1, 0);
    CHECK_THROWS_AS(dft_inverse(F), SymmetryError);
    GridField g = dft_inverse_real_part(F);
    CHECK(std::abs(g.at(2, 0) - std::cos(2 * std::numbers::pi * 2 / 8)) < 1e-14);
}

TEST_CASE("FFT convolution equals the brute-force grid sum") {
    for (int d : {1, 2}) {
        std::size_t n = d == 1 ? 32 : 8;
        KernelSamples K(d, n, 2, 3);
        CounterRng r(99 + d);
        for (auto& x : K.data) x = cplx(r.normal(), 0.0);
        GridField v = random_field(d, n, 3, 7);
        GridField fast = discrete_convolve(kernel_spectrum(K), v);
        GridField slow = brute_convolve(K, v);
        CHECK(max_abs_diff(fast, slow) < 1e-12 * std::max(1.0, max_abs(slow)));
    }
}

TEST_CASE("kernel spectrum and samples are inverse") {
    KernelSamples K(2, 4, 2, 2);
    CounterRng r(3);
    for (auto& x : K.data) x = cplx(r.normal(), r.normal());
    KernelSamples back = kernel_samples(kernel_spectrum(K));
    for (std::size_t i = 0; i < K.data.size(); ++i) CHECK(std::abs(K.data[i] - back.data[i]) < 1e-13);
}

TEST_CASE("Sobolev norm of a pure mode") {
    const std::size_t n = 64;
    GridField f(1, n, 1);
    for (std::size_t j = 0; j < n; ++j) f.at(j, 0) = std::sin(2 * std::numbers::pi * 5 * double(j) / n);
    for (double s : {0.0, 1.0, 2.5}) CHECK(sobolev_norm(f, s) == doctest::Approx(std::sqrt(std::pow(26.0, s) / 2)).epsilon(1e-12));
    CHECK_THROWS_AS(sobolev_norm(f, -1), DomainError);
}

TEST_CASE("trigonometric resampling is exact for resolved modes") {
    const std::size_t n = 16;
    auto fn = [](double x, double y) {
        return 1.0 + std::cos(2 * std::numbers::pi * 3 * x) + 0.5 * std::sin(2 * std::numbers::pi * (2 * x - y));
    };
    GridField f(2, n, 1), exact(2, 64, 1);
    for (std::size_t p = 0; p < f.points(); ++p) {
        auto x = point_coords(p, 2, n);
        f.at(p, 0) = fn(x[0], x[1]);
    }
    for (std::size_t p = 0; p < exact.points(); ++p) {
        auto x = point_coords(p, 2, 64);
        exact.at(p, 0) = fn(x[0], x[1]);
    }
    GridField up = resample(f, 64);
    CHECK(max_abs_diff(up, exact) < 1e-12);
    CHECK(max_abs_diff(resample(up, n), f) < 1e-12);
    CHECK(max_abs_diff(subsample_stride(exact, n), f) < 1e-12);
}

TEST_CASE("Nyquist mode stays real under resampling") {
    GridField f(1, 8, 1);
    for (std::size_t j = 0; j < 8; ++j) f.at(j, 0) = (j % 2) ? -1.0 : 1.0;
    GridField up = resample(f, 32);
    GridField down = resample(up, 8);
    CHECK(max_abs_diff(down, f) < 1e-12);
    GridField coarse = resample(f, 4);  // folded onto the mean of the pair
    CHECK(max_abs(coarse) < 1e-12);
}

TEST_CASE("field arithmetic") {
    GridField a = random_field(1, 8, 2, 1), b = random_field(1, 8, 2, 2);
    GridField c = a + b - b;
    CHECK(max_abs_diff(a, c) < 1e-15);
    CHECK(grid_l2_norm(scaled(a, 2)) == doctest::Approx(2 * grid_l2_norm(a)));
    CHECK(grid_l2_norm_normalized(a) == doctest::Approx(grid_l2_norm(a) / std::sqrt(8.0)));
    CHECK_THROWS_AS(a + random_field(1, 16, 2, 1), StructuralError);
}

}  // TEST_SUITE

TEST_SUITE("linalg") {

TEST_CASE("power iteration agrees with SVD") {
    for (int t = 0; t < 20; ++t) {
        CounterRng r(500 + t);
        Eigen::MatrixXcd m(3 + t % 4, 2 + t % 5);
        for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = cplx(r.normal(), r.normal());
        double svd = Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues()(0);
        CHECK(spectral_norm(m) == doctest::Approx(svd).epsilon(1e-8));
        Eigen::MatrixXd mr = m.real();
        double svr = Eigen::JacobiSVD<Eigen::MatrixXd>(mr).singularValues()(0);
        CHECK(spectral_norm(mr) == doctest::Approx(svr).epsilon(1e-8));
    }
    CHECK(spectral_norm(Eigen::MatrixXd(Eigen::MatrixXd::Zero(3, 3))) == 0.0);
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(2, 2);
    e(1, 0) = 4;  // orthogonal to the ones start only after one step
    CHECK(spectral_norm(e) == doctest::Approx(4));
}

}  // TEST_SUITE
