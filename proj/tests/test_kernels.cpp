#include "doctest.h"
#include "helpers.hpp"

#include "noperr/linalg.hpp"

using namespace noperr;
using namespace testutil;

namespace {

// midpoint rule for int_{-1/2}^{1/2} K(z) e^{-2 pi i xi z} dz; the panel edges
// sit on z = 0 so the jump there costs nothing
Eigen::MatrixXcd quad_coeff(const SSNOKernel& k, double xi, int panels = 1 << 16) {
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(k.d_out, k.d_in);
    const double h = 1.0 / panels;
    for (int p = 0; p < panels; ++p) {
        double z = -0.5 + (p + 0.5) * h;
        acc += ssno_spatial_eval(k, std::span<const double>(&z, 1)) * std::polar(h, -2 * std::numbers::pi * xi * z);
    }
    return acc;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("closed-form profile transforms match quadrature") {
    CounterRng r(4);
    for (int t = 0; t < 10; ++t) {
        double rho = std::exp(r.uniform(std::log(0.1), std::log(10.0)));
        double om = r.uniform(-100, 100);
        for (double xi : {0.0, 1.0, -7.0, 63.0}) {
            cplx qp{}, qm{};
            const int M = 1 << 15;
            for (int p = 0; p < M; ++p) {
                double z = (p + 0.5) * 0.5 / M;
                qp += ssno_profile(rho, om, z, true) * std::polar(0.5 / M, -2 * std::numbers::pi * xi * z);
                qm += ssno_profile(rho, om, -z, false) * std::polar(0.5 / M, 2 * std::numbers::pi * xi * z);
            }
            CHECK(std::abs(qp - ssno_f_plus(rho, om, xi)) < 1e-6);
            CHECK(std::abs(qm - ssno_f_minus(rho, om, xi)) < 1e-6);
        }
    }
}

TEST_CASE("small-argument series is continuous") {
    const double om = 2 * std::numbers::pi * 3;
    cplx a = ssno_f_plus(1e-9, om, 3.0), b = ssno_f_plus(1e-5, om, 3.0);
    CHECK(std::abs(a - 0.5) < 1e-8);
    CHECK(std::abs(b - 0.5) < 1e-5);
    CHECK(std::abs(ssno_f_minus(1e-9, om, 3.0) - 0.5) < 1e-8);
}

TEST_CASE("z = 0 belongs to the forward part only") {
    CHECK(std::abs(ssno_profile(1, 0, 0.0, true) - 1.0) < 1e-15);
    CHECK(std::abs(ssno_profile(1, 0, 0.0, false)) == 0.0);
    CHECK(std::abs(ssno_profile(1, 0, -0.1, true)) == 0.0);
}

TEST_CASE("analytic SS-NO coefficients match quadrature of the spatial kernel") {
    for (int t = 0; t < 5; ++t) {
        SSNOKernel k = ssno_random(1, SSNOForm::Sum, 4, 2, 3, 300 + t);
        for (double xi : {0.0, 1.0, -1.0, 7.0, -63.0}) {
            Frequency f;
            f.xi = {long(xi), 0};
            Eigen::MatrixXcd a = ssno_fourier_coeff(k, f);
            CHECK((a - quad_coeff(k, xi, 1 << 14)).cwiseAbs().maxCoeff() < 1e-3);
        }
    }
}

TEST_CASE("2D forms: sum lives on the axes, product factorizes") {
    SSNOKernel s = ssno_random(2, SSNOForm::Sum, 3, 2, 2, 7);
    Frequency off;
    off.dim = 2;
    off.xi = {2, 3};
    CHECK(ssno_fourier_coeff(s, off).cwiseAbs().maxCoeff() == 0.0);
    Frequency on = off;
    on.xi = {2, 0};
    CHECK((ssno_fourier_coeff(s, on) - ssno_directional_coeff(s, 0, 2)).cwiseAbs().maxCoeff() < 1e-15);
    Frequency dc = off;
    dc.xi = {0, 0};
    CHECK((ssno_fourier_coeff(s, dc) - ssno_directional_coeff(s, 0, 0) - ssno_directional_coeff(s, 1, 0))
              .cwiseAbs()
              .maxCoeff() < 1e-14);

    SSNOKernel p = ssno_random(2, SSNOForm::Product, 3, 2, 2, 8);
    Eigen::MatrixXcd h = ssno_directional_coeff(p, 0, 2).cwiseProduct(ssno_directional_coeff(p, 1, 3));
    CHECK((ssno_fourier_coeff(p, off) - h).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("spatial evaluation checks its domain") {
    SSNOKernel k = ssno_random(1, SSNOForm::Sum, 2, 1, 1, 1);
    double z = 0.5;
    CHECK_THROWS_AS(ssno_spatial_eval(k, std::span<const double>(&z, 1)), DomainError);
    z = -0.5;
    CHECK_NOTHROW(ssno_spatial_eval(k, std::span<const double>(&z, 1)));
    double zz[2] = {0.1, 0.2};
    CHECK_THROWS_AS(ssno_spatial_eval(k, std::span<const double>(zz, 2)), StructuralError);
}

TEST_CASE("parameter validation") {
    SSNOKernel k = ssno_random(1, SSNOForm::Sum, 2, 1, 1, 1);
    k.rho[0] = 0;
    CHECK_THROWS_AS(k.validate(), DomainError);
    k = ssno_random(1, SSNOForm::Sum, 2, 1, 1, 1);
    k.c_plus.pop_back();
    CHECK_THROWS_AS(k.validate(), StructuralError);
    FNOKernel f = fno_random(1, 3, 2, 2, 5);
    CHECK_NOTHROW(f.validate());
    f.weights[0] += cplx(0, 1);
    CHECK_THROWS(f.validate());
}

TEST_CASE("FNO coefficients vanish beyond the band and evaluate to real values") {
    for (int d : {1, 2}) {
        FNOKernel f = fno_random(d, 4, 2, 3, 21);
        Frequency xi;
        xi.dim = d;
        xi.xi = {5, 0};
        CHECK(fno_fourier_coeff(f, xi).cwiseAbs().maxCoeff() == 0.0);
        xi.xi = {4, d == 2 ? -4 : 0};
        CHECK(fno_fourier_coeff(f, xi).cwiseAbs().maxCoeff() > 0.0);
        double z[2] = {0.13, -0.31};
        Eigen::MatrixXd v = fno_spatial_eval(f, std::span<const double>(z, d));
        Eigen::MatrixXcd direct = Eigen::MatrixXcd::Zero(2, 3);
        for (std::size_t b = 0; b < f.block_count(); ++b) {
            Frequency k = f.block_frequency(b);
            double ph = 2 * std::numbers::pi * (k.xi[0] * z[0] + (d == 2 ? k.xi[1] * z[1] : 0.0));
            direct += f.block(k) * std::polar(1.0, ph);
        }
        CHECK((direct.real() - v).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(direct.imag().cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("FNO embeds exactly into SS-NO") {
    FNOKernel f = fno_random(1, 3, 2, 2, 41);
    SSNOKernel s = fno_to_ssno_embedding(f);
    CHECK_NOTHROW(s.validate());
    for (long a = -6; a <= 6; ++a) {
        Frequency xi;
        xi.xi = {a, 0};
        CHECK((ssno_fourier_coeff(s, xi) - fno_fourier_coeff(f, xi)).cwiseAbs().maxCoeff() < 1e-6);
    }
    CHECK_THROWS(fno_to_ssno_embedding(fno_random(2, 2, 2, 2, 1)));
}

TEST_CASE("grid l2 norm respects the stated bound") {
    for (std::size_t n : {16u, 64u, 256u}) {
        GridNormCheck a = kernel_grid_l2(Kernel(ssno_random(1, SSNOForm::Sum, 8, 4, 4, n)), n);
        CHECK(a.holds);
        CHECK(a.measured <= a.rigorous_bound);
        GridNormCheck b = kernel_grid_l2(Kernel(fno_random(1, 4, 4, 4, n)), n);
        CHECK(b.holds);
        CHECK(b.measured <= b.rigorous_bound);
    }
    GridNormCheck c = kernel_grid_l2(Kernel(ssno_random(2, SSNOForm::Product, 4, 3, 3, 2)), 16);
    CHECK(c.measured <= c.rigorous_bound);
    GridNormCheck e = kernel_grid_l2(Kernel(ssno_random(2, SSNOForm::Sum, 4, 3, 3, 2)), 16);
    CHECK(e.measured <= e.rigorous_bound);
}

TEST_CASE("L1 bound dominates the integrated operator norm") {
    for (int t = 0; t < 5; ++t) {
        SSNOKernel k = ssno_random(1, SSNOForm::Sum, 6, 3, 3, 70 + t);
        const int M = 1 << 14;
        double integral = 0;
        for (int p = 0; p < M; ++p) {
            double z = -0.5 + (p + 0.5) / M;
            integral += spectral_norm(Eigen::MatrixXcd(ssno_spatial_eval(k, std::span<const double>(&z, 1)))) / M;
        }
        CHECK(integral <= ssno_l1_opnorm_bound(k) * (1 + 1e-9));
        CHECK(ssno_l1_opnorm_bound_printed(k) > 0);
    }
}

TEST_CASE("spectral regimes") {
    SSNOKernel s = ssno_random(1, SSNOForm::Sum, 16, 4, 4, 123);
    SpectralDecay d = spectral_decay_fit(Kernel(s), 64, 2048);
    CHECK(d.alpha_hat >= 0.8);
    CHECK(d.alpha_hat <= 1.2);
    CHECK_FALSE(d.band_limited);
    SpectralDecay f = spectral_decay_fit(Kernel(fno_random(1, 12, 2, 2, 1)), 1, 64);
    CHECK(f.band_limited);
    CHECK(f.cutoff == 12);

    // the table fit works on 1 + xi
    double xs[] = {1, 3, 7, 15}, ms[] = {0.5, 0.25, 0.125, 0.0625};
    SpectralDecay t = spectral_decay_fit_table(xs, ms);
    CHECK(t.alpha_hat == doctest::Approx(1.0));
    CHECK(t.r2 == doctest::Approx(1.0));
}

TEST_CASE("random SS-NO keeps C(K) of order one") {
    for (std::size_t K : {4u, 16u, 64u}) {
        SSNOKernel k = ssno_random(1, SSNOForm::Sum, K, 32, 32, 9);
        double c = ssno_c_constant(k);
        CHECK(c > 0);
        CHECK(c < 30);
    }
}

}  // TEST_SUITE
