#include "noperr/random_fields.hpp"

#include "noperr/bounds.hpp"
#include "noperr/rng.hpp"

#include <cmath>

namespace noperr {

namespace {

bool self_conjugate(const Frequency& xi, std::size_t n) {
    for (int i = 0; i < xi.dim; ++i)
        if (xi.xi[i] != 0 && xi.xi[i] != -static_cast<long>(n / 2)) return false;
    return true;
}

}  // namespace

SpectralField sample_grf_spectrum(const GrfSpec& spec) {
    check_grid_shape(spec.dim, spec.n);
    if (!(spec.eps > 0)) throw DomainError("GRF regularization eps must be > 0");
    if (!(spec.s > 0)) throw DomainError("GRF smoothness must be > 0");
    const double alpha = spec.alpha();
    const double power = spec.convention == GrfConvention::Variance ? alpha / 2 : alpha;
    SpectralField F(spec.dim, spec.n, spec.channels);
    const std::size_t P = F.points();
    for (std::size_t f = 1; f < P; ++f) {
        Frequency xi = Frequency::from_index(f, spec.dim, spec.n);
        Frequency neg = xi;
        for (int i = 0; i < xi.dim; ++i) neg.xi[i] = -xi.xi[i];
        std::size_t g = neg.index(spec.n);
        if (g < f) continue;  // filled from its partner
        double var = std::pow(xi.norm() * xi.norm() + spec.eps, -power);
        for (std::size_t c = 0; c < spec.channels; ++c) {
            // keyed by (seed, channel, canonical frequency index)
            std::uint64_t ctr = 2 * f;
            if (self_conjugate(xi, spec.n)) {
                F.at(f, c) = cplx(std::sqrt(var) * normal_at(spec.seed, c, ctr), 0.0);
            } else {
                double sd = std::sqrt(var / 2);
                cplx z(sd * normal_at(spec.seed, c, ctr), sd * normal_at(spec.seed, c, ctr + 1));
                F.at(f, c) = z;
                F.at(g, c) = std::conj(z);
            }
        }
    }
    if (spec.normalize) {
        // unit normalized L2 norm, per channel
        for (std::size_t c = 0; c < spec.channels; ++c) {
            double e = 0;
            for (std::size_t f = 0; f < P; ++f) e += std::norm(F.at(f, c));
            double scale = e > 0 ? 1.0 / std::sqrt(e) : 0.0;
            for (std::size_t f = 0; f < P; ++f) F.at(f, c) *= scale;
        }
    }
    return F;
}

GridField sample_grf(const GrfSpec& spec) { return dft_inverse(sample_grf_spectrum(spec)); }

std::vector<double> shell_energy(const SpectralField& F, std::vector<std::size_t>* counts) {
    std::size_t max_shell = static_cast<std::size_t>(std::ceil(F.n() / 2.0 * std::sqrt(double(F.dim())))) + 1;
    std::vector<double> e(max_shell, 0.0);
    std::vector<std::size_t> cnt(max_shell, 0);
    for (std::size_t f = 0; f < F.points(); ++f) {
        Frequency xi = Frequency::from_index(f, F.dim(), F.n());
        std::size_t r = static_cast<std::size_t>(std::lround(xi.norm()));
        for (std::size_t c = 0; c < F.channels(); ++c) {
            e[r] += std::norm(F.at(f, c));
            ++cnt[r];
        }
    }
    for (std::size_t r = 0; r < max_shell; ++r)
        if (cnt[r]) e[r] /= double(cnt[r]);
    if (counts) *counts = cnt;
    return e;
}

DecayFit measured_decay_exponent(const SpectralField& F, double xi_min, double xi_max) {
    if (xi_min < 1 || xi_max > F.n() / 2.0 || xi_max < xi_min)
        throw DomainError("decay window must satisfy 1 <= xi_min <= xi_max <= N/2");
    std::vector<std::size_t> cnt;
    auto e = shell_energy(F, &cnt);
    std::vector<double> x, y;
    for (std::size_t r = 0; r < e.size(); ++r) {
        if (r < xi_min || r > xi_max || cnt[r] == 0 || !(e[r] > 0)) continue;
        x.push_back(1.0 + double(r));
        y.push_back(e[r]);
    }
    if (x.size() < 4) throw DomainError("decay window holds fewer than 4 shells");
    LogLogFit fit = loglog_fit(x, y);
    return {-fit.slope, fit.r2, x.size()};
}

DecayFit measured_decay_exponent(const GridField& f, double xi_min, double xi_max) {
    return measured_decay_exponent(dft_forward(f), xi_min, xi_max);
}

}  // namespace noperr
