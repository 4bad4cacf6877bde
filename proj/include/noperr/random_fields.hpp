#pragma once

#include "noperr/grid.hpp"

#include <cstdint>
#include <vector>

namespace noperr {

// How the power law enters the coefficient variance.
//   Variance:  E|u_hat(k)|^2 ~ (|k|^2 + eps)^(-alpha/2)   (default)
//   Amplitude: E|u_hat(k)|^2 ~ (|k|^2 + eps)^(-alpha), i.e. |u_hat| ~ that power
enum class GrfConvention { Variance, Amplitude };

struct GrfSpec {
    int dim = 1;
    std::size_t n = 256;
    double s = 2.0;  // target smoothness, alpha = s + d/2
    double eps = 1.0;
    std::uint64_t seed = 0;
    std::size_t channels = 1;
    bool normalize = false;  // rescale to unit normalized L2 norm
    GrfConvention convention = GrfConvention::Variance;

    double alpha() const { return s + 0.5 * dim; }
};

SpectralField sample_grf_spectrum(const GrfSpec& spec);
GridField sample_grf(const GrfSpec& spec);

struct DecayFit {
    double alpha_hat = 0;
    double r2 = 0;
    std::size_t shells = 0;
};

// radial shell averages of |f_hat|^2 (channels pooled); shell r = round(|xi|)
std::vector<double> shell_energy(const SpectralField& F, std::vector<std::size_t>* counts = nullptr);
DecayFit measured_decay_exponent(const GridField& f, double xi_min, double xi_max);
DecayFit measured_decay_exponent(const SpectralField& F, double xi_min, double xi_max);

}  // namespace noperr
