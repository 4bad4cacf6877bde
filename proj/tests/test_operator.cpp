#include "doctest.h"
#include "helpers.hpp"

#include "noperr/linalg.hpp"

using namespace noperr;
using namespace testutil;

namespace {

// Re IDFT( K_hat(xi) v_hat(xi) ) with the analytic coefficient at every centered xi
GridField spectral_oracle(const Kernel& k, const GridField& v, std::size_t cutoff = 0) {
    SpectralField V = dft_forward(v);
    SpectralField W(v.dim(), v.n(), kernel_d_out(k));
    for (std::size_t f = 0; f < V.points(); ++f) {
        Frequency xi = Frequency::from_index(f, v.dim(), v.n());
        if (cutoff && xi.max_abs() >= long(cutoff)) continue;
        Eigen::MatrixXcd m = kernel_fourier_coeff(k, xi);
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c) W.at(f, r) += m(r, c) * V.at(f, c);
    }
    return dft_inverse_real_part(W);
}

KernelSamples spatial_samples(const SSNOKernel& k, std::size_t n) { return sample_kernel(Kernel(k), n); }

}  // namespace

TEST_SUITE("operator") {

TEST_CASE("activations") {
    CHECK(Activation::parse("relu")(-2) == 0.0);
    CHECK(Activation::parse("relu")(3) == 3.0);
    CHECK(Activation::parse("leaky_relu:0.2")(-1) == doctest::Approx(-0.2));
    CHECK(Activation::parse("gelu")(0) == 0.0);
    CHECK(Activation::parse("gelu")(1) == doctest::Approx(0.8413447460685429));
    CHECK(Activation::parse("identity")(-4) == -4.0);
    CHECK(Activation::parse("tanh")(0.5) == doctest::Approx(std::tanh(0.5)));
    CHECK(Activation::parse("leaky_relu:0.3").name() == "leaky_relu:0.3");
    CHECK_THROWS_AS(Activation::parse("swish"), DomainError);
}

TEST_CASE("convolution modes parse") {
    CHECK(ConvMode::parse("cutoff", 8).cutoff == 8);
    CHECK(ConvMode::parse("sampled").kind == ConvKind::SampledKernelDFT);
    CHECK_THROWS_AS(ConvMode::parse("cutoff"), DomainError);
    CHECK_THROWS_AS(ConvMode::parse("spline"), DomainError);
}

TEST_CASE("analytic SS-NO convolution equals the spectral oracle") {
    for (int d : {1, 2})
        for (SSNOForm form : {SSNOForm::Sum, SSNOForm::Product}) {
            if (d == 1 && form == SSNOForm::Product) continue;
            std::size_t n = d == 1 ? 32 : 16;
            Kernel k = ssno_random(d, form, 3, 2, 3, 5 + d);
            Layer l = make_layer(k, Activation::parse("identity"), 1);
            GridField v = random_field(d, n, 3, 8);
            GridField oracle = spectral_oracle(k, v);
            CHECK(max_abs_diff(LayerPlan(l, d, n, ConvMode::analytic()).convolve(v), oracle) < 1e-11);
            GridField oc = spectral_oracle(k, v, 4);
            CHECK(max_abs_diff(LayerPlan(l, d, n, ConvMode::analytic_cutoff(4)).convolve(v), oc) < 1e-11);
        }
}

TEST_CASE("sampled SS-NO convolution equals the brute-force grid sum") {
    for (int d : {1, 2})
        for (SSNOForm form : {SSNOForm::Sum, SSNOForm::Product}) {
            if (d == 1 && form == SSNOForm::Product) continue;
            std::size_t n = d == 1 ? 32 : 8;
            SSNOKernel k = ssno_random(d, form, 3, 2, 3, 15 + d);
            Layer l = make_layer(Kernel(k), Activation::parse("identity"), 2);
            GridField v = random_field(d, n, 3, 9);
            GridField slow = brute_convolve(spatial_samples(k, n), v);
            GridField fast = LayerPlan(l, d, n, ConvMode::sampled()).convolve(v);
            CHECK(max_abs_diff(fast, slow) < 1e-11 * std::max(1.0, max_abs(slow)));
        }
}

TEST_CASE("FNO: sampled and analytic agree once the band is resolved") {
    for (int d : {1, 2}) {
        FNOKernel f = fno_random(d, 3, 2, 2, 3);
        Layer l = make_layer(Kernel(f), Activation::parse("identity"), 3);
        GridField v = random_field(d, 16, 2, 10);
        GridField a = LayerPlan(l, d, 16, ConvMode::analytic()).convolve(v);
        GridField s = LayerPlan(l, d, 16, ConvMode::sampled()).convolve(v);
        CHECK(max_abs_diff(a, s) < 1e-12);
        CHECK(max_abs_diff(a, spectral_oracle(Kernel(f), v)) < 1e-12);
    }
}

TEST_CASE("FNO folds unresolved modes when sampled") {
    FNOKernel f = fno_random(1, 5, 1, 1, 4);
    Layer l = make_layer(Kernel(f), Activation::parse("identity"), 4);
    GridField v = random_field(1, 8, 1, 11);
    GridField slow = brute_convolve(sample_kernel(Kernel(f), 8), v);
    CHECK(max_abs_diff(LayerPlan(l, 1, 8, ConvMode::sampled()).convolve(v), slow) < 1e-12);
    CHECK_THROWS_AS(LayerPlan(l, 1, 8, ConvMode::analytic()), DomainError);
}

TEST_CASE("effective kernel op norms of the sampled mode are the sample op norms") {
    SSNOKernel k = ssno_random(1, SSNOForm::Sum, 4, 3, 2, 30);
    Layer l = make_layer(Kernel(k), Activation::parse("gelu"), 5);
    const std::size_t n = 32;
    auto norms = LayerPlan(l, 1, n, ConvMode::sampled()).kernel_opnorms();
    KernelSamples s = sample_kernel(Kernel(k), n);
    for (std::size_t p = 0; p < n; ++p) {
        Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(s.block(p), 3, 2);
        CHECK(norms[p] == doctest::Approx(spectral_norm(Eigen::MatrixXcd(m))).epsilon(1e-8));
    }
}

TEST_CASE("preactivation is affine") {
    Layer l = make_layer(Kernel(ssno_random(1, SSNOForm::Sum, 4, 3, 3, 31)), Activation::parse("gelu"), 6);
    LayerPlan p(l, 1, 64, ConvMode::sampled());
    GridField v = random_field(1, 64, 3, 1), x = random_field(1, 64, 3, 2);
    GridField lhs = p.preactivation(v + scaled(x, 0.3));
    GridField rhs = p.preactivation(v) + scaled(p.preactivation(x, false), 0.3);
    CHECK(max_abs_diff(lhs, rhs) < 1e-12);
    GridField out = p.apply(v), z = p.preactivation(v);
    for (std::size_t i = 0; i < out.values().size(); ++i) CHECK(out.values()[i] == l.act(z.values()[i]));
}

TEST_CASE("random model runs at every resolution") {
    Architecture a;
    a.depth = 2;
    a.channels = 8;
    a.modes = 4;
    OperatorModel m = model_random_init(a, 7);
    CHECK_NOTHROW(m.validate());
    for (std::size_t n : {16u, 64u, 256u}) {
        GridField in = random_field(1, n, 1, 3);
        StackOutput o = stack_apply(m, in, ConvMode::sampled(), true);
        CHECK(o.u.channels() == 1);
        CHECK(o.u.n() == n);
        REQUIRE(o.states);
        CHECK(o.states->size() == 3);
    }
    for (KernelKind kk : {KernelKind::FNO, KernelKind::SSNOProduct}) {
        Architecture b = a;
        b.dim = 2;
        b.kernel = kk;
        OperatorModel m2 = model_random_init(b, 1);
        CHECK(stack_apply(m2, random_field(2, 16, 1, 1), ConvMode::analytic(), false).u.n() == 16);
    }
}

TEST_CASE("model_random_init is deterministic") {
    Architecture a;
    a.channels = 4;
    OperatorModel m1 = model_random_init(a, 3), m2 = model_random_init(a, 3), m3 = model_random_init(a, 4);
    GridField in = random_field(1, 32, 1, 5);
    GridField u1 = stack_apply(m1, in, ConvMode::sampled(), false).u;
    CHECK(max_abs_diff(u1, stack_apply(m2, in, ConvMode::sampled(), false).u) == 0.0);
    CHECK(max_abs_diff(u1, stack_apply(m3, in, ConvMode::sampled(), false).u) > 0.0);
}

TEST_CASE("shape errors are structural") {
    Architecture a;
    a.channels = 4;
    OperatorModel m = model_random_init(a, 3);
    CHECK_THROWS_AS(stack_apply(m, random_field(1, 32, 2, 1), ConvMode::sampled(), false), StructuralError);
    LayerPlan p(m.layers[0], 1, 32, ConvMode::sampled());
    CHECK_THROWS_AS(p.apply(random_field(1, 16, 4, 1)), StructuralError);
    OperatorModel bad = m;
    bad.layers[1].W.resize(3, 4);
    CHECK_THROWS_AS(bad.validate(), StructuralError);
    CHECK_THROWS_AS(LayerPlan(m.layers[0], 1, 32, ConvMode::analytic_cutoff(17)), DomainError);
}

TEST_CASE("kernel kind names") {
    CHECK(parse_kernel_kind("ssno-sum") == KernelKind::SSNOSum);
    CHECK(parse_kernel_kind("ssno-product") == KernelKind::SSNOProduct);
    CHECK(parse_kernel_kind("fno") == KernelKind::FNO);
    CHECK_THROWS_AS(parse_kernel_kind("cnn"), DomainError);
}

}  // TEST_SUITE
