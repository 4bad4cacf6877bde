#include "doctest.h"
#include "helpers.hpp"

#include "noperr/bounds.hpp"
#include "noperr/experiments.hpp"
#include "noperr/linalg.hpp"

using namespace noperr;
using namespace testutil;

namespace {

// identity-like layer: W = I, zero kernel amplitude, identity activation
OperatorModel identity_stack(std::size_t H, std::size_t T, double w_scale) {
    OperatorModel m;
    m.dim = 1;
    m.lift = PointwiseMlp::identity(H);
    m.project = PointwiseMlp::identity(H);
    for (std::size_t t = 0; t < T; ++t) {
        Layer l;
        l.W = w_scale * Eigen::MatrixXd::Identity(H, H);
        l.b = Eigen::VectorXd::Zero(H);
        SSNOKernel k = ssno_random(1, SSNOForm::Sum, 2, H, H, 1);
        for (auto& c : k.c) c = 0;
        l.kernel = k;
        l.act = Activation::parse("identity");
        m.layers.push_back(l);
    }
    return m;
}

}  // namespace

TEST_SUITE("bounds") {

TEST_CASE("log-log fit recovers exact power laws") {
    std::vector<double> x{2, 4, 8, 16, 32}, y;
    for (double v : x) y.push_back(3.0 * std::pow(v, -1.5));
    LogLogFit f = loglog_fit(x, y);
    CHECK(f.slope == doctest::Approx(-1.5).epsilon(1e-12));
    CHECK(std::exp(f.intercept) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(f.r2 == doctest::Approx(1.0));
    CHECK_THROWS_AS(loglog_fit(std::vector<double>{1, 2}, std::vector<double>{1, 2}), DomainError);
    CHECK_THROWS_AS(loglog_fit(std::vector<double>{1, 2, 3}, std::vector<double>{1, 0, 2}), DomainError);
}

TEST_CASE("linear fit matches closed-form OLS") {
    std::vector<double> x{0, 1, 2, 3, 4}, y{1.0, 2.9, 5.2, 7.1, 8.8};
    // closed form: slope = cov/var
    double mx = 2, my = (1.0 + 2.9 + 5.2 + 7.1 + 8.8) / 5, sxy = 0, sxx = 0, syy = 0;
    for (int i = 0; i < 5; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    LogLogFit f = linear_fit(x, y);
    CHECK(f.slope == doctest::Approx(sxy / sxx));
    CHECK(f.intercept == doctest::Approx(my - sxy / sxx * mx));
    CHECK(f.r2 == doctest::Approx(sxy * sxy / (sxx * syy)));
}

TEST_CASE("activation Lipschitz constants") {
    CHECK(activation_lipschitz(Activation::parse("relu")) == 1.0);
    CHECK(activation_lipschitz(Activation::parse("leaky_relu:0.1")) == 1.0);
    CHECK(activation_lipschitz(Activation::parse("gelu")) == doctest::Approx(1.1289).epsilon(1e-4));
    CHECK(activation_lipschitz(Activation::parse("tanh")) == doctest::Approx(1.0));
}

TEST_CASE("bound arithmetic") {
    CHECK(discretization_exponent(Regime::Cutoff, 1, 2, 0) == -1.5);
    CHECK(discretization_exponent(Regime::PolynomialDecay, 1, 4, 2) == -1.0);
    CHECK(discretization_bound_value(1.0, 2.0, -1.0, 4, 3) == doctest::Approx(2.0 * 3 / 4));
    CHECK(discretization_bound_value(2.0, 1.0, 0.0, 4, 3) == doctest::Approx(7.0));
    BoundInputs in;
    in.A = 1.5;
    in.B = 2;
    in.N = 64;
    in.T = 2;
    in.s = 1;
    BoundReport r = discretization_bound(in);
    CHECK(r.beta == -0.5);
    CHECK(r.bound_value == doctest::Approx(2.5 * 2 / 8.0));
    CHECK(iss_total_bound(3.0, 0.1, 1.0) == doctest::Approx(1.3));
    CHECK(iss_total_bound(3.0, 0.2, 1.0) > iss_total_bound(3.0, 0.1, 1.0));
    CHECK_THROWS_AS(iss_total_bound(3.0, -0.1, 1.0), DomainError);
}

TEST_CASE("non-smooth activations cap the smoothness") {
    Architecture a;
    a.channels = 4;
    a.act = Activation::parse("relu");
    bool capped = false;
    CHECK(effective_smoothness(model_random_init(a, 1), 4.0, &capped) == 1.49);
    CHECK(capped);
    a.act = Activation::parse("gelu");
    CHECK(effective_smoothness(model_random_init(a, 1), 4.0, &capped) == 4.0);
    CHECK_FALSE(capped);
}

TEST_CASE("constant A by hand") {
    Architecture a;
    a.channels = 3;
    a.depth = 1;
    a.modes = 2;
    OperatorModel m = model_random_init(a, 5);
    const auto& k = std::get<SSNOKernel>(m.layers[0].kernel);
    double expect = activation_lipschitz(m.layers[0].act) *
                    (Eigen::JacobiSVD<Eigen::MatrixXd>(m.layers[0].W).singularValues()(0) + 2 * 1 * ssno_c_constant(k));
    CHECK(constant_A(m) == doctest::Approx(expect).epsilon(1e-8));
}

TEST_CASE("stack Lipschitz of an identity stack is one") {
    OperatorModel m = identity_stack(3, 3, 1.0);
    StackPlan p(m, 32, ConvMode::sampled());
    CHECK(discrete_stack_lipschitz(p).value == doctest::Approx(1.0));
    CHECK(estimate_empirical_lipschitz(p, 10, 1, 2.0, {}) == doctest::Approx(1.0).epsilon(1e-10));
    OperatorModel z = identity_stack(3, 2, 0.0);
    StackPlan pz(z, 32, ConvMode::sampled());
    CHECK(estimate_empirical_lipschitz(pz, 10, 1, 2.0, {}) == 0.0);
}

TEST_CASE("stack Lipschitz dominates empirical ratios") {
    for (ConvMode mode : {ConvMode::sampled(), ConvMode::analytic(), ConvMode::analytic_cutoff(8)}) {
        Architecture a;
        a.channels = 6;
        a.depth = 3;
        a.modes = 4;
        OperatorModel m = model_random_init(a, 77);
        StackPlan p(m, 64, mode);
        StackLipschitz l = discrete_stack_lipschitz(p);
        CHECK(estimate_empirical_lipschitz(p, 30, 3, 1.0, {}) <= l.value);
        for (std::size_t t = 0; t < 3; ++t) CHECK(l.young[t] <= l.l2_normalized[t] * (1 + 1e-12));
        CHECK(continuous_stack_lipschitz(m) > 0);
    }
}

TEST_CASE("bound report fields") {
    Architecture a;
    a.channels = 4;
    a.depth = 2;
    OperatorModel m = model_random_init(a, 3);
    GridField in = random_field(1, 256, 1, 9);
    std::vector<GridField> st;
    StackPlan(m, 256, ConvMode::analytic_cutoff(16)).apply(in, &st);
    BoundReport r = make_bound_report(m, st, 64, 2.0, Regime::Cutoff, 16);
    CHECK(r.T == 2);
    CHECK(r.beta == -1.5);
    CHECK(r.A == doctest::Approx(constant_A(m)));
    CHECK(r.B > 0);
    CHECK(r.bound_value == doctest::Approx(discretization_bound_value(r.A, r.B, r.beta, 64, 2)));
    BoundReport p = make_bound_report(m, st, 64, 2.0, Regime::PolynomialDecay, 16, 1.5);
    CHECK(p.beta == -0.5);
    CHECK_THROWS_AS(make_bound_report(m, st, 64, 2.0, Regime::PolynomialDecay, 16, 0.5), DomainError);
    std::vector<GridField> few(st.begin(), st.begin() + 1);
    CHECK_THROWS_AS(constant_B_cutoff(m, few, 2.0, 16), StructuralError);
}

TEST_CASE("error decomposition recursion and aliasing bound") {
    for (ConvMode mode : {ConvMode::sampled(), ConvMode::analytic_cutoff(8), ConvMode::analytic()}) {
        Architecture a;
        a.channels = 6;
        a.depth = 3;
        a.modes = 4;
        OperatorModel m = model_random_init(a, 19);
        GrfSpec g;
        g.n = 512;
        g.s = 1.5;
        g.seed = 4;
        g.normalize = true;
        auto rows = error_decomposition(m, sample_grf(g), 64, mode);
        CHECK(rows.size() == 3);
        CHECK(rows[0].e0 == 0.0);
        for (const auto& r : rows) {
            CHECK(r.e0_next <= r.recursion_rhs * (1 + 1e-9) + 1e-13);
            CHECK(r.e2 <= r.e2_bound * (1 + 1e-9) + 1e-13);
        }
    }
}

}  // TEST_SUITE
