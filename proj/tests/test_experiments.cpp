#include "doctest.h"
#include "helpers.hpp"

#include "noperr/experiments.hpp"
#include "noperr/records.hpp"

#include <sstream>

using namespace noperr;
using namespace testutil;

namespace {

SweepConfig small_sweep() {
    SweepConfig c;
    c.arch.channels = 6;
    c.arch.depth = 2;
    c.arch.modes = 4;
    c.n_full = 256;
    c.factors = {2, 4, 8};
    c.smoothness = {1, 2};
    c.samples = 4;
    c.mode = ConvMode::analytic_cutoff(4);
    c.threads = 1;
    return c;
}

std::string sweep_csv(const SweepConfig& c) {
    std::ostringstream os;
    write_discretization_csv(os, run_discretization_sweep(c));
    return os.str();
}

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("sweep is deterministic and thread independent") {
    SweepConfig c = small_sweep();
    std::string a = sweep_csv(c);
    CHECK(a == sweep_csv(c));
    c.threads = 4;
    CHECK(a == sweep_csv(c));
    c.seed += 1;
    CHECK(a != sweep_csv(c));
    CHECK(a.rfind("experiment,seed,s,activation,N,mean_rel_err,std_rel_err,n_samples\n", 0) == 0);
    CHECK(std::count(a.begin(), a.end(), '\n') == 1 + 2 * 3);
}

TEST_CASE("sweep curve contents") {
    SweepConfig c = small_sweep();
    auto curves = run_discretization_sweep(c);
    REQUIRE(curves.size() == 2);
    for (const auto& cv : curves) {
        REQUIRE(cv.points.size() == 3);
        CHECK(cv.points[0].N == 128);
        for (const auto& p : cv.points) {
            CHECK(p.rel.size() == 4);
            CHECK(p.mean_rel > 0);
            CHECK(p.mean_bound > 0);
        }
        CHECK(cv.activation == "gelu");
        CHECK(cv.bound.T == 2);
    }
    double cds = calibrate_cds(curves);
    CHECK(cds > 0);
    for (const auto& cv : curves)
        for (const auto& p : cv.points)
            for (std::size_t i = 0; i < p.abs.size(); ++i) CHECK(p.abs[i] <= cds * p.bound[i] * (1 + 1e-12));
}

TEST_CASE("lifted metric") {
    SweepConfig c = small_sweep();
    c.metric = ErrorMetric::Lifted;
    c.smoothness = {2};
    for (LiftMethod l : {LiftMethod::Trigonometric, LiftMethod::Nearest, LiftMethod::Linear}) {
        c.lift = l;
        auto cv = run_discretization_sweep(c);
        CHECK(cv[0].points[0].mean_rel > 0);
    }
}

TEST_CASE("calibration examples") {
    ErrorCurve c;
    CurvePoint p;
    p.abs = {0.5};
    p.bound = {1.0};
    c.points = {p};
    CHECK(calibrate_cds({c}) <= 1.0);
    c.points[0].abs = {2.5};
    CHECK(calibrate_cds({c}) == doctest::Approx(2.5));
}

TEST_CASE("lifting helpers") {
    GridField f(1, 4, 1, {0, 1, 2, 3});
    GridField n = lift_to(f, 8, LiftMethod::Nearest);
    GridField l = lift_to(f, 8, LiftMethod::Linear);
    CHECK(n.at(2, 0) == 1.0);
    CHECK(l.at(3, 0) == doctest::Approx(1.5));
    CHECK(l.at(7, 0) == doctest::Approx(1.5));  // wraps from 3 back to 0
    CHECK(parse_metric("lifted") == ErrorMetric::Lifted);
    CHECK(parse_lift("linear") == LiftMethod::Linear);
    CHECK_THROWS_AS(parse_lift("cubic"), DomainError);
}

TEST_CASE("sweep config validation") {
    SweepConfig c = small_sweep();
    c.factors = {3};
    CHECK_THROWS_AS(c.validate(), DomainError);
    c = small_sweep();
    c.n_full = 100;
    CHECK_THROWS(c.validate());
    c = small_sweep();
    c.samples = 0;
    CHECK_THROWS_AS(c.validate(), DomainError);
}

TEST_CASE("stability sweep basics") {
    StabilityConfig c;
    c.arch.channels = 4;
    c.arch.modes = 4;
    c.n = 128;
    c.inputs = 3;
    c.directions = 3;
    c.lipschitz_pairs = 10;
    c.epsilons = {0.0, 0.1, 0.2, 0.4};
    c.threads = 2;
    auto cv = run_stability_sweep(c);
    CHECK(cv.mean[0] == 0.0);
    CHECK(cv.T == 1);
    for (std::size_t k = 1; k < 4; ++k) {
        CHECK(cv.mean[k] > 0);
        CHECK(cv.max_ratio[k] <= cv.c_nt);
    }
    CHECK(cv.empirical_lipschitz <= cv.c_nt);
    c.threads = 1;
    auto again = run_stability_sweep(c);
    CHECK(again.mean == cv.mean);
    CHECK(again.std == cv.std);

    // the affine shortcut equals plain forward passes
    OperatorModel m = model_random_init(c.arch, c.model_seed);
    StackPlan p(m, c.n, c.mode);
    double total = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        GridField v = state_input(1, c.n, 4, c.s, c.input, derive_seed(c.seed, 0x1000 + i));
        for (std::size_t j = 0; j < 3; ++j) {
            GridField xi = unit_direction(1, c.n, 4, derive_seed(c.seed, 0x200000 + i * 3 + j));
            total += grid_l2_distance(p.run_layers(v + scaled(xi, 0.4)), p.run_layers(v));
        }
    }
    CHECK(cv.mean[3] == doctest::Approx(total / 9).epsilon(1e-9));
}

TEST_CASE("depth sweep with T = 1 reduces to the stability sweep") {
    DepthConfig d;
    d.base.arch.channels = 4;
    d.base.arch.modes = 4;
    d.base.n = 64;
    d.base.inputs = 2;
    d.base.directions = 2;
    d.base.lipschitz_pairs = 5;
    d.base.epsilons = {0.0, 0.2, 0.8};
    d.base.threads = 1;
    d.depths = {1, 2};
    DepthResult r = run_depth_sweep(d);
    auto single = run_stability_sweep(d.base);
    CHECK(r.curves[0].mean == single.mean);
    CHECK(r.table.size() == 2);
    CHECK(r.table[1].T == 2);
    for (const auto& row : r.table) {
        CHECK(row.empirical_lipschitz <= row.c_nt);
        CHECK(std::isfinite(row.mean_err_max_eps));
    }
    std::ostringstream os;
    write_stability_csv(os, r.curves);
    CHECK(os.str().rfind("experiment,seed,T,epsilon,mean_err,std_err\n", 0) == 0);
}

TEST_CASE("nyquist stress shapes") {
    NyquistConfig c;
    c.arch.channels = 4;
    c.arch.depth = 1;
    c.arch.modes = 4;
    c.ks = {2, 16};
    c.Ls = {8, 16, 32, 64};
    c.n_ref = 256;
    c.samples = 2;
    c.threads = 1;
    auto curves = run_nyquist_stress(c);
    REQUIRE(curves.size() == 2);
    CHECK(curves[0].nyquist_L == 4);
    CHECK(curves[0].fit.points == 4);
    CHECK(curves[1].fit.points == 0);  // only L = 32, 64 reach 2k: too few for a fit
    std::ostringstream os;
    write_nyquist_csv(os, curves);
    const std::string csv = os.str();
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 8);
    c.Ls = {256};
    CHECK_THROWS_AS(c.validate(), DomainError);
}

TEST_CASE("ISS check") {
    IssConfig c;
    c.sweep = small_sweep();
    c.sweep.samples = 2;
    c.sweep.factors = {4};
    c.s = 2.0;
    c.sweep.c_ds = 1e6;
    IssReport r = run_iss_check(c);
    REQUIRE(r.rows.size() == 2 * 4);
    // delta = 0 is the plain discretization error of the sweep
    SweepConfig sc = c.sweep;
    sc.smoothness = {2.0};
    auto curve = run_discretization_sweep(sc);
    CHECK(r.rows[0].delta == 0.0);
    CHECK(r.rows[0].measured == doctest::Approx(curve[0].points[0].abs[0]).epsilon(1e-12));
    for (std::size_t i = 1; i < 4; ++i) CHECK(r.rows[i].bound > r.rows[i - 1].bound);
    CHECK(r.all_dominated);
    c.deltas = {-1};
    CHECK_THROWS_AS(run_iss_check(c), DomainError);
}

}  // TEST_SUITE
