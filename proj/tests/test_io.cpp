#include "doctest.h"
#include "helpers.hpp"

#include "noperr/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace noperr;
using namespace testutil;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("noperr_test_" + name)).string();
}

OperatorModel mixed_model() {
    Architecture a;
    a.channels = 5;
    a.depth = 2;
    a.modes = 3;
    OperatorModel m = model_random_init(a, 12);
    m.layers[1].kernel = fno_random(1, 3, 5, 5, 9);
    m.layers[1].act = Activation::parse("leaky_relu:0.2");
    auto& k = std::get<SSNOKernel>(m.layers[0].kernel);
    k.phase[1] = 0.7;
    return m;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("save then load is the identity") {
    OperatorModel m = mixed_model();
    std::string p = temp_path("roundtrip.json");
    model_save(m, p);
    OperatorModel back = model_load(p);
    std::remove(p.c_str());
    CHECK(model_to_json(back) == model_to_json(m));
    GridField in = random_field(1, 32, 1, 4);
    CHECK(max_abs_diff(stack_apply(m, in, ConvMode::analytic(), false).u,
                       stack_apply(back, in, ConvMode::analytic(), false).u) == 0.0);
}

TEST_CASE("2D kernels round trip") {
    for (KernelKind kk : {KernelKind::FNO, KernelKind::SSNOProduct, KernelKind::SSNOSum}) {
        Architecture a;
        a.dim = 2;
        a.channels = 3;
        a.depth = 1;
        a.modes = 2;
        a.kernel = kk;
        OperatorModel m = model_random_init(a, 2);
        CHECK(model_to_json(model_from_json(model_to_json(m))) == model_to_json(m));
    }
}

TEST_CASE("field round trip") {
    GridField f = random_field(2, 4, 3, 1);
    CHECK(max_abs_diff(field_from_json(field_to_json(f)), f) == 0.0);
}

TEST_CASE("malformed files give explicit errors") {
    json j = model_to_json(mixed_model());
    json bad = j;
    bad["version"] = 99;
    CHECK_THROWS_WITH_AS(model_from_json(bad), doctest::Contains("version 99"), ModelLoadError);
    bad = j;
    bad["layers"][1]["W"]["shape"] = {4, 5};
    CHECK_THROWS_WITH_AS(model_from_json(bad), doctest::Contains("layers[1].W"), ModelLoadError);
    bad = j;
    bad["layers"][0].erase("kernel");
    CHECK_THROWS_WITH_AS(model_from_json(bad), doctest::Contains("kernel"), ModelLoadError);
    bad = j;
    bad["layers"][0]["kernel"]["type"] = "cnn";
    CHECK_THROWS_AS(model_from_json(bad), ModelLoadError);

    std::string p = temp_path("garbage.json");
    {
        std::ofstream out(p);
        out << "{\"version\": 1, ";
    }
    CHECK_THROWS_AS(model_load(p), ModelLoadError);
    std::remove(p.c_str());
    CHECK_THROWS_WITH_AS(model_load("/nonexistent/model.json"), doctest::Contains("/nonexistent/model.json"),
                         ModelLoadError);
}

TEST_CASE("externally generated fixture loads and matches its NumPy forward pass") {
    const std::string path = std::string(NOPERR_SOURCE_DIR) + "/config/fixture_model.json";
    OperatorModel m = model_load(path);
    CHECK(m.layers.size() == 2);
    std::ifstream in(path);
    json j = json::parse(in);
    GridField a = field_from_json(j["check"]["input"]);
    GridField expect = field_from_json(j["check"]["output"]);
    GridField u = stack_apply(m, a, ConvMode::analytic(), false).u;
    CHECK(max_abs_diff(u, expect) < 1e-10);
}

}  // TEST_SUITE
