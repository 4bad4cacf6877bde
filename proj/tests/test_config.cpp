#include "doctest.h"

#include "noperr/config.hpp"

#include <string>

using namespace noperr;

namespace {

std::string error_of(const std::string& text) {
    try {
        parse_run_config(text, "cfg.json");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("locator reports the line of every value") {
    std::string t = "{\n  \"a\": 1,\n  \"b\": {\n    \"c\": [10,\n      20]\n  }\n}\n";
    JsonLocator loc(t);
    CHECK(loc.find("/a") == std::pair<std::size_t, std::size_t>{2, 8});
    CHECK(loc.find("/b/c").first == 4);
    CHECK(loc.find("/b/c/1") == std::pair<std::size_t, std::size_t>{5, 7});
    // unknown paths fall back to the nearest parent
    CHECK(loc.find("/b/zzz").first == 3);
}

TEST_CASE("defaults and shared sections reach every experiment") {
    RunConfig c = parse_run_config(R"({"experiment": "sweep", "seed": 11, "threads": 2,
        "model": {"channels": 8, "modes": 4, "activation": "relu"},
        "conv": {"mode": "cutoff", "cutoff": 4},
        "input": {"convention": "amplitude"},
        "sweep": {"n_full": 1024, "samples": 3}})");
    CHECK(c.name == "sweep");
    CHECK(c.sweep.seed == 11);
    CHECK(c.sweep.model_seed == 11);
    CHECK(c.sweep.threads == 2);
    CHECK(c.sweep.arch.channels == 8);
    CHECK(c.sweep.arch.act.kind == ActKind::ReLU);
    CHECK(c.sweep.mode.cutoff == 4);
    CHECK(c.sweep.input.convention == GrfConvention::Amplitude);
    CHECK(c.sweep.factors.size() == 7);

    RunConfig s = parse_run_config(R"({"experiment": "stability", "model": {"seed": 3},
        "stability": {"eps_max": 0.1, "eps_step": 0.05}})");
    CHECK(s.stability.model_seed == 3);
    CHECK(s.stability.seed == kDefaultSeed);
    CHECK(s.stability.arch.depth == 1);
    CHECK(s.stability.mode.kind == ConvKind::SampledKernelDFT);
    CHECK(s.stability.epsilons.size() == 3);
}

TEST_CASE("schema violations carry line, column and path") {
    std::string e = error_of("{\n  \"experiment\": \"sweep\",\n  \"sweep\": {\"samples\": \"x\"}\n}");
    CHECK(e.find("cfg.json:3:24: /sweep/samples: expected an integer") != std::string::npos);
    e = error_of("{\n  \"experiment\": \"sweep\",\n  \"colour\": 1\n}");
    CHECK(e.find("cfg.json:3:13: /colour: unknown key") != std::string::npos);
    e = error_of("{\"experiment\": \"dance\"}");
    CHECK(e.find("/experiment: unknown experiment") != std::string::npos);
    e = error_of("{\"sweep\": {}}");
    CHECK(e.find("missing required key 'experiment'") != std::string::npos);
    e = error_of("{\n \"experiment\": \"sweep\",\n \"model\": {\"kernel\": \"wavelet\"}\n}");
    CHECK(e.find(":3:") != std::string::npos);
    CHECK(e.find("/model/kernel") != std::string::npos);
    e = error_of("{\"experiment\": \"sweep\", \"sweep\": {\"samples\": -1}}");
    CHECK(e.find("non-negative") != std::string::npos);
    e = error_of("{\"experiment\": \"sweep\",\n\"sweep\": {\"factors\": [3]}}");
    CHECK(e.find("/sweep") != std::string::npos);
    e = error_of("{\"experiment\": \"sweep\",\n \"model\": {\"file\": \"m.json\", \"depth\": 2}}");
    CHECK(e.find("cannot be combined") != std::string::npos);
}

TEST_CASE("malformed JSON is reported with a position") {
    std::string e = error_of("{\n  \"experiment\": \"sweep\",\n}");
    CHECK(e.find("cfg.json:3:") != std::string::npos);
    CHECK(e.find("invalid JSON") != std::string::npos);
}

TEST_CASE("model files resolve against the config directory") {
    RunConfig c = parse_run_config(R"({"experiment": "bounds", "model": {"file": "m.json"}})", "/tmp/x/run.json");
    REQUIRE(c.model_file);
    CHECK(*c.model_file == "/tmp/x/m.json");
}

TEST_CASE("shipped configs parse") {
    for (const char* f : {"sweep1d", "sweep1d_full", "sweep1d_relu", "sweep_model_file", "stability", "stability_small",
                          "depth", "nyquist", "iss", "grf_check", "kernel_check", "bounds"}) {
        CAPTURE(f);
        CHECK_NOTHROW(load_run_config(std::string(NOPERR_SOURCE_DIR) + "/config/" + f + ".json"));
    }
}

}  // TEST_SUITE
