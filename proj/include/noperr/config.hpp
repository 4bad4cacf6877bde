#pragma once

#include "noperr/experiments.hpp"
#include "noperr/io.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace noperr {

// carries "file:line:col: path: message"
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// maps JSON pointer paths ("/sweep/samples") to the line and column where the
// value starts in the source text
class JsonLocator {
public:
    explicit JsonLocator(const std::string& text);
    std::pair<std::size_t, std::size_t> find(const std::string& pointer) const;  // (0,0) if unknown

private:
    std::map<std::string, std::pair<std::size_t, std::size_t>> pos_;
};

// line/column of a byte offset (1-based)
std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t offset);

inline const std::vector<std::string> kCommands{"sweep", "stability", "depth", "nyquist",
                                                "iss",   "bounds",    "grf-check", "kernel-check"};

// samples 0..samples-1 of the sweep input stream calibrate C_{d,s} for iss.s
struct IssCalibration {
    std::size_t samples = 20;
};

struct RunConfig {
    std::string experiment;
    std::string name;
    std::uint64_t seed = kDefaultSeed;
    std::optional<std::uint64_t> model_seed;  // follows seed when unset
    unsigned threads = 0;
    std::string path;
    std::optional<std::string> model_file;  // resolved against the config directory
    Architecture arch;
    ConvMode mode = ConvMode::analytic_cutoff(16);
    InputSpec input;

    SweepConfig sweep;
    StabilityConfig stability;
    std::vector<std::size_t> depths{1, 2, 4, 8, 16, 32};
    NyquistConfig nyquist;
    double iss_s = 2.0;
    std::vector<double> iss_deltas{0.0, 1e-3, 1e-2, 1e-1};
    std::optional<double> iss_c_ds;  // calibrated when unset
    IssCalibration iss_calibration;
    std::size_t bounds_n = 256;
    double bounds_s = 2.0;
    GrfCheckConfig grf;
    KernelCheckConfig kernel_check;

    json raw;

    // push seed, threads, model and shared sections into the experiment configs
    void finalize();
    std::uint64_t effective_model_seed() const { return model_seed.value_or(seed); }
};

RunConfig parse_run_config(const std::string& text, const std::string& path = "<config>");
RunConfig load_run_config(const std::string& path);

OperatorModel build_model(const RunConfig& cfg);

}  // namespace noperr
