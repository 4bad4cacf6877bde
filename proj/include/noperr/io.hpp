#pragma once

#include "noperr/grid.hpp"
#include "noperr/operator.hpp"

#include "json.hpp"

#include <stdexcept>
#include <string>

namespace noperr {

using json = nlohmann::json;

struct ModelLoadError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr int kModelFormatVersion = 1;

// {dim, n, channels, values[]}; values row-major over axes, channel fastest
json field_to_json(const GridField& f);
GridField field_from_json(const json& j);

json model_to_json(const OperatorModel& m);
OperatorModel model_from_json(const json& j);
void model_save(const OperatorModel& m, const std::string& path);
OperatorModel model_load(const std::string& path);

json kernel_to_json(const Kernel& k);
Kernel kernel_from_json(const json& j);

}  // namespace noperr
