#pragma once

#include "noperr/experiments.hpp"
#include "noperr/io.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace noperr {

// fixed-format number used in every CSV cell
std::string fmt_num(double x);

void write_discretization_csv(std::ostream& os, const std::vector<ErrorCurve>& curves);
void write_stability_csv(std::ostream& os, const std::vector<PerturbationCurve>& curves);
void write_nyquist_csv(std::ostream& os, const std::vector<NyquistCurve>& curves);
void write_iss_csv(std::ostream& os, const IssReport& r);
void write_grf_check_csv(std::ostream& os, const std::vector<GrfCheckRow>& rows);
void write_kernel_check_csv(std::ostream& os, const std::vector<KernelCheckRow>& rows);

json to_json(const LogLogFit& f);
json to_json(const BoundReport& r);
json to_json(const StackLipschitz& l);
json to_json(const ErrorCurve& c);
json to_json(const PerturbationCurve& c);
json to_json(const DepthResult& r);
json to_json(const NyquistCurve& c);
json to_json(const IssReport& r);
json to_json(const GrfCheckRow& r);
json to_json(const KernelCheckRow& r);

}  // namespace noperr
