#pragma once

#include <optional>
#include <string>

#include "aeg/analysis.hpp"
#include "aeg/solvers.hpp"

namespace aeg {

// 17 significant digits: enough to round-trip a double exactly.
std::string format_double(double v);

// CSV body: header "k,eps,residual,psi,dist,step" ("t" for flow traces),
// one row per record, dist empty when no target is known. When a rate fit
// is supplied it is appended as a footer comment
//   # slope=<f>,window=[<k>,<k>],r2=<f>
std::string trace_to_csv(const Trace& trace, const std::optional<RateReport>& fit = std::nullopt);

// Writes via a temporary file and rename, so concurrent writers never expose
// partial content.
void write_file_atomic(const std::string& path, const std::string& content);

std::string slope_footer(const RateReport& fit);

}  // namespace aeg
