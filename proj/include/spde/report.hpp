#pragma once

// Report serialization. CSV columns are exactly N,h,estimate,std_error,samples
// with a footer block carrying the fit, the seed and the resolved
// configuration; floats use 17 significant digits so a round trip through the
// file reproduces the doubles losslessly. JSON mirrors ExperimentReport
// field-for-field.

#include <iosfwd>
#include <string>

#include "spde/experiments.hpp"

namespace spde {

void emit_report_csv(const ExperimentReport& report, std::ostream& os);
void emit_report_json(const ExperimentReport& report, std::ostream& os);
void emit_report_file(const ExperimentReport& report, const std::string& format,
                      const std::string& path);

std::string report_to_json_text(const ExperimentReport& report);
ExperimentReport report_from_json_text(const std::string& text);

// Deterministic sweep table: columns h,exact_gap,lower_bound plus the same
// footer block.
void emit_lower_bound_csv(const LowerBoundSweep& sweep, std::ostream& os);
void emit_lower_bound_json(const LowerBoundSweep& sweep, std::ostream& os);
void emit_lower_bound_file(const LowerBoundSweep& sweep, const std::string& format,
                           const std::string& path);

}  // namespace spde
