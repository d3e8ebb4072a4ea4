#ifndef TESTROLL_REPORT_HPP
#define TESTROLL_REPORT_HPP

#include <string>

#include "testroll/montecarlo.hpp"
#include "testroll/search.hpp"

namespace testroll {

/// JSON serialization of the result records.  Strings are returned
/// rather than a JSON object type so the library's installed interface
/// does not depend on the vendored JSON header.

std::string to_json(const DesignRecommendation& rec, bool with_trace = true,
                    int indent = 2);
std::string to_json(const WorstCaseResult& result, int indent = 2);
std::string to_json(const LocalizationReport& report, int indent = 2);
std::string to_json(const SimEstimate& estimate, int indent = 2);

}  // namespace testroll

#endif  // TESTROLL_REPORT_HPP
