#pragma once

#include <string>
#include <vector>

#include "pameq/pipeline.hpp"

namespace pameq {

// Serializes a report to pretty-printed JSON with sorted keys. Numeric
// values round-trip exactly (shortest-representation doubles).
std::string report_to_json(const ExperimentReport& report);

// Inverse of report_to_json (the mse_trace lives in its own CSV file and
// is restored separately by read-back callers).
ExperimentReport report_from_json(const std::string& text);

// CSV renderers. All floating-point cells use 17 significant digits.
std::string mse_trace_csv(const std::vector<double>& trace);
std::string ber_curve_csv(const std::vector<BerPoint>& points);
std::string equalized_csv(const VecX<double>& samples);

// Parses a mse_trace.csv body back into per-iteration values.
std::vector<double> parse_mse_trace_csv(const std::string& text);

// Writes content via a temporary file and rename, so no reader can ever
// observe a partially written file.
void atomic_write_file(const std::string& path, const std::string& content);

}  // namespace pameq
