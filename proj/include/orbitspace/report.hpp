#pragma once

// Serialisation of run reports and their artifacts.

#include "orbitspace/scenario.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace orbitspace {

/// {scenario, suite, seed, checks, overall} plus "timings" when requested.
nlohmann::json report_json(const RunReport& report, bool with_timings = true);

/// Header plus one row per check.
std::string summary_csv(const RunReport& report);

/// Full symmetric matrix, 12 significant digits.
std::string matrix_csv(const Mat& m);

/// One line per check: PASS/FAIL name deviation tolerance.
std::string summary_text(const RunReport& report);

/// Writes report.json, summary.csv and every artifact into dir (created if
/// missing). Returns the written paths.
std::vector<std::string> write_outputs(const RunReport& report, const std::string& dir);

}  // namespace orbitspace
