#pragma once

#include <span>
#include <string>
#include <vector>

#include "cfcal/io.hpp"

namespace cfcal::report {

enum class Format { Text, Svg, All };

Format parse_format(std::string_view name);

/// Table of mean/std/min/25%/50%/75%/max by variable, from a stats report.
std::string descriptive_table(const io::Json& stats_report);

/// Errors table: NRMSE/MAE/RMSE rows, spacing and speed column groups, one
/// column per calibrated model. `phase` is "calibration" or "validation".
std::string error_table(std::span<const io::Json> calibration_results, const std::string& phase);

/// Calibrated parameter table for one model.
std::string parameter_table(const io::Json& calibration_result);

std::string svg_histogram(const std::string& title, const std::string& x_label, double lo, double hi,
                          std::span<const std::size_t> counts);

std::string svg_series(const std::string& title, const std::string& y_label, std::span<const double> t,
                       std::span<const double> observed, std::span<const double> simulated);

/// Renders every input to `out_dir` and returns the written paths. Inputs
/// are recognized by shape: stats report, calibration result, or
/// simulation result. With no inputs a "no data" stub is written.
std::vector<std::string> emit_report(std::span<const io::Json> inputs, Format format, const std::string& out_dir);

}  // namespace cfcal::report
