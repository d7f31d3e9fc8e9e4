#pragma once

#include <cstdint>
#include <ostream>
#include <string>

#include "inlm/solver.hpp"
#include "inlm/vec.hpp"

namespace inlm {

/// Shortest round-trip-lossless decimal rendering (up to 17 significant
/// digits), '.' decimal separator regardless of locale.
std::string format_number(double v);

/// Trace CSV with header: k,alpha_k,lambda_k,residual,distance,step_norm.
/// Missing distances serialize as empty fields.
void write_trace_csv(std::ostream& os, const RunTrace& trace);
void write_trace_csv_file(const std::string& path, const RunTrace& trace);

/// Row-major n x n grid as CSV (one grid row per line).
void write_grid_csv(std::ostream& os, int n, const Vector& grid);
void write_grid_csv_file(const std::string& path, int n, const Vector& grid);

/// Two-column series CSV with a caller-supplied header line.
void write_series_csv_file(const std::string& path, const std::string& header,
                           const std::vector<double>& xs,
                           const std::vector<double>& ys);

/// FNV-1a 64-bit over a string, hex-encoded; platform-stable config hashing.
std::string fnv1a_hex(const std::string& data);

}  // namespace inlm
