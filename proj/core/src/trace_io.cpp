#include "inlm/trace_io.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace inlm {

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc{}) throw std::runtime_error("format_number failed");
  return std::string(buf, res.ptr);
}

void write_trace_csv(std::ostream& os, const RunTrace& trace) {
  os << "k,alpha_k,lambda_k,residual,distance,step_norm\n";
  for (const auto& rec : trace.records) {
    os << rec.k << ',' << format_number(rec.alpha_k) << ','
       << format_number(rec.lambda_k) << ',' << format_number(rec.residual_norm)
       << ',';
    if (rec.distance) os << format_number(*rec.distance);
    os << ',' << format_number(rec.step_norm) << '\n';
  }
}

static std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  return os;
}

void write_trace_csv_file(const std::string& path, const RunTrace& trace) {
  auto os = open_out(path);
  write_trace_csv(os, trace);
}

void write_grid_csv(std::ostream& os, int n, const Vector& grid) {
  require_dim(grid, static_cast<std::size_t>(n) * n, "write_grid_csv");
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j) os << ',';
      os << format_number(grid[static_cast<std::size_t>(i) * n + j]);
    }
    os << '\n';
  }
}

void write_grid_csv_file(const std::string& path, int n, const Vector& grid) {
  auto os = open_out(path);
  write_grid_csv(os, n, grid);
}

void write_series_csv_file(const std::string& path, const std::string& header,
                           const std::vector<double>& xs,
                           const std::vector<double>& ys) {
  if (xs.size() != ys.size()) {
    throw std::invalid_argument("write_series_csv_file: length mismatch");
  }
  auto os = open_out(path);
  os << header << '\n';
  for (std::size_t i = 0; i < xs.size(); ++i) {
    os << format_number(xs[i]) << ',' << format_number(ys[i]) << '\n';
  }
}

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

}  // namespace inlm
