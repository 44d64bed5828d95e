#include "aeg/trace_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace aeg {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string slope_footer(const RateReport& fit) {
  std::string out = "# slope=" + format_double(fit.slope);
  out += ",window=[" + format_double(fit.k_lo) + "," + format_double(fit.k_hi) + "]";
  out += ",r2=" + format_double(fit.r_squared);
  return out;
}

std::string trace_to_csv(const Trace& trace, const std::optional<RateReport>& fit) {
  std::string out = trace.key + ",eps,residual,psi,dist,step\n";
  for (const TraceRow& row : trace.rows) {
    if (trace.key == "k") {
      out += std::to_string(static_cast<long long>(row.k));
    } else {
      out += format_double(row.k);
    }
    out += ',';
    out += format_double(row.eps);
    out += ',';
    out += format_double(row.residual);
    out += ',';
    out += format_double(row.psi);
    out += ',';
    if (row.dist) out += format_double(*row.dist);
    out += ',';
    out += format_double(row.step);
    out += '\n';
  }
  if (fit) {
    out += slope_footer(*fit);
    out += '\n';
  }
  return out;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

}  // namespace aeg
