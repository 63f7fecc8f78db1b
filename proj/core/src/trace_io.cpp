#include "dcboost/trace_io.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace dcboost {

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

TraceCsvWriter::TraceCsvWriter(std::ostream& out, std::vector<std::string> extra_columns)
    : out_(out), n_extra_(extra_columns.size()) {
  out_ << "k,phi,d_norm,lambda,backtracks,wall_time_s";
  for (const std::string& name : extra_columns) out_ << ',' << name;
  out_ << '\n';
  out_.flush();
}

void TraceCsvWriter::write(const IterateRecord& rec, std::span<const double> extras) {
  if (extras.size() != n_extra_) {
    throw std::invalid_argument("trace row has " + std::to_string(extras.size()) +
                                " extra values, header declares " + std::to_string(n_extra_));
  }
  out_ << rec.k << ',' << format_real(rec.phi) << ',' << format_real(rec.d_norm) << ','
       << format_real(rec.lambda) << ',' << rec.backtracks << ',' << format_real(rec.wall_time);
  for (double v : extras) out_ << ',' << format_real(v);
  out_ << '\n';
  out_.flush();
}

}  // namespace dcboost
