#pragma once

#include <initializer_list>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "dcboost/solver.hpp"

namespace dcboost {

/// Renders a double with 17 significant digits; non-finite values come out
/// as "nan", "inf" or "-inf".
std::string format_real(double value);

/// Streams trace rows as CSV. The base columns are
///   k,phi,d_norm,lambda,backtracks,wall_time_s
/// followed by any caller-supplied extra columns. Every row is flushed so a
/// partial trace survives an interrupted run.
class TraceCsvWriter {
 public:
  explicit TraceCsvWriter(std::ostream& out, std::vector<std::string> extra_columns = {});

  void write(const IterateRecord& rec, std::span<const double> extras = {});
  void write(const IterateRecord& rec, std::initializer_list<double> extras) {
    write(rec, std::span<const double>(extras.begin(), extras.size()));
  }

 private:
  std::ostream& out_;
  std::size_t n_extra_;
};

}  // namespace dcboost
