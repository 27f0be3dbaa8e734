#pragma once

#include <iosfwd>
#include <string>

#include "heisenet/config.hpp"

namespace heisenet {

/// Execute a parsed run and write the report to `out`. Returns 0 on
/// success, 2 on numerical failure (reports with unreliable flags still
/// return 0; the flags travel in the output).
int run(const RunSpec& spec, std::ostream& out, std::ostream& err);

/// 17-significant-digit decimal rendering used in all CSV output.
std::string format_value(double value);

}  // namespace heisenet
