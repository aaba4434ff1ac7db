#pragma once

#include <iosfwd>
#include <string>

#include "falsar/signal.hpp"

namespace falsar {

// Trace CSV layout: header "time,<ch1>,<ch2>,...", one row per grid point,
// full-precision decimal values, LF line endings.
std::string signal_to_csv(const Signal& s);
void write_signal_csv(const Signal& s, const std::string& path);

Signal signal_from_csv_text(const std::string& text);
Signal read_signal_csv(const std::string& path);

// Shortest decimal form that round-trips a double ("%.17g" fallback).
std::string format_double(double v);

}  // namespace falsar
