#include "falsar/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace falsar {

std::string format_double(double v) {
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  return buf;
}

std::string signal_to_csv(const Signal& s) {
  std::string out = "time";
  for (const auto& c : s.channels()) {
    out += ',';
    out += c;
  }
  out += '\n';
  for (std::size_t j = 0; j < s.rows(); ++j) {
    out += format_double(static_cast<double>(j) * s.step());
    for (std::size_t c = 0; c < s.cols(); ++c) {
      out += ',';
      out += format_double(s.at(j, c));
    }
    out += '\n';
  }
  return out;
}

void write_signal_csv(const Signal& s, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << signal_to_csv(s);
  if (!f) throw std::runtime_error("write failed: " + path);
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

double parse_num(const std::string& s, std::size_t lineno) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    throw std::runtime_error("csv: bad number '" + s + "' on line " +
                             std::to_string(lineno));
  }
  return v;
}

}  // namespace

Signal signal_from_csv_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split_line(line);
  if (header.size() < 2 || header[0] != "time") {
    throw std::runtime_error("csv: expected header 'time,<channels...>'");
  }
  std::vector<std::string> channels(header.begin() + 1, header.end());

  std::vector<double> times;
  std::vector<double> data;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_line(line);
    if (fields.size() != header.size()) {
      throw std::runtime_error("csv: wrong field count on line " +
                               std::to_string(lineno));
    }
    times.push_back(parse_num(fields[0], lineno));
    for (std::size_t i = 1; i < fields.size(); ++i) {
      data.push_back(parse_num(fields[i], lineno));
    }
  }
  if (times.empty()) throw std::runtime_error("csv: no data rows");

  double step = 1.0;
  if (times.size() >= 2) {
    step = times[1] - times[0];
    if (!(step > 0)) throw std::runtime_error("csv: non-increasing time column");
    for (std::size_t j = 1; j < times.size(); ++j) {
      const double expect = times[0] + static_cast<double>(j) * step;
      if (std::abs(times[j] - expect) > 1e-9 * std::max(1.0, std::abs(expect))) {
        throw std::runtime_error("csv: non-uniform sampling at line " +
                                 std::to_string(j + 2));
      }
    }
  }
  if (std::abs(times[0]) > 1e-12) {
    throw std::runtime_error("csv: trace must start at time 0");
  }
  return Signal(std::move(channels), step, std::move(data));
}

Signal read_signal_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return signal_from_csv_text(ss.str());
}

}  // namespace falsar
