#include "girsanov/report.hpp"

#include <charconv>
#include <cmath>

namespace girsanov {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);  // shortest round trip
  return std::string(buf, res.ptr);
}

std::string format_check_line(const CheckLine& line) {
  return line.name + "\t" + format_double(line.value) + "\t" + format_double(line.threshold) +
         "\t" + (line.pass ? "PASS" : "FAIL");
}

}  // namespace girsanov
