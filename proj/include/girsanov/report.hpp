#pragma once

#include <string>
#include <vector>

namespace girsanov {

/// One verification check: PASS iff value <= threshold.
struct CheckLine {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct CheckReport {
  std::vector<CheckLine> lines;

  bool all_pass() const {
    for (const auto& l : lines)
      if (!l.pass) return false;
    return true;
  }
};

/// Locale-independent shortest round-trip formatting ('.' decimal point,
/// at most 17 significant digits).
std::string format_double(double v);

/// "<name>\t<value>\t<threshold>\t<PASS|FAIL>"
std::string format_check_line(const CheckLine& line);

}  // namespace girsanov
