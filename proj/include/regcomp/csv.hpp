#pragma once

// CSV emission with locale-independent, round-trip number formatting.

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace regcomp::csv {

/// Shortest-form decimal with 17 significant digits ("nan", "inf", "-inf" for non-finite values).
std::string number(double v);
std::string number(std::int64_t v);
inline std::string number(int v) { return number(static_cast<std::int64_t>(v)); }

class Writer {
 public:
  explicit Writer(std::ostream& os) : os_(os) {}
  void header(const std::vector<std::string>& names) { row(names); }
  void row(const std::vector<std::string>& cells);
  void row(const std::vector<double>& values);
  void comment(std::string_view text);

 private:
  std::ostream& os_;
};

}  // namespace regcomp::csv
