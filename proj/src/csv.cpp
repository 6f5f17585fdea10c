#include "regcomp/csv.hpp"

#include <charconv>
#include <cmath>

namespace regcomp::csv {

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string number(std::int64_t v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void Writer::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) os_ << ',';
    const auto& c = cells[i];
    if (c.find_first_of(",\"\n") == std::string::npos) {
      os_ << c;
    } else {
      os_ << '"';
      for (char ch : c) {
        if (ch == '"') os_ << '"';
        os_ << ch;
      }
      os_ << '"';
    }
  }
  os_ << '\n';
}

void Writer::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(number(v));
  row(cells);
}

void Writer::comment(std::string_view text) { os_ << "# " << text << '\n'; }

}  // namespace regcomp::csv
