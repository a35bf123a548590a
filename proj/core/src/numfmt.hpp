#pragma once

#include <charconv>
#include <ostream>

namespace hqrc::detail {

// Shortest text that parses back to the same double.
struct Shortest {
  double v;
};

// Time stamps: t0 + k dt carries accumulated rounding, 12 digits hides it.
struct Stamp {
  double v;
};

inline std::ostream& operator<<(std::ostream& os, Shortest s) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, s.v);
  return os.write(buf, r.ptr - buf);
}

inline std::ostream& operator<<(std::ostream& os, Stamp s) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, s.v, std::chars_format::general, 12);
  return os.write(buf, r.ptr - buf);
}

}  // namespace hqrc::detail
