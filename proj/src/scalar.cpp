#include "halfflat/scalar.hpp"

#include <cstdio>

namespace halfflat {

namespace {

std::string format17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::string ScalarTraits<double>::to_string(double x) { return format17(x); }

std::string ScalarTraits<Jet>::to_string(const Jet &x) {
  return "(" + format17(x.v) + ", " + format17(x.d1) + ", " + format17(x.d2) + ")";
}

std::string format_double(double x) { return format17(x); }

}  // namespace halfflat
