#pragma once

#include <algorithm>
#include <string>
#include <vector>

namespace halfflat {

struct Check {
  std::string name;
  bool pass = false;
  double residual = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<Check> checks;

  bool pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check &c) { return c.pass; });
  }
  const Check *find(const std::string &name) const {
    for (const auto &c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
  void add(std::string name, bool pass, double residual, std::string detail = {}) {
    checks.push_back({std::move(name), pass, residual, std::move(detail)});
  }
  void append(const ValidationReport &o, const std::string &prefix = {}) {
    for (const auto &c : o.checks) checks.push_back({prefix + c.name, c.pass, c.residual, c.detail});
  }
};

}  // namespace halfflat
