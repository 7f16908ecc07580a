#pragma once

#include <stdexcept>
#include <string>

namespace spinclone {

// A size limit (site count, sector dimension) was exceeded.
class ResourceExhausted : public std::runtime_error {
 public:
  explicit ResourceExhausted(const std::string& what) : std::runtime_error(what) {}
};

// An integrator could not meet its accuracy contract.
class NumericalBreakdown : public std::runtime_error {
 public:
  explicit NumericalBreakdown(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace spinclone
