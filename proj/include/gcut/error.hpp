#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gcut {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A partition whose balancing term vanishes (empty side, zero volume).
class DegeneratePartition : public Error {
 public:
  using Error::Error;
};

// Enumeration would exceed the configured cap.
class InfeasibleSize : public Error {
 public:
  using Error::Error;
};

// A modelling assumption required by a limit law does not hold.
class AssumptionViolated : public Error {
 public:
  using Error::Error;
};

class PointOutOfBounds : public Error {
 public:
  PointOutOfBounds(std::size_t index, const std::string& what)
      : Error(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

}  // namespace gcut
