#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace mvsim {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A single violated configuration constraint, with the probe that exposed it.
struct ConfigViolation {
    std::string constraint;
    std::string probe;  // e.g. "t=0.01 x=2.5"; empty when not probe-based
};

class ConfigError : public Error {
  public:
    explicit ConfigError(std::vector<ConfigViolation> violations);
    ConfigError(std::string constraint, std::string probe = {});

    const std::vector<ConfigViolation>& violations() const noexcept { return violations_; }

  private:
    std::vector<ConfigViolation> violations_;
};

/// A loss path that decreases between `index - 1` and `index`.
class MonotonicityError : public Error {
  public:
    explicit MonotonicityError(std::size_t index);
    std::size_t index() const noexcept { return index_; }

  private:
    std::size_t index_;
};

/// A loss path value outside [0, 1] at `index`.
class RangeError : public Error {
  public:
    explicit RangeError(std::size_t index);
    std::size_t index() const noexcept { return index_; }

  private:
    std::size_t index_;
};

class DomainError : public Error {
  public:
    using Error::Error;
};

class DiscretisationError : public Error {
  public:
    using Error::Error;
};

class GridMismatch : public Error {
  public:
    using Error::Error;
};

class DegenerateFit : public Error {
  public:
    using Error::Error;
};

class NonConvergence : public Error {
  public:
    NonConvergence(const std::string& what, std::size_t budget)
        : Error(what), budget_(budget) {}
    std::size_t budget() const noexcept { return budget_; }

  private:
    std::size_t budget_;
};

class IoError : public Error {
  public:
    using Error::Error;
};

}  // namespace mvsim
