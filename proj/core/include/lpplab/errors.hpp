#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lpplab {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Every boundary point that could feed a target carries the bottom value.
class NoPathError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A replica failed inside the work pool. Carries the failing replica id.
class ExperimentError : public std::runtime_error {
 public:
  ExperimentError(const std::string& what, std::uint64_t replica)
      : std::runtime_error(what), replica_(replica) {}
  std::uint64_t replica() const noexcept { return replica_; }

 private:
  std::uint64_t replica_;
};

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lpplab
