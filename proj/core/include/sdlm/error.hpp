#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace sdlm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed data: unsorted times, unknown sites, bad numbers, missing regressors.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid run configuration; the message names the offending field.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Operation invoked on an object in the wrong state (missing history, misaligned batches).
class StateError : public Error {
 public:
  using Error::Error;
};

/// A Gaussian solve failed even at the maximum jitter.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, std::optional<double> time = std::nullopt,
                 std::optional<std::size_t> particle = std::nullopt)
      : Error(format(what, time, particle)), what_(what), time_(time), particle_(particle) {}

  std::optional<double> time() const { return time_; }
  std::optional<std::size_t> particle() const { return particle_; }

  NumericalError with_particle(std::size_t k) const { return NumericalError(what_, time_, k); }

 private:
  static std::string format(const std::string& what, std::optional<double> time,
                            std::optional<std::size_t> particle) {
    std::string s = what;
    if (time) s += " (t=" + std::to_string(*time) + ")";
    if (particle) s += " (particle " + std::to_string(*particle) + ")";
    return s;
  }

  std::string what_;
  std::optional<double> time_;
  std::optional<std::size_t> particle_;
};

}  // namespace sdlm
