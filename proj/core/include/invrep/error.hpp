#ifndef INVREP_ERROR_HPP
#define INVREP_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace invrep {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid architecture, experiment configuration or shape mismatch.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Bad caller-supplied data (label out of range, empty input, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Malformed file. `position()` is a byte offset for binary formats and a
/// 1-based line number for text formats.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what), position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// A fairness or accuracy metric is undefined on the given records
/// (for example a group without positive truths).
class MetricError : public Error {
 public:
  using Error::Error;
};

/// Training diverged or produced a non-finite update.
class TrainingError : public Error {
 public:
  TrainingError(const std::string& what, std::size_t step)
      : Error(what), step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace invrep

#endif  // INVREP_ERROR_HPP
