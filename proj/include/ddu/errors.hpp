#ifndef DDU_ERRORS_HPP
#define DDU_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ddu {

/// Precondition or dimension contract broken by the caller.
class ContractViolation : public std::logic_error {
 public:
  explicit ContractViolation(const std::string &what)
      : std::logic_error(what) {}
};

/// Local regression saw fewer positively weighted samples than parameters.
class InsufficientLocalData : public std::runtime_error {
 public:
  InsufficientLocalData(std::size_t deficit, std::size_t required)
      : std::runtime_error("insufficient local data: " +
                           std::to_string(deficit) +
                           " more positively weighted samples needed (" +
                           std::to_string(required) + " required)"),
        deficit_(deficit) {}
  std::size_t deficit() const { return deficit_; }

 private:
  std::size_t deficit_;
};

class NumericalBreakdown : public std::runtime_error {
 public:
  explicit NumericalBreakdown(const std::string &what)
      : std::runtime_error(what) {}
};

/// Every descent coefficient P_t is nonpositive on the horizon.
class DegenerateWeights : public std::runtime_error {
 public:
  explicit DegenerateWeights(const std::string &what)
      : std::runtime_error(what) {}
};

class MethodNotApplicable : public std::runtime_error {
 public:
  explicit MethodNotApplicable(const std::string &what)
      : std::runtime_error(what) {}
};

/// Input file problem; `line` is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string &what, std::size_t line = 0)
      : std::runtime_error(line == 0 ? what
                                     : "line " + std::to_string(line) + ": " +
                                           what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Configuration schema violation; `pointer` is a JSON pointer.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string &pointer, const std::string &what)
      : std::runtime_error(pointer + ": " + what), pointer_(pointer) {}
  const std::string &pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

/// An ALS step failed even after the bandwidth retry.
class StepFailure : public std::runtime_error {
 public:
  StepFailure(int iteration, const std::string &cause)
      : std::runtime_error("iteration " + std::to_string(iteration) + ": " +
                           cause),
        iteration_(iteration) {}
  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

}  // namespace ddu

#endif  // DDU_ERRORS_HPP
