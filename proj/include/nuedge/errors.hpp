#ifndef NUEDGE_ERRORS_HPP
#define NUEDGE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace nuedge {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Request outside what an engine supports (order caps, non-lattice input).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent input data.
class InputError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Memory / piece-count budget exceeded.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// Variance that fails to grow, p_2 <= 0 and similar degenerate cases.
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

/// Characteristic function vanished while unwinding the logarithm.
class BranchError : public Error {
 public:
  BranchError(const std::string& what, double t) : Error(what), t_(t) {}
  double t() const noexcept { return t_; }

 private:
  double t_;
};

/// Quadrature or iteration that did not reach its tolerance.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double achieved, double partial = 0.0)
      : Error(what), achieved_(achieved), partial_(partial) {}
  double achieved_tolerance() const noexcept { return achieved_; }
  double partial_value() const noexcept { return partial_; }

 private:
  double achieved_;
  double partial_;
};

/// Bad configuration or command-line usage.
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace nuedge

#endif  // NUEDGE_ERRORS_HPP
