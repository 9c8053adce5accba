#pragma once

#include <stdexcept>
#include <string>

namespace irloc {

/// Base class for all irloc errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Caller passed arguments violating an operation's preconditions
/// (dtype/dimension mismatches, bad parameter ranges, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A serialized artifact (.dsc/.voc/.idb/.map/.mch/.pgm/CSV) is malformed.
/// Messages name the offending byte offset where that is meaningful.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Numerically or geometrically degenerate input: rank-deficient design
/// matrices, collinear point sets, too few correspondences.
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

/// An iterative solver failed to converge; carries the last residual.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, double last_residual)
      : Error(what), last_residual_(last_residual) {}
  double last_residual() const { return last_residual_; }

 private:
  double last_residual_;
};

}  // namespace irloc
