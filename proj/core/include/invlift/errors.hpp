#pragma once

#include <stdexcept>
#include <string>

namespace invlift {

/* Error taxonomy shared by the whole library.  The CLI maps these onto
 * process exit codes: ValidationError -> 2, ExhaustionError -> 3, and
 * NumericalError (plus anything unexpected) -> 4. */

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/* Bad inputs: dimension mismatches, malformed configs, preconditions. */
class ValidationError : public Error {
 public:
  using Error::Error;
};

/* An operation that needs a nonempty set was handed an empty one. */
class EmptySetError : public Error {
 public:
  using Error::Error;
};

/* A support-function LP was unbounded in the requested direction. */
class UnboundedDirectionError : public Error {
 public:
  using Error::Error;
};

/* Vertex enumeration and related routines only handle low dimensions. */
class UnsupportedDimensionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/* Regression asked for more data than the filtered sample provides. */
class InsufficientSampleError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/* A query requires trajectory data beyond the stored horizon. */
class HorizonError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/* The search loop ran out of admissible lift orders (empty result). */
class ExhaustionError : public Error {
 public:
  using Error::Error;
};

/* LP iteration limits, non-finite arithmetic, and similar breakdowns. */
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace invlift
