#pragma once

#include <stdexcept>
#include <string>

namespace batchbo {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point lies outside the objective's domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Vector or matrix dimensions disagree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Invalid construction parameters.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// The Gram matrix stayed indefinite after the whole jitter ladder.
class FitError : public Error {
 public:
  using Error::Error;
};

/// Joint posterior covariance could not be factorized.
class SamplingError : public Error {
 public:
  using Error::Error;
};

/// The slice sampler ran out of proposals before collecting enough samples.
class FlatSurfaceError : public Error {
 public:
  using Error::Error;
};

/// A batch strategy could not complete the current epoch.
class StrategyError : public Error {
 public:
  using Error::Error;
};

/// A discrete pool has fewer unevaluated candidates than the batch needs.
class ExhaustionError : public Error {
 public:
  using Error::Error;
};

/// A metric was requested that the objective cannot support.
class MetricUnavailableError : public Error {
 public:
  using Error::Error;
};

/// The TwIST iteration diverged even after step-size halving.
class SolverError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace batchbo
