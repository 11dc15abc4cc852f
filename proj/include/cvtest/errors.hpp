#pragma once

#include <stdexcept>

namespace cvtest {

/// Base class of every error this library raises on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A local fit found no kernel mass at an evaluation point, or the
/// normal-equation determinant fell below the guard while the fallback to a
/// kernel-weighted mean was disabled. Usually means the bandwidth is too small.
class DegenerateNeighborhood : public Error {
 public:
  using Error::Error;
};

/// No bandwidth in the cross-validation grid admits a valid leave-one-out fit
/// at every observation.
class AllBandwidthsDegenerate : public Error {
 public:
  using Error::Error;
};

/// The scale-ratio denominator vanished: every weighted variance estimate is
/// zero over the trimmed predictor range.
class ZeroDenominator : public Error {
 public:
  using Error::Error;
};

/// Residuals carry no spread and cannot be standardized.
class ZeroResidualSpread : public Error {
 public:
  using Error::Error;
};

/// A bootstrap replicate failed even after exhausting its redraw budget.
class ReplicateFailure : public Error {
 public:
  using Error::Error;
};

/// A simulated recursion left the numerical safety region.
class ExplosiveSeries : public Error {
 public:
  using Error::Error;
};

/// Too many Monte Carlo runs failed inside one experiment cell.
class CellFailure : public Error {
 public:
  using Error::Error;
};

/// Malformed user-supplied data (unparseable CSV cell, too few rows, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace cvtest
