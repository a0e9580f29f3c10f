#pragma once

#include <stdexcept>
#include <string>

namespace fedsim {

/// Base class for all library errors.
class SimError : public std::runtime_error {
 public:
  explicit SimError(const std::string& what) : std::runtime_error(what) {}
};

/// Incompatible or invalid matrix/vector dimensions.
class DimensionError : public SimError {
 public:
  explicit DimensionError(const std::string& what) : SimError(what) {}
};

/// A factorization input was numerically rank deficient.
class RankDeficientError : public SimError {
 public:
  explicit RankDeficientError(const std::string& what) : SimError(what) {}
};

/// An iterative solver hit its iteration cap before reaching tolerance.
class NoConvergenceError : public SimError {
 public:
  explicit NoConvergenceError(const std::string& what) : SimError(what) {}
};

/// Requested planted initial distance is outside (0, 1).
class TargetInfeasibleError : public SimError {
 public:
  explicit TargetInfeasibleError(const std::string& what) : SimError(what) {}
};

/// Client subsample size exceeds the client count.
class InvalidSampleSizeError : public SimError {
 public:
  explicit InvalidSampleSizeError(const std::string& what) : SimError(what) {}
};

/// A sampled head has zero norm where a normalized head is required.
class DegenerateHeadError : public SimError {
 public:
  explicit DegenerateHeadError(const std::string& what) : SimError(what) {}
};

/// The mean ground-truth head is (numerically) zero.
class DegenerateMeanHeadError : public SimError {
 public:
  explicit DegenerateMeanHeadError(const std::string& what) : SimError(what) {}
};

/// The adversarial construction requires k > 1.
class RankError : public SimError {
 public:
  explicit RankError(const std::string& what) : SimError(what) {}
};

/// B_* w_bar is not contained in col(B_0) to the required tolerance.
class ContainmentViolatedError : public SimError {
 public:
  explicit ContainmentViolatedError(const std::string& what) : SimError(what) {}
};

/// Config text could not be parsed; carries line/key context in what().
class ParseError : public SimError {
 public:
  explicit ParseError(const std::string& what) : SimError(what) {}
};

}  // namespace fedsim
