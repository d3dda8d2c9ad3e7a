#pragma once

// Exception hierarchy. Every error raised by the library derives from
// atlas::Error and carries a stable kind string used in JSON reports.

#include <stdexcept>
#include <string>

namespace atlas {

class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

// A point-carrying error keeps the textual form of the offending point.
class PointError : public Error {
 public:
  PointError(std::string kind, const std::string& what, std::string point)
      : Error(std::move(kind), what + " at " + point), reason_(what), point_(std::move(point)) {}
  const std::string& reason() const noexcept { return reason_; }
  const std::string& point() const noexcept { return point_; }

 private:
  std::string reason_;
  std::string point_;
};

#define ATLAS_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                      \
   public:                                                         \
    explicit Name(const std::string& what) : Error(#Name, what) {} \
  };

#define ATLAS_DEFINE_POINT_ERROR(Name)                             \
  class Name : public PointError {                                 \
   public:                                                         \
    Name(const std::string& what, std::string point)               \
        : PointError(#Name, what, std::move(point)) {}             \
  };

// exact arithmetic
ATLAS_DEFINE_ERROR(InvalidField)
ATLAS_DEFINE_ERROR(FieldMismatch)
ATLAS_DEFINE_ERROR(ShapeError)
ATLAS_DEFINE_ERROR(SizeError)
ATLAS_DEFINE_ERROR(DivisionByZero)
ATLAS_DEFINE_ERROR(ParseError)

// polynomials
ATLAS_DEFINE_ERROR(DegenerateSampler)
ATLAS_DEFINE_ERROR(DegreeBoundViolated)
ATLAS_DEFINE_ERROR(BudgetExceeded)
ATLAS_DEFINE_ERROR(NotZeroDimensional)

// quadratic loci
ATLAS_DEFINE_ERROR(NotOnStratum)
ATLAS_DEFINE_ERROR(NotOnOpenStratum)
ATLAS_DEFINE_ERROR(Unsupported)
ATLAS_DEFINE_ERROR(NotRankOne)
ATLAS_DEFINE_ERROR(Degenerate)
ATLAS_DEFINE_ERROR(EvenSizeNotSupported)

// Lagrangian loci
ATLAS_DEFINE_POINT_ERROR(HypothesisViolated)
ATLAS_DEFINE_POINT_ERROR(NotTransverse)
ATLAS_DEFINE_POINT_ERROR(FrameDegenerate)

// EPW
ATLAS_DEFINE_ERROR(NotLagrangian)
ATLAS_DEFINE_POINT_ERROR(SigmaOne)
ATLAS_DEFINE_ERROR(NotGMRange)

#undef ATLAS_DEFINE_ERROR
#undef ATLAS_DEFINE_POINT_ERROR

}  // namespace atlas
