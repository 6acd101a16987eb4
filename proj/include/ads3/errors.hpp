#pragma once

#include <stdexcept>
#include <string>

namespace ads3 {

enum class ErrorCode {
  LightlikeDirection,
  OutOfRange,
  NotTimelike,
  ChartSingularity,
  DegenerateFrame,
  DegenerateQuadruple,
  NotMonotone,
  SearchBudgetExceeded,
  TooFewPoints,
  ClassificationAmbiguous,
  NonConvergent,
  RootNotBracketed,
  NotSpacelike,
  MaxItersExceeded,
  SingularParallel,
  PlaneIntersectsSurface,
  AllUmbilical,
  CurvatureAtOne,
  UmbilicalRegion,
  DegenerateTangentPlane,
  ConfigInvalid,
  InsufficientData,
  IoError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ads3
