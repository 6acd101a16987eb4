#include "ads3/errors.hpp"

namespace ads3 {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::LightlikeDirection: return "LightlikeDirection";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::NotTimelike: return "NotTimelike";
    case ErrorCode::ChartSingularity: return "ChartSingularity";
    case ErrorCode::DegenerateFrame: return "DegenerateFrame";
    case ErrorCode::DegenerateQuadruple: return "DegenerateQuadruple";
    case ErrorCode::NotMonotone: return "NotMonotone";
    case ErrorCode::SearchBudgetExceeded: return "SearchBudgetExceeded";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::ClassificationAmbiguous: return "ClassificationAmbiguous";
    case ErrorCode::NonConvergent: return "NonConvergent";
    case ErrorCode::RootNotBracketed: return "RootNotBracketed";
    case ErrorCode::NotSpacelike: return "NotSpacelike";
    case ErrorCode::MaxItersExceeded: return "MaxItersExceeded";
    case ErrorCode::SingularParallel: return "SingularParallel";
    case ErrorCode::PlaneIntersectsSurface: return "PlaneIntersectsSurface";
    case ErrorCode::AllUmbilical: return "AllUmbilical";
    case ErrorCode::CurvatureAtOne: return "CurvatureAtOne";
    case ErrorCode::UmbilicalRegion: return "UmbilicalRegion";
    case ErrorCode::DegenerateTangentPlane: return "DegenerateTangentPlane";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace ads3
