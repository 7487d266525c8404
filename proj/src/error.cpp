#include "lapreg/error.hpp"

namespace lapreg {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InvalidLabelCount: return "InvalidLabelCount";
    case ErrorKind::UnsupportedTrendManifoldPair: return "UnsupportedTrendManifoldPair";
    case ErrorKind::UnsupportedManifold: return "UnsupportedManifold";
    case ErrorKind::BracketFailure: return "BracketFailure";
    case ErrorKind::TooLargeForDense: return "TooLargeForDense";
    case ErrorKind::InvalidK: return "InvalidK";
    case ErrorKind::MalformedCsv: return "MalformedCsv";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
  }
  return "Error";
}

}  // namespace lapreg
