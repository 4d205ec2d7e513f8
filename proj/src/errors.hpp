#pragma once

#include <stdexcept>
#include <string>

namespace bolasso {

// Error kinds mirror the status codes of the public C API so the wrapper can
// translate without string matching.
enum class ErrorKind {
  invalid_argument,
  not_positive_definite,
  not_converged,
  degenerate_design,
  singular_gram,
  not_found,
  no_pattern_of_size,
  index_out_of_range,
  parse,
  missing_target,
  all_rows_dropped,
  all_weights_zero,
  io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

#define BOLASSO_DEFINE_ERROR(Name, Kind)                                 \
  class Name : public Error {                                            \
   public:                                                               \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
  }

BOLASSO_DEFINE_ERROR(InvalidArgument, invalid_argument);
BOLASSO_DEFINE_ERROR(NotPositiveDefinite, not_positive_definite);
BOLASSO_DEFINE_ERROR(NotConverged, not_converged);
BOLASSO_DEFINE_ERROR(DegenerateDesign, degenerate_design);
BOLASSO_DEFINE_ERROR(SingularGram, singular_gram);
BOLASSO_DEFINE_ERROR(NotFound, not_found);
BOLASSO_DEFINE_ERROR(NoPatternOfSizeR, no_pattern_of_size);
BOLASSO_DEFINE_ERROR(IndexOutOfRange, index_out_of_range);
BOLASSO_DEFINE_ERROR(ParseError, parse);
BOLASSO_DEFINE_ERROR(MissingTarget, missing_target);
BOLASSO_DEFINE_ERROR(AllRowsDropped, all_rows_dropped);
BOLASSO_DEFINE_ERROR(AllWeightsZero, all_weights_zero);
BOLASSO_DEFINE_ERROR(IoError, io);

#undef BOLASSO_DEFINE_ERROR

}  // namespace bolasso
