#pragma once

#include <stdexcept>
#include <string>

namespace cmnd {

enum class errc {
  not_hermitian,
  non_positive_diagonal,
  dimension_mismatch,
  out_of_range_prefix,
  unbalanced_degrees,
  not_in_index_set,
  degree_too_large,
  not_positive_definite,
  insufficient_samples,
  unknown_block,
  parse_error,
  schema_error,
  constraint_error,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::not_hermitian: return "NotHermitian";
    case errc::non_positive_diagonal: return "NonPositiveDiagonal";
    case errc::dimension_mismatch: return "DimensionMismatch";
    case errc::out_of_range_prefix: return "OutOfRangePrefix";
    case errc::unbalanced_degrees: return "UnbalancedDegrees";
    case errc::not_in_index_set: return "NotInIndexSet";
    case errc::degree_too_large: return "DegreeTooLarge";
    case errc::not_positive_definite: return "NotPositiveDefinite";
    case errc::insufficient_samples: return "InsufficientSamples";
    case errc::unknown_block: return "UnknownBlock";
    case errc::parse_error: return "ParseError";
    case errc::schema_error: return "SchemaError";
    case errc::constraint_error: return "ConstraintError";
  }
  return "UnknownError";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  errc code() const { return code_; }
  const char* name() const { return errc_name(code_); }

 private:
  errc code_;
};

}  // namespace cmnd
