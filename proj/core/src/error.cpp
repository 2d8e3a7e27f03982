#include "orbitlift/error.hpp"

namespace orbitlift {

std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::unknown_family: return "UnknownFamily";
    case ErrorKind::bad_params: return "BadParams";
    case ErrorKind::cap_exceeded: return "CapExceeded";
    case ErrorKind::not_orthogonal: return "NotOrthogonal";
    case ErrorKind::not_finite: return "NotFinite";
    case ErrorKind::tolerance_ambiguity: return "ToleranceAmbiguity";
    case ErrorKind::certification_failed: return "CertificationFailed";
    case ErrorKind::cap_too_low: return "CapTooLow";
    case ErrorKind::not_invariant: return "NotInvariant";
    case ErrorKind::not_in_algebra: return "NotInAlgebra";
    case ErrorKind::field_overflow: return "FieldOverflow";
    case ErrorKind::not_hyperbolic: return "NotHyperbolic";
    case ErrorKind::grid_too_coarse: return "GridTooCoarse";
    case ErrorKind::inconclusive: return "Inconclusive";
    case ErrorKind::order_too_low: return "OrderTooLow";
    case ErrorKind::not_in_image: return "NotInImage";
    case ErrorKind::newton_diverged: return "NewtonDiverged";
    case ErrorKind::seed_mismatch: return "SeedMismatch";
    case ErrorKind::no_match: return "NoMatch";
    case ErrorKind::recursion_depth_exceeded: return "RecursionDepthExceeded";
    case ErrorKind::multiset_mismatch: return "MultisetMismatch";
    case ErrorKind::no_overlap: return "NoOverlap";
    case ErrorKind::inconsistent: return "Inconsistent";
    case ErrorKind::not_a_section: return "NotASection";
    case ErrorKind::not_polar: return "NotPolar";
    case ErrorKind::parse_error: return "ParseError";
    case ErrorKind::io_error: return "IoError";
    case ErrorKind::invalid_argument: return "InvalidArgument";
  }
  return "Error";
}

}  // namespace orbitlift
