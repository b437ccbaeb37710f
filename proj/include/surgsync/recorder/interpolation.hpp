#pragma once

#include "surgsync/core/stream.hpp"
#include "surgsync/dataset/kin_record.hpp"

#include <span>
#include <string_view>

namespace surgsync::offline {

enum class InterpolationRule {
    nearest,  // k = 1
    linear,   // k = 2, bracketing samples
};

std::string_view to_string(InterpolationRule r);
InterpolationRule interpolation_rule_from_string(std::string_view s);

struct Interpolated {
    NumericVector values;
    Timestamp stamp;  // the contributing sample nearest to the query
};

/// Samples must be stamp-ordered. Nearest picks the closest stamp (earlier on
/// a tie). Linear blends the bracketing pair componentwise and falls back to
/// the nearest endpoint outside the sampled range. For poses (xyz + wxyz) the
/// quaternion is sign-aligned before blending and renormalized after.
Interpolated interpolate(std::span<const KinRecord> samples, Timestamp query, InterpolationRule rule,
                         bool pose = false);

}  // namespace surgsync::offline
