#pragma once

#include "surgsync/core/timestamp.hpp"

#include <utility>
#include <vector>

namespace surgsync::post {

struct ContactConfig {
    double threshold = 205.0;  // sensor units
    double hysteresis = 0.0;
};

/// Enters contact at raw >= threshold; leaves it when raw < threshold - hysteresis.
std::vector<std::pair<Timestamp, bool>> binarize_contact(const std::vector<std::pair<Timestamp, double>>& raw,
                                                         const ContactConfig& cc);

/// Fraction of positions where pred == gt. Throws Error on length mismatch
/// or empty input.
double contact_accuracy(const std::vector<bool>& pred, const std::vector<bool>& gt);

/// Number of value changes along a binarized series.
std::size_t count_transitions(const std::vector<std::pair<Timestamp, bool>>& series);

}  // namespace surgsync::post
