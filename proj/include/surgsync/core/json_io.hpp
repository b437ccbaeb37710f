#pragma once

#include "surgsync/core/stream.hpp"
#include "surgsync/core/synthetic_source.hpp"

#include <nlohmann/json.hpp>

namespace surgsync {

void to_json(nlohmann::json& j, const StreamDescriptor& d);
void from_json(const nlohmann::json& j, StreamDescriptor& d);

void to_json(nlohmann::json& j, const SyntheticSourceConfig& c);

/// Doubles go out as JSON numbers when finite (shortest round-trip form) and
/// as the strings "nan", "inf", "-inf" otherwise.
nlohmann::json encode_double(double v);
double decode_double(const nlohmann::json& j);

nlohmann::json encode_values(const std::vector<double>& v);
std::vector<double> decode_values(const nlohmann::json& j);

}  // namespace surgsync
