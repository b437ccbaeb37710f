#include "surgsync/core/json_io.hpp"

#include "surgsync/core/error.hpp"

#include <cmath>
#include <limits>

namespace surgsync {

void to_json(nlohmann::json& j, const StreamDescriptor& d) {
    j = nlohmann::json{{"stream_id", d.stream_id},
                       {"kind", to_string(d.kind)},
                       {"nominal_rate_hz", d.nominal_rate_hz}};
    if (d.is_image()) {
        j["view"] = d.view ? nlohmann::json(to_string(*d.view)) : nlohmann::json(nullptr);
        j["width"] = d.width;
        j["height"] = d.height;
        j["channels"] = d.channels;
    } else {
        j["arity"] = d.arity;
        if (d.pose) j["pose"] = true;
        if (!d.latched_default.empty()) j["latched_default"] = encode_values(d.latched_default);
    }
}

void from_json(const nlohmann::json& j, StreamDescriptor& d) {
    d = StreamDescriptor{};
    d.stream_id = j.at("stream_id").get<std::string>();
    d.kind = stream_kind_from_string(j.at("kind").get<std::string>());
    d.nominal_rate_hz = j.at("nominal_rate_hz").get<double>();
    d.arity = j.value("arity", 1);
    if (j.contains("view") && !j["view"].is_null()) d.view = view_from_string(j["view"].get<std::string>());
    d.width = j.value("width", d.width);
    d.height = j.value("height", d.height);
    d.channels = j.value("channels", d.channels);
    d.pose = j.value("pose", false);
    if (j.contains("latched_default")) d.latched_default = decode_values(j["latched_default"]);
}

void to_json(nlohmann::json& j, const SyntheticSourceConfig& c) {
    j = nlohmann::json{{"descriptor", c.descriptor},
                       {"jitter_std_ms", c.jitter_std_ms},
                       {"drop_probability", c.drop_probability},
                       {"latency_offset_ms", c.latency_offset_ms},
                       {"seed", c.seed}};
}

nlohmann::json encode_double(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

double decode_double(const nlohmann::json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto& s = j.get_ref<const std::string&>();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
    }
    throw Error("expected a number, got " + j.dump());
}

nlohmann::json encode_values(const std::vector<double>& v) {
    auto arr = nlohmann::json::array();
    for (double x : v) arr.push_back(encode_double(x));
    return arr;
}

std::vector<double> decode_values(const nlohmann::json& j) {
    if (!j.is_array()) throw Error("expected an array of numbers");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& e : j) out.push_back(decode_double(e));
    return out;
}

}  // namespace surgsync
