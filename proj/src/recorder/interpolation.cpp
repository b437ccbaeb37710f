#include "surgsync/recorder/interpolation.hpp"

#include "surgsync/core/error.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace surgsync::offline {

std::string_view to_string(InterpolationRule r) {
    return r == InterpolationRule::nearest ? "nearest" : "linear";
}

InterpolationRule interpolation_rule_from_string(std::string_view s) {
    if (s == "nearest") return InterpolationRule::nearest;
    if (s == "linear") return InterpolationRule::linear;
    throw Error(fmt::format("unknown interpolation rule '{}'", s));
}

Interpolated interpolate(std::span<const KinRecord> samples, Timestamp query, InterpolationRule rule, bool pose) {
    if (samples.empty()) throw Error("interpolate: empty sample list");
    auto it = std::lower_bound(samples.begin(), samples.end(), query,
                               [](const KinRecord& r, Timestamp t) { return r.stamp < t; });
    if (it != samples.end() && it->stamp == query) return {it->values, it->stamp};
    if (it == samples.begin()) return {it->values, it->stamp};
    if (it == samples.end()) return {samples.back().values, samples.back().stamp};

    const KinRecord& a = *std::prev(it);
    const KinRecord& b = *it;
    const Nanos da = query - a.stamp;
    const Nanos db = b.stamp - query;
    const KinRecord& near = da <= db ? a : b;
    if (rule == InterpolationRule::nearest) return {near.values, near.stamp};

    // Extended precision keeps the blend within one rounding of the exact
    // affine value.
    const long double w = static_cast<long double>(da) / static_cast<long double>(b.stamp - a.stamp);
    NumericVector out(a.values.size());
    auto blend = [&](std::size_t j, long double sign_b) {
        long double v0 = a.values[j];
        long double v1 = sign_b * static_cast<long double>(b.values[j]);
        return v0 + (v1 - v0) * w;
    };
    if (pose && a.values.size() == 7) {
        for (std::size_t j = 0; j < 3; ++j) out[j] = static_cast<double>(blend(j, 1.0L));
        long double dot = 0;
        for (std::size_t j = 3; j < 7; ++j) dot += static_cast<long double>(a.values[j]) * b.values[j];
        const long double sign = dot < 0 ? -1.0L : 1.0L;
        long double q[4];
        long double norm = 0;
        for (std::size_t j = 0; j < 4; ++j) {
            q[j] = blend(j + 3, sign);
            norm += q[j] * q[j];
        }
        norm = std::sqrt(norm);
        for (std::size_t j = 0; j < 4; ++j) out[j + 3] = static_cast<double>(norm > 0 ? q[j] / norm : q[j]);
    } else {
        for (std::size_t j = 0; j < out.size(); ++j) out[j] = static_cast<double>(blend(j, 1.0L));
    }
    return {std::move(out), near.stamp};
}

}  // namespace surgsync::offline
