#include "surgsync/post/contact.hpp"

#include "surgsync/core/error.hpp"

#include <cmath>

#include <fmt/format.h>

namespace surgsync::post {

std::vector<std::pair<Timestamp, bool>> binarize_contact(const std::vector<std::pair<Timestamp, double>>& raw,
                                                         const ContactConfig& cc) {
    if (!std::isfinite(cc.threshold)) throw Error("contact threshold must be finite");
    if (!(cc.hysteresis >= 0.0)) throw Error("contact hysteresis must be nonnegative");
    std::vector<std::pair<Timestamp, bool>> out;
    out.reserve(raw.size());
    bool state = false;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const double v = raw[i].second;
        if (i == 0 || !state)
            state = v >= cc.threshold;
        else
            state = !(v < cc.threshold - cc.hysteresis);
        out.emplace_back(raw[i].first, state);
    }
    return out;
}

double contact_accuracy(const std::vector<bool>& pred, const std::vector<bool>& gt) {
    if (pred.size() != gt.size())
        throw Error(fmt::format("contact_accuracy: {} predictions vs {} labels", pred.size(), gt.size()));
    if (pred.empty()) throw Error("contact_accuracy: empty series");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == gt[i];
    return static_cast<double>(hits) / static_cast<double>(pred.size());
}

std::size_t count_transitions(const std::vector<std::pair<Timestamp, bool>>& series) {
    std::size_t n = 0;
    for (std::size_t i = 1; i < series.size(); ++i) n += series[i].second != series[i - 1].second;
    return n;
}

}  // namespace surgsync::post
