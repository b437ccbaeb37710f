#pragma once

#include "surgsync/core/image.hpp"
#include "surgsync/core/timestamp.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace surgsync {

enum class StreamKind { image, numeric, latched_numeric };
enum class View { left, right, side };

std::string_view to_string(StreamKind k);
std::string_view to_string(View v);
StreamKind stream_kind_from_string(std::string_view s);
View view_from_string(std::string_view s);

struct StreamDescriptor {
    std::string stream_id;
    StreamKind kind = StreamKind::numeric;
    double nominal_rate_hz = 1.0;
    int arity = 1;                 // numeric kinds only
    std::optional<View> view;      // image kind only

    // Image geometry for synthetic sources.
    int width = 64;
    int height = 48;
    int channels = 3;

    // Seven values: position xyz followed by a unit quaternion wxyz.
    bool pose = false;

    // Held value reported for a latched stream before its first sample.
    std::vector<double> latched_default;

    bool is_image() const { return kind == StreamKind::image; }
    bool is_latched() const { return kind == StreamKind::latched_numeric; }
    bool is_numeric() const { return kind != StreamKind::image; }

    /// View name used for on-disk frame stores.
    std::string view_name() const;

    /// Throws Error when a field is out of range.
    void validate() const;
};

using NumericVector = std::vector<double>;
using Payload = std::variant<ImageFrame, NumericVector>;

struct Sample {
    std::string stream_id;
    Timestamp stamp;
    Payload payload;

    bool is_image() const { return std::holds_alternative<ImageFrame>(payload); }
    const ImageFrame& image() const { return std::get<ImageFrame>(payload); }
    const NumericVector& values() const { return std::get<NumericVector>(payload); }
};

/// True when the payload alternative agrees with the descriptor kind.
bool kind_matches(const StreamDescriptor& d, const Sample& s);

}  // namespace surgsync
