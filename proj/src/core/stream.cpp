#include "surgsync/core/stream.hpp"

#include "surgsync/core/error.hpp"

#include <cmath>

#include <fmt/format.h>

namespace surgsync {

std::string_view to_string(StreamKind k) {
    switch (k) {
        case StreamKind::image: return "image";
        case StreamKind::numeric: return "numeric";
        case StreamKind::latched_numeric: return "latched_numeric";
    }
    return "numeric";
}

std::string_view to_string(View v) {
    switch (v) {
        case View::left: return "left";
        case View::right: return "right";
        case View::side: return "side";
    }
    return "left";
}

StreamKind stream_kind_from_string(std::string_view s) {
    if (s == "image") return StreamKind::image;
    if (s == "numeric") return StreamKind::numeric;
    if (s == "latched_numeric") return StreamKind::latched_numeric;
    throw Error(fmt::format("unknown stream kind '{}'", s));
}

View view_from_string(std::string_view s) {
    if (s == "left") return View::left;
    if (s == "right") return View::right;
    if (s == "side") return View::side;
    throw Error(fmt::format("unknown view '{}'", s));
}

std::string StreamDescriptor::view_name() const {
    return view ? std::string(to_string(*view)) : stream_id;
}

void StreamDescriptor::validate() const {
    if (stream_id.empty()) throw Error("stream_id must not be empty");
    if (stream_id.find_first_of("/\\") != std::string::npos || stream_id == "." || stream_id == "..")
        throw Error(fmt::format("stream_id '{}' is not a valid file name", stream_id));
    if (!(nominal_rate_hz > 0.0) || !std::isfinite(nominal_rate_hz))
        throw Error(fmt::format("stream '{}': nominal_rate_hz must be positive", stream_id));
    if (is_image()) {
        if (!view) throw Error(fmt::format("image stream '{}' needs a view", stream_id));
        if (width < 1 || height < 1) throw Error(fmt::format("image stream '{}': bad size", stream_id));
        if (channels != 1 && channels != 3)
            throw Error(fmt::format("image stream '{}': channels must be 1 or 3", stream_id));
    } else {
        if (arity < 1 || arity > 65535)
            throw Error(fmt::format("stream '{}': arity must be in [1, 65535]", stream_id));
        if (pose && arity != 7)
            throw Error(fmt::format("pose stream '{}' must have arity 7", stream_id));
        if (!latched_default.empty() && static_cast<int>(latched_default.size()) != arity)
            throw Error(fmt::format("stream '{}': latched_default length != arity", stream_id));
    }
}

bool kind_matches(const StreamDescriptor& d, const Sample& s) {
    if (d.is_image()) return s.is_image();
    return !s.is_image() && static_cast<int>(s.values().size()) == d.arity;
}

}  // namespace surgsync
