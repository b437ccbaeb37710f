#pragma once

#include "surgsync/core/image.hpp"
#include "surgsync/core/stream.hpp"
#include "surgsync/core/timestamp.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace surgsync {

struct ImageMatch {
    std::string stream_id;
    std::string view;
    ImageFrame frame;
    Timestamp stamp;
};

struct NumericMatch {
    NumericVector values;
    Timestamp stamp;
    Nanos delta_t = 0;  // stamp - ref_stamp
};

struct LatchedValue {
    NumericVector values;
    std::optional<Timestamp> stamp;  // empty while the configured default is held
};

/// One reference frame plus everything matched to it.
struct SyncedPacket {
    Timestamp ref_stamp;
    std::vector<ImageMatch> images;
    std::map<std::string, NumericMatch> matched;
    std::map<std::string, LatchedValue> latched;
};

}  // namespace surgsync
