#include "surgsync/core/timestamp.hpp"

#include <cmath>

#include <fmt/format.h>

namespace surgsync {

Nanos ms_to_nanos(double ms) {
    return static_cast<Nanos>(std::llround(ms * 1e6));
}

std::string folder_name(Timestamp t) {
    return fmt::format("{:019d}", t.nanos);
}

}  // namespace surgsync
