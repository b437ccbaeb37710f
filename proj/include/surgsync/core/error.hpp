#pragma once

#include <stdexcept>
#include <cstdint>
#include <string>

namespace surgsync {

/// Domain or validation failure (bad config, precondition, corrupt input).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Filesystem failure.
class IoError : public Error {
public:
    using Error::Error;
};

/// Binary or text file whose content violates its format.
class CorruptFileError : public Error {
public:
    CorruptFileError(const std::string& what, std::uint64_t offset)
        : Error(what), offset_(offset) {}

    std::uint64_t offset() const noexcept { return offset_; }

private:
    std::uint64_t offset_;
};

}  // namespace surgsync
