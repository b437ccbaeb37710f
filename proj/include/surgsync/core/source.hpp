#pragma once

#include "surgsync/core/stream.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace surgsync {

/// Pull-based producer of samples for one stream, in nondecreasing stamp
/// order. One consumer at a time.
class SampleSource {
public:
    virtual ~SampleSource() = default;

    virtual const StreamDescriptor& descriptor() const = 0;

    /// Next sample or std::nullopt at end of stream. Throws Error once closed.
    std::optional<Sample> next();

    void close() { closed_ = true; }
    bool closed() const { return closed_; }

protected:
    virtual std::optional<Sample> produce() = 0;

private:
    bool closed_ = false;
};

using SourcePtr = std::unique_ptr<SampleSource>;

/// In-memory source over a fixed sample list, sorted by stamp on construction.
SourcePtr make_vector_source(StreamDescriptor desc, std::vector<Sample> samples);

}  // namespace surgsync
