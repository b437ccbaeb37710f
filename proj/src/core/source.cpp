#include "surgsync/core/source.hpp"

#include "surgsync/core/error.hpp"

#include <algorithm>

namespace surgsync {

std::optional<Sample> SampleSource::next() {
    if (closed_) throw Error("next_sample on a closed source '" + descriptor().stream_id + "'");
    return produce();
}

namespace {

class VectorSource final : public SampleSource {
public:
    VectorSource(StreamDescriptor desc, std::vector<Sample> samples)
        : desc_(std::move(desc)), samples_(std::move(samples)) {
        std::stable_sort(samples_.begin(), samples_.end(),
                         [](const Sample& a, const Sample& b) { return a.stamp < b.stamp; });
        for (const auto& s : samples_)
            if (!kind_matches(desc_, s))
                throw Error("sample payload does not match stream '" + desc_.stream_id + "'");
    }

    const StreamDescriptor& descriptor() const override { return desc_; }

protected:
    std::optional<Sample> produce() override {
        if (pos_ >= samples_.size()) return std::nullopt;
        return samples_[pos_++];
    }

private:
    StreamDescriptor desc_;
    std::vector<Sample> samples_;
    std::size_t pos_ = 0;
};

}  // namespace

SourcePtr make_vector_source(StreamDescriptor desc, std::vector<Sample> samples) {
    return std::make_unique<VectorSource>(std::move(desc), std::move(samples));
}

}  // namespace surgsync
