#include "surgsync/dataset/annotations.hpp"

#include "surgsync/core/png_io.hpp"
#include "surgsync/dataset/manifest.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <fmt/format.h>

namespace fs = std::filesystem;

namespace surgsync {

void to_json(nlohmann::json& j, const AnnotationSet& a) {
    auto contact = nlohmann::json::object();
    for (const auto& [arm, track] : a.contact) {
        auto arr = nlohmann::json::array();
        for (const auto& c : track) arr.push_back({{"start", c.start.nanos}, {"end", c.end.nanos}, {"value", c.value}});
        contact[arm] = std::move(arr);
    }
    auto phases = nlohmann::json::array();
    for (const auto& p : a.phases) phases.push_back({{"start", p.start.nanos}, {"end", p.end.nanos}, {"label", p.label}});
    j = nlohmann::json{{"contact", std::move(contact)},
                       {"phases", std::move(phases)},
                       {"annotator", a.annotator},
                       {"revision", a.revision}};
}

void from_json(const nlohmann::json& j, AnnotationSet& a) {
    a = AnnotationSet{};
    if (j.contains("contact"))
        for (const auto& [arm, track] : j["contact"].items()) {
            auto& out = a.contact[arm];
            for (const auto& c : track)
                out.push_back({Timestamp{c.at("start").get<std::int64_t>()}, Timestamp{c.at("end").get<std::int64_t>()},
                               c.value("value", true)});
        }
    if (j.contains("phases"))
        for (const auto& p : j["phases"])
            a.phases.push_back({Timestamp{p.at("start").get<std::int64_t>()}, Timestamp{p.at("end").get<std::int64_t>()},
                                p.at("label").get<std::string>()});
    a.annotator = j.value("annotator", "");
    a.revision = j.value("revision", std::int64_t{0});
}

AnnotationConflict::AnnotationConflict(std::int64_t expected, std::int64_t current)
    : Error(fmt::format("stale annotation revision {} (current {})", expected, current)), current_(current) {}

namespace {

template <typename Track>
void check_track(const Track& track, const std::string& name, std::vector<std::string>& out) {
    for (std::size_t i = 0; i < track.size(); ++i) {
        if (!(track[i].start < track[i].end))
            out.push_back(fmt::format("{}[{}]: start must be before end", name, i));
        if (i > 0 && track[i].start < track[i - 1].end)
            out.push_back(fmt::format("{}[{}]: overlaps or precedes the previous interval", name, i));
    }
}

fs::path annotations_file(const fs::path& run_dir) {
    return run_dir / layout::kAnnotations / layout::kAnnotationsFile;
}

class FileLock {
public:
    explicit FileLock(const fs::path& path) {
        fd_ = ::open(path.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
        if (fd_ < 0) throw IoError(fmt::format("cannot open lock file {}", path.string()));
        if (::flock(fd_, LOCK_EX) != 0) {
            ::close(fd_);
            throw IoError(fmt::format("cannot lock {}", path.string()));
        }
    }
    ~FileLock() {
        ::flock(fd_, LOCK_UN);
        ::close(fd_);
    }
    FileLock(const FileLock&) = delete;
    FileLock& operator=(const FileLock&) = delete;

private:
    int fd_ = -1;
};

}  // namespace

std::vector<std::string> annotation_violations(const AnnotationSet& a) {
    std::vector<std::string> out;
    for (const auto& [arm, track] : a.contact) {
        if (arm.empty()) out.push_back("contact track with empty arm name");
        check_track(track, "contact." + arm, out);
    }
    check_track(a.phases, "phases", out);
    for (std::size_t i = 0; i < a.phases.size(); ++i)
        if (a.phases[i].label.empty()) out.push_back(fmt::format("phases[{}]: empty label", i));
    return out;
}

AnnotationSet read_annotations(const fs::path& run_dir) {
    if (!fs::is_directory(run_dir)) throw IoError(fmt::format("run {} does not exist", run_dir.string()));
    auto path = annotations_file(run_dir);
    if (!fs::exists(path)) return {};
    auto bytes = read_file_bytes(path);
    try {
        return nlohmann::json::parse(bytes.begin(), bytes.end()).get<AnnotationSet>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(fmt::format("{}: {}", path.string(), e.what()));
    }
}

AnnotationSet write_annotations(const fs::path& run_dir, AnnotationSet a) {
    if (auto v = annotation_violations(a); !v.empty()) throw AnnotationInvalid(v.front());
    if (!fs::is_directory(run_dir)) throw IoError(fmt::format("run {} does not exist", run_dir.string()));
    fs::create_directories(run_dir / layout::kAnnotations);
    FileLock lock(run_dir / layout::kAnnotations / ".lock");
    auto current = read_annotations(run_dir);
    if (current.revision != a.revision) throw AnnotationConflict(a.revision, current.revision);
    a.revision = current.revision + 1;
    write_file_atomic(annotations_file(run_dir), nlohmann::json(a).dump(2) + "\n");
    return a;
}

bool contact_at(const AnnotationSet& a, const std::string& arm, Timestamp t) {
    auto it = a.contact.find(arm);
    if (it == a.contact.end()) return false;
    for (const auto& c : it->second)
        if (c.start <= t && t < c.end) return c.value;
    return false;
}

}  // namespace surgsync
