#pragma once

#include "surgsync/core/error.hpp"
#include "surgsync/core/timestamp.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace surgsync {

struct ContactInterval {
    Timestamp start;
    Timestamp end;
    bool value = true;

    friend bool operator==(const ContactInterval&, const ContactInterval&) = default;
};

struct PhaseInterval {
    Timestamp start;
    Timestamp end;
    std::string label;

    friend bool operator==(const PhaseInterval&, const PhaseInterval&) = default;
};

/// Intervals are half-open [start, end); within a track they are ordered and
/// may touch but not overlap.
struct AnnotationSet {
    std::map<std::string, std::vector<ContactInterval>> contact;  // per arm
    std::vector<PhaseInterval> phases;
    std::string annotator;
    std::int64_t revision = 0;

    friend bool operator==(const AnnotationSet&, const AnnotationSet&) = default;
};

void to_json(nlohmann::json& j, const AnnotationSet& a);
void from_json(const nlohmann::json& j, AnnotationSet& a);

class AnnotationInvalid : public Error {
public:
    using Error::Error;
};

class AnnotationConflict : public Error {
public:
    AnnotationConflict(std::int64_t expected, std::int64_t current);
    std::int64_t current() const { return current_; }

private:
    std::int64_t current_;
};

std::vector<std::string> annotation_violations(const AnnotationSet& a);

/// Missing file reads as an empty set at revision 0.
AnnotationSet read_annotations(const std::filesystem::path& run_dir);

/// `a.revision` must equal the stored revision; the stored copy gets
/// revision + 1 and is returned. Throws AnnotationInvalid before touching disk
/// and AnnotationConflict on a stale revision. Writes are atomic and
/// serialized through an advisory file lock.
AnnotationSet write_annotations(const std::filesystem::path& run_dir, AnnotationSet a);

/// Whether `t` falls inside a contact interval with value=true for `arm`.
bool contact_at(const AnnotationSet& a, const std::string& arm, Timestamp t);

}  // namespace surgsync
