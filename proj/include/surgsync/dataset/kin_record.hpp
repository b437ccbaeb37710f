#pragma once

// Append-only binary kinematic log ("FastBinWriter" format).
//
//   header:  "SSKB" | u8 version = 0x01 | u16le topic_len | topic (UTF-8) | u16le arity
//   records: i64le stamp_ns | arity x f64le value
//
// File length is always header + n * (8 + 8 * arity); record stamps are
// strictly increasing.

#include "surgsync/core/timestamp.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

namespace surgsync {

inline constexpr std::uint8_t kKinFormatVersion = 0x01;

struct KinRecord {
    Timestamp stamp;
    std::vector<double> values;

    friend bool operator==(const KinRecord&, const KinRecord&) = default;
};

struct KinLog {
    std::string topic;
    int arity = 1;
    std::vector<KinRecord> records;
};

std::size_t kin_header_size(const std::string& topic);
std::size_t kin_record_size(int arity);

std::vector<std::uint8_t> encode_kin_binary(const KinLog& log);

/// Throws CorruptFileError with the byte offset of the first bad record (or
/// of the header field that failed).
KinLog decode_kin_binary(std::span<const std::uint8_t> bytes);
KinLog read_kin_binary(const std::filesystem::path& path);

/// JSON Lines: a header line {"format":"sskb-readable","version":1,"topic","arity"}
/// followed by one {"stamp","values"} object per record.
std::string encode_kin_readable(const KinLog& log);
KinLog decode_kin_readable(const std::string& text);
KinLog read_kin_readable(const std::filesystem::path& path);

void convert_binary_to_readable(const std::filesystem::path& in, const std::filesystem::path& out);
void convert_readable_to_binary(const std::filesystem::path& in, const std::filesystem::path& out);

/// Streaming appender. Not thread-safe; one writer per file.
class KinBinWriter {
public:
    KinBinWriter(const std::filesystem::path& path, std::string topic, int arity);
    ~KinBinWriter();
    KinBinWriter(const KinBinWriter&) = delete;
    KinBinWriter& operator=(const KinBinWriter&) = delete;

    void append(Timestamp stamp, std::span<const double> values);
    void flush();
    void close();

    std::uint64_t count() const { return count_; }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    std::ofstream out_;
    int arity_;
    std::uint64_t count_ = 0;
    bool has_last_ = false;
    Timestamp last_;
    std::vector<std::uint8_t> scratch_;
};

}  // namespace surgsync
