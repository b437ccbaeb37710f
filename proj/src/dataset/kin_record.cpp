#include "surgsync/dataset/kin_record.hpp"

#include "surgsync/core/error.hpp"
#include "surgsync/core/json_io.hpp"
#include "surgsync/core/png_io.hpp"

#include <bit>
#include <cstring>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace surgsync {

namespace {

constexpr std::uint8_t kMagic[4] = {'S', 'S', 'K', 'B'};

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint16_t get_u16(const std::uint8_t* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint64_t get_u64(const std::uint8_t* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
}

std::vector<std::uint8_t> header_bytes(const std::string& topic, int arity) {
    if (topic.size() > 0xffff) throw Error("topic name longer than 65535 bytes");
    if (arity < 1 || arity > 0xffff) throw Error(fmt::format("arity {} out of range", arity));
    std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
    out.push_back(kKinFormatVersion);
    put_u16(out, static_cast<std::uint16_t>(topic.size()));
    out.insert(out.end(), topic.begin(), topic.end());
    put_u16(out, static_cast<std::uint16_t>(arity));
    return out;
}

void append_record(std::vector<std::uint8_t>& out, Timestamp stamp, std::span<const double> values) {
    put_u64(out, static_cast<std::uint64_t>(stamp.nanos));
    for (double v : values) put_u64(out, std::bit_cast<std::uint64_t>(v));
}

}  // namespace

std::size_t kin_header_size(const std::string& topic) { return 4 + 1 + 2 + topic.size() + 2; }
std::size_t kin_record_size(int arity) { return 8 + 8 * static_cast<std::size_t>(arity); }

std::vector<std::uint8_t> encode_kin_binary(const KinLog& log) {
    auto out = header_bytes(log.topic, log.arity);
    out.reserve(out.size() + log.records.size() * kin_record_size(log.arity));
    for (std::size_t i = 0; i < log.records.size(); ++i) {
        const auto& r = log.records[i];
        if (static_cast<int>(r.values.size()) != log.arity)
            throw Error(fmt::format("record {} has {} values, arity is {}", i, r.values.size(), log.arity));
        if (i > 0 && !(log.records[i - 1].stamp < r.stamp))
            throw Error(fmt::format("record {} stamp not strictly increasing", i));
        append_record(out, r.stamp, r.values);
    }
    return out;
}

KinLog decode_kin_binary(std::span<const std::uint8_t> bytes) {
    const std::uint8_t* p = bytes.data();
    const std::size_t n = bytes.size();
    if (n < 7 || std::memcmp(p, kMagic, 4) != 0) throw CorruptFileError("missing SSKB magic", 0);
    if (p[4] != kKinFormatVersion)
        throw CorruptFileError(fmt::format("unsupported SSKB version {}", p[4]), 4);
    std::size_t topic_len = get_u16(p + 5);
    if (n < 7 + topic_len + 2) throw CorruptFileError("truncated SSKB header", 7);
    KinLog log;
    log.topic.assign(reinterpret_cast<const char*>(p + 7), topic_len);
    log.arity = get_u16(p + 7 + topic_len);
    if (log.arity < 1) throw CorruptFileError("SSKB arity is zero", 7 + topic_len);
    const std::size_t header = kin_header_size(log.topic);
    const std::size_t rec = kin_record_size(log.arity);
    const std::size_t body = n - header;
    const std::size_t whole = body / rec;
    if (body % rec != 0) {
        std::size_t offset = header + whole * rec;
        throw CorruptFileError(fmt::format("truncated record at byte offset {}", offset), offset);
    }
    log.records.reserve(whole);
    for (std::size_t i = 0; i < whole; ++i) {
        const std::uint8_t* r = p + header + i * rec;
        KinRecord k;
        k.stamp = Timestamp{static_cast<std::int64_t>(get_u64(r))};
        k.values.resize(static_cast<std::size_t>(log.arity));
        for (int j = 0; j < log.arity; ++j) k.values[static_cast<std::size_t>(j)] = std::bit_cast<double>(get_u64(r + 8 + 8 * j));
        if (!log.records.empty() && !(log.records.back().stamp < k.stamp)) {
            std::size_t offset = header + i * rec;
            throw CorruptFileError(fmt::format("non-increasing stamp at byte offset {}", offset), offset);
        }
        log.records.push_back(std::move(k));
    }
    return log;
}

KinLog read_kin_binary(const std::filesystem::path& path) {
    auto bytes = read_file_bytes(path);
    try {
        return decode_kin_binary(bytes);
    } catch (const CorruptFileError& e) {
        throw CorruptFileError(fmt::format("{}: {}", path.string(), e.what()), e.offset());
    }
}

std::string encode_kin_readable(const KinLog& log) {
    std::string out;
    nlohmann::json head{{"format", "sskb-readable"}, {"version", kKinFormatVersion},
                        {"topic", log.topic}, {"arity", log.arity}};
    out += head.dump();
    out += '\n';
    for (const auto& r : log.records) {
        nlohmann::json line{{"stamp", r.stamp.nanos}, {"values", encode_values(r.values)}};
        out += line.dump();
        out += '\n';
    }
    return out;
}

KinLog decode_kin_readable(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    KinLog log;
    bool have_header = false;
    try {
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            auto j = nlohmann::json::parse(line);
            if (!have_header) {
                if (j.value("format", "") != "sskb-readable") throw Error("missing readable header");
                log.topic = j.at("topic").get<std::string>();
                log.arity = j.at("arity").get<int>();
                have_header = true;
                continue;
            }
            KinRecord r{Timestamp{j.at("stamp").get<std::int64_t>()}, decode_values(j.at("values"))};
            if (static_cast<int>(r.values.size()) != log.arity) throw Error("value count != arity");
            if (!log.records.empty() && !(log.records.back().stamp < r.stamp))
                throw Error("stamps not strictly increasing");
            log.records.push_back(std::move(r));
        }
    } catch (const std::exception& e) {
        throw CorruptFileError(fmt::format("readable kinematics line {}: {}", lineno, e.what()), lineno);
    }
    if (!have_header) throw CorruptFileError("readable kinematics file has no header", 0);
    return log;
}

KinLog read_kin_readable(const std::filesystem::path& path) {
    auto bytes = read_file_bytes(path);
    return decode_kin_readable(std::string(bytes.begin(), bytes.end()));
}

void convert_binary_to_readable(const std::filesystem::path& in, const std::filesystem::path& out) {
    write_file_atomic(out, encode_kin_readable(read_kin_binary(in)));
}

void convert_readable_to_binary(const std::filesystem::path& in, const std::filesystem::path& out) {
    auto bytes = encode_kin_binary(read_kin_readable(in));
    write_file_atomic(out, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

KinBinWriter::KinBinWriter(const std::filesystem::path& path, std::string topic, int arity)
    : path_(path), arity_(arity) {
    auto head = header_bytes(topic, arity);
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_) throw IoError(fmt::format("cannot create {}", path.string()));
    out_.write(reinterpret_cast<const char*>(head.data()), static_cast<std::streamsize>(head.size()));
    scratch_.reserve(kin_record_size(arity));
}

KinBinWriter::~KinBinWriter() {
    try {
        close();
    } catch (...) {
    }
}

void KinBinWriter::append(Timestamp stamp, std::span<const double> values) {
    if (static_cast<int>(values.size()) != arity_)
        throw Error(fmt::format("{}: {} values for arity {}", path_.string(), values.size(), arity_));
    if (has_last_ && !(last_ < stamp))
        throw Error(fmt::format("{}: stamp {} not after {}", path_.string(), stamp.nanos, last_.nanos));
    scratch_.clear();
    append_record(scratch_, stamp, values);
    out_.write(reinterpret_cast<const char*>(scratch_.data()), static_cast<std::streamsize>(scratch_.size()));
    if (!out_) throw IoError(fmt::format("write failed for {}", path_.string()));
    last_ = stamp;
    has_last_ = true;
    ++count_;
}

void KinBinWriter::flush() {
    out_.flush();
    if (!out_) throw IoError(fmt::format("flush failed for {}", path_.string()));
}

void KinBinWriter::close() {
    if (!out_.is_open()) return;
    out_.flush();
    bool ok = static_cast<bool>(out_);
    out_.close();
    if (!ok) throw IoError(fmt::format("write failed for {}", path_.string()));
}

}  // namespace surgsync
