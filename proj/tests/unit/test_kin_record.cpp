#include "fixtures.hpp"
#include "oracles.hpp"

#include "surgsync/core/error.hpp"
#include "surgsync/core/png_io.hpp"
#include "surgsync/dataset/kin_record.hpp"

#include <cmath>
#include <limits>
#include <random>

#include <doctest.h>

using namespace surgsync;
using namespace surgsync::testing;

namespace {

KinLog random_log(std::mt19937_64& rng, int arity, std::size_t n) {
    KinLog log{"psm1/measured_cp", arity, {}};
    std::int64_t t = -static_cast<std::int64_t>(rng() % 1000);
    for (std::size_t i = 0; i < n; ++i) {
        t += 1 + static_cast<std::int64_t>(rng() % 2'000'000);
        KinRecord r{Timestamp{t}, {}};
        for (int k = 0; k < arity; ++k) {
            double v = std::bit_cast<double>(rng());
            if (std::isnan(v)) v = std::numeric_limits<double>::quiet_NaN();
            r.values.push_back(v);
        }
        log.records.push_back(std::move(r));
    }
    return log;
}

}  // namespace

TEST_CASE("binary layout matches a field-by-field encoding") {
    KinLog log{"arm", 2, {{Timestamp{-5}, {1.5, -0.0}}, {Timestamp{7}, {std::numeric_limits<double>::infinity(), 3.25}}}};
    auto expected = oracle::sskb_bytes("arm", 2, {{-5, {1.5, -0.0}}, {7, {std::numeric_limits<double>::infinity(), 3.25}}});
    CHECK(encode_kin_binary(log) == expected);
    CHECK(kin_header_size("arm") == 12);
    CHECK(kin_record_size(2) == 24);
    CHECK(expected.size() == kin_header_size("arm") + 2 * kin_record_size(2));
}

TEST_CASE("binary and readable forms round-trip byte-identically") {
    std::mt19937_64 rng(17);
    for (int arity : {1, 3, 7}) {
        auto log = random_log(rng, arity, 500);
        auto bin = encode_kin_binary(log);
        auto text = encode_kin_readable(decode_kin_binary(bin));
        CHECK(encode_kin_binary(decode_kin_readable(text)) == bin);
    }
}

TEST_CASE("header-only file is an empty log") {
    KinLog log{"t", 3, {}};
    auto bin = encode_kin_binary(log);
    CHECK(bin.size() == kin_header_size("t"));
    auto back = decode_kin_binary(bin);
    CHECK(back.records.empty());
    CHECK(back.arity == 3);
    auto text = encode_kin_readable(back);
    CHECK(decode_kin_readable(text).records.empty());
}

TEST_CASE("truncation reports the offset of the incomplete record") {
    std::mt19937_64 rng(23);
    auto log = random_log(rng, 3, 20);
    auto bin = encode_kin_binary(log);
    const std::size_t h = kin_header_size(log.topic), r = kin_record_size(3);
    for (std::size_t cut = h; cut < bin.size(); ++cut) {
        std::span<const std::uint8_t> part(bin.data(), cut);
        const std::size_t whole = (cut - h) / r;
        if ((cut - h) % r == 0) {
            CHECK(decode_kin_binary(part).records.size() == whole);
            continue;
        }
        try {
            decode_kin_binary(part);
            FAIL("truncated input decoded");
        } catch (const CorruptFileError& e) {
            CHECK(e.offset() == h + whole * r);
        }
    }
}

TEST_CASE("corrupt headers and disordered stamps are rejected") {
    auto bin = encode_kin_binary(KinLog{"x", 1, {{Timestamp{1}, {1}}, {Timestamp{2}, {2}}}});
    auto bad_magic = bin;
    bad_magic[0] = 'X';
    CHECK_THROWS_AS(decode_kin_binary(bad_magic), CorruptFileError);
    auto bad_version = bin;
    bad_version[4] = 2;
    CHECK_THROWS_AS(decode_kin_binary(bad_version), CorruptFileError);
    auto disordered = oracle::sskb_bytes("x", 1, {{5, {1}}, {5, {2}}});
    try {
        decode_kin_binary(disordered);
        FAIL("equal stamps accepted");
    } catch (const CorruptFileError& e) {
        CHECK(e.offset() == kin_header_size("x") + kin_record_size(1));
    }
    CHECK_THROWS_AS(encode_kin_binary(KinLog{"x", 1, {{Timestamp{2}, {1}}, {Timestamp{1}, {2}}}}), Error);
    CHECK_THROWS_AS(encode_kin_binary(KinLog{"x", 2, {{Timestamp{2}, {1}}}}), Error);
}

TEST_CASE("readable form keeps non-finite values") {
    KinLog log{"x", 3,
               {{Timestamp{1},
                 {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::infinity(),
                  -std::numeric_limits<double>::infinity()}}}};
    auto back = decode_kin_readable(encode_kin_readable(log));
    REQUIRE(back.records.size() == 1);
    CHECK(std::isnan(back.records[0].values[0]));
    CHECK(back.records[0].values[1] == std::numeric_limits<double>::infinity());
    CHECK(back.records[0].values[2] == -std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS(decode_kin_readable("{\"stamp\":1,\"values\":[1]}\n"), CorruptFileError);
}

TEST_CASE("streaming writer produces the same bytes as the batch encoder") {
    TempDir dir("kin");
    std::mt19937_64 rng(29);
    auto log = random_log(rng, 7, 1000);
    {
        KinBinWriter w(dir / "a.sskb", log.topic, 7);
        for (const auto& r : log.records) w.append(r.stamp, r.values);
        CHECK(w.count() == 1000);
        CHECK_THROWS_AS(w.append(log.records.back().stamp, log.records.back().values), Error);
        std::vector<double> short_values{1.0};
        CHECK_THROWS_AS(w.append(Timestamp::max(), short_values), Error);
    }
    CHECK(read_file_bytes(dir / "a.sskb") == encode_kin_binary(log));
    convert_binary_to_readable(dir / "a.sskb", dir / "a.jsonl");
    convert_readable_to_binary(dir / "a.jsonl", dir / "b.sskb");
    CHECK(read_file_bytes(dir / "b.sskb") == read_file_bytes(dir / "a.sskb"));
    CHECK(encode_kin_binary(read_kin_readable(dir / "a.jsonl")) == encode_kin_binary(read_kin_binary(dir / "a.sskb")));
}
