#include "fixtures.hpp"

#include "surgsync/core/error.hpp"
#include "surgsync/core/png_io.hpp"
#include "surgsync/dataset/kin_record.hpp"
#include "surgsync/dataset/manifest.hpp"
#include "surgsync/dataset/reformat.hpp"
#include "surgsync/dataset/replay_source.hpp"
#include "surgsync/recorder/online_recorder.hpp"
#include "surgsync/recorder/online_session.hpp"

#include <fstream>

#include <doctest.h>

using namespace surgsync;
using namespace surgsync::testing;
namespace fs = std::filesystem;

namespace {

std::vector<StreamDescriptor> packet_streams() {
    return {image_desc("cam_left", View::left, 30, 6, 4), image_desc("cam_right", View::right, 30, 6, 4),
            numeric_desc("kin", 1000, 2), latched_desc("contact", 10, {100.0})};
}

SyncedPacket make_packet(Timestamp ref, double v) {
    auto streams = packet_streams();
    SyncedPacket p;
    p.ref_stamp = ref;
    p.images.push_back({"cam_left", "left", image_sample(streams[0], ref, 10).image(), ref});
    p.images.push_back({"cam_right", "right", image_sample(streams[1], ref, 20).image(), ref + 1000});
    p.matched["kin"] = NumericMatch{{v, v / 3.0}, ref + 2'000'000, 2'000'000};
    p.latched["contact"] = LatchedValue{{300.0}, ref - 5'000'000};
    return p;
}

RunManifest base_manifest(const std::string& id) {
    RunManifest m;
    m.run_id = id;
    m.streams = packet_streams();
    m.sync.reference_stream = "cam_left";
    return m;
}

std::vector<Sample> drain(SampleSource& s) {
    std::vector<Sample> out;
    while (auto x = s.next()) out.push_back(std::move(*x));
    return out;
}

}  // namespace

TEST_CASE("packet record round-trips bit-exactly") {
    auto p = make_packet(Timestamp{1'000'000'123}, 0.1);
    p.latched["other"] = LatchedValue{{7.0}, std::nullopt};
    auto back = decode_packet_record(encode_packet_record(p));
    CHECK(back.ref_stamp == p.ref_stamp);
    REQUIRE(back.images.size() == 2);
    CHECK(back.images[1].stamp == p.images[1].stamp);
    CHECK(back.matched.at("kin").values == p.matched.at("kin").values);
    CHECK(back.matched.at("kin").delta_t == 2'000'000);
    CHECK(back.latched.at("contact").stamp == p.latched.at("contact").stamp);
    CHECK_FALSE(back.latched.at("other").stamp.has_value());
}

TEST_CASE("written packets become indexed frames and one record line per packet") {
    TempDir dir("reformat");
    const auto temp = dir / "tmp";
    fs::create_directories(temp);
    std::vector<Timestamp> refs{Timestamp{3'000'000'000}, Timestamp{1'000'000'000}, Timestamp{2'000'000'000}};
    for (std::size_t i = 0; i < refs.size(); ++i) online::write_packet(make_packet(refs[i], double(i)), temp);

    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(temp)) names.push_back(e.path().filename().string());
    CHECK(names.size() == 3);
    for (const auto& n : names) CHECK(is_packet_folder_name(n));
    CHECK(fs::exists(temp / folder_name(refs[0]) / "left.png"));
    CHECK(fs::exists(temp / folder_name(refs[0]) / "right.png"));
    CHECK(fs::exists(temp / folder_name(refs[0]) / kPacketRecordFile));

    auto m = reformat_data_storage(temp, dir / "run_a", base_manifest("a"));
    CHECK(m.packet_count == 3);
    CHECK(m.ref_stamps == std::vector<Timestamp>{refs[1], refs[2], refs[0]});
    CHECK_FALSE(fs::exists(temp));
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(fs::exists(layout::frame_path(dir / "run_a", "left", i)));
        CHECK(fs::exists(layout::frame_path(dir / "run_a", "right", i)));
    }
    auto kin = read_records(layout::records_path(dir / "run_a", "kin"));
    REQUIRE(kin.size() == 3);
    CHECK(kin[0].values[0] == 1.0);  // written second, earliest stamp
    CHECK(kin[0].stamp == refs[1]);
    CHECK(kin[0].sample_stamp() == refs[1] + 2'000'000);
    auto contact = read_records(layout::records_path(dir / "run_a", "contact"));
    CHECK(contact[0].delta_t == -5'000'000);
    CHECK(validate_run(dir / "run_a").empty());
    auto loaded = read_manifest(dir / "run_a");
    CHECK(loaded.packet_count == 3);
    CHECK(loaded.ref_stamps == m.ref_stamps);
}

TEST_CASE("no packet folders give a valid empty run") {
    TempDir dir("reformat");
    fs::create_directories(dir / "tmp");
    auto m = reformat_data_storage(dir / "tmp", dir / "run_e", base_manifest("e"));
    CHECK(m.packet_count == 0);
    CHECK(validate_run(dir / "run_e").empty());
}

TEST_CASE("incomplete folders abort reformatting and are removed by cleanup") {
    TempDir dir("reformat");
    const auto temp = dir / "tmp";
    fs::create_directories(temp);
    online::write_packet(make_packet(Timestamp{1'000}, 1), temp);
    online::write_packet(make_packet(Timestamp{2'000}, 2), temp);
    fs::remove(temp / folder_name(Timestamp{2'000}) / kPacketRecordFile);
    CHECK_THROWS_AS(reformat_data_storage(temp, dir / "run_x", base_manifest("x")), Error);
    CHECK(fs::exists(temp / folder_name(Timestamp{2'000})));
    CHECK_FALSE(fs::exists(dir / "run_x"));

    CHECK(remove_incomplete_folders(temp, packet_streams()) == 1);
    auto m = reformat_data_storage(temp, dir / "run_x", base_manifest("x"));
    CHECK(m.packet_count == 1);
}

TEST_CASE("validation flags induced faults") {
    TempDir dir("validate");
    const auto run = dir / "run_v";
    write_crafted_run(run, {Timestamp{1'000'000'000}, Timestamp{1'100'000'000}, Timestamp{1'200'000'000}},
                      {{"kin", {1, -2, 3}}});
    CHECK(validate_run(run).empty());

    SUBCASE("deleted frame") {
        fs::remove(layout::frame_path(run, "left", 1));
        CHECK_FALSE(validate_run(run).empty());
    }
    SUBCASE("forged delta beyond tolerance") {
        auto lines = read_records(layout::records_path(run, "kin"));
        lines[2].delta_t = 10'000'001;
        std::ofstream os(layout::records_path(run, "kin"));
        for (const auto& l : lines) os << encode_record_line(l) << '\n';
        os.close();
        auto v = validate_run(run);
        REQUIRE(v.size() == 1);
        CHECK(v[0].find("tolerance") != std::string::npos);
    }
    SUBCASE("delta exactly at tolerance is admitted") {
        auto lines = read_records(layout::records_path(run, "kin"));
        lines[2].delta_t = -10'000'000;
        std::ofstream os(layout::records_path(run, "kin"));
        for (const auto& l : lines) os << encode_record_line(l) << '\n';
        os.close();
        CHECK(validate_run(run).empty());
    }
    SUBCASE("record stamp differs from its frame") {
        auto lines = read_records(layout::records_path(run, "kin"));
        lines[0].stamp = lines[0].stamp + 1;
        std::ofstream os(layout::records_path(run, "kin"));
        for (const auto& l : lines) os << encode_record_line(l) << '\n';
        os.close();
        CHECK_FALSE(validate_run(run).empty());
    }
    SUBCASE("missing record line") {
        auto lines = read_records(layout::records_path(run, "kin"));
        std::ofstream os(layout::records_path(run, "kin"));
        for (std::size_t i = 0; i + 1 < lines.size(); ++i) os << encode_record_line(lines[i]) << '\n';
        os.close();
        CHECK_FALSE(validate_run(run).empty());
    }
    SUBCASE("unreadable directory") { CHECK_THROWS_AS(validate_run(dir / "nope"), IoError); }
}

TEST_CASE("offline runs must keep uniform spacing") {
    TempDir dir("validate");
    write_crafted_run(dir / "run_u", {Timestamp{0}, Timestamp{100'000'000}, Timestamp{200'000'000}}, {{"kin", {1, 2, 3}}},
                      RecorderMode::offline_matched);
    CHECK(validate_run(dir / "run_u").empty());
    write_crafted_run(dir / "run_n", {Timestamp{0}, Timestamp{100'000'000}, Timestamp{200'000'002}}, {{"kin", {1, 2, 3}}},
                      RecorderMode::offline_matched);
    CHECK_FALSE(validate_run(dir / "run_n").empty());
}

TEST_CASE("replaying a kinematic log yields the recorded samples") {
    TempDir dir("replay");
    KinLog log{"kin", 2, {{Timestamp{10}, {1, 2}}, {Timestamp{20}, {3, 4}}, {Timestamp{30}, {5, 6}}}};
    auto bytes = encode_kin_binary(log);
    write_file_bytes(dir / "kin.sskb", bytes);
    auto samples = drain(*open_kin_file_source(dir / "kin.sskb", numeric_desc("kin", 100, 2)));
    REQUIRE(samples.size() == 3);
    CHECK(samples[1].stamp == Timestamp{20});
    CHECK(samples[1].values() == std::vector<double>{3, 4});

    convert_binary_to_readable(dir / "kin.sskb", dir / "kin.jsonl");
    auto readable = drain(*open_kin_file_source(dir / "kin.jsonl", numeric_desc("kin", 100, 2)));
    REQUIRE(readable.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(readable[i].stamp == samples[i].stamp);
        CHECK(readable[i].values() == samples[i].values());
    }

    write_file_bytes(dir / "empty.sskb", encode_kin_binary(KinLog{"kin", 2, {}}));
    CHECK(drain(*open_kin_file_source(dir / "empty.sskb", numeric_desc("kin", 100, 2))).empty());
    CHECK_THROWS(open_replay_source(dir.path(), "kin"));
}

TEST_CASE("re-recording a replayed run reproduces its content") {
    TempDir dir("replay");
    const Nanos span = 2'000'000'000;
    auto record = [&](std::vector<SourcePtr> sources, const std::string& id) {
        online::OnlineRunOptions opts;
        opts.out_root = dir.path();
        opts.run_id = id;
        opts.speed = 0;
        return online::record_online(std::move(sources), opts);
    };
    std::vector<SourcePtr> sources;
    sources.push_back(open_synthetic_source(synth(image_desc("cam_left", View::left, 30), 1), {Timestamp::from_seconds(1), span}));
    sources.push_back(open_synthetic_source(synth(numeric_desc("kin", 1000, 3), 2), {Timestamp::from_seconds(1), span}));
    sources.push_back(open_synthetic_source(synth(latched_desc("contact", 50, {5.0}), 3, 0.0), {Timestamp::from_seconds(1), span}));
    auto first = record(std::move(sources), "one");
    REQUIRE(first.manifest.packet_count > 50);

    std::vector<SourcePtr> replay;
    for (const auto& d : first.manifest.streams) replay.push_back(open_replay_source(first.run_dir, d.stream_id));
    auto frames = drain(*open_replay_source(first.run_dir, "cam_left"));
    CHECK(frames.size() == first.manifest.packet_count);
    for (std::size_t i = 0; i < frames.size(); ++i) CHECK(frames[i].stamp == first.manifest.ref_stamps[i]);

    auto second = record(std::move(replay), "two");
    CHECK(canonical_tree(first.run_dir, "one") == canonical_tree(second.run_dir, "two"));
}

TEST_CASE("cut-off before the first frame gives an empty valid run") {
    TempDir dir("cutoff");
    std::vector<SourcePtr> sources;
    sources.push_back(open_synthetic_source(synth(image_desc("cam_left", View::left, 30), 1, 0.0),
                                            {Timestamp::from_seconds(2), 1'000'000'000}));
    sources.push_back(open_synthetic_source(synth(numeric_desc("kin", 1000), 2), {Timestamp::from_seconds(1), 2'000'000'000}));
    online::OnlineRunOptions opts;
    opts.out_root = dir.path();
    opts.run_id = "c";
    opts.speed = 0;
    opts.epoch = Timestamp::from_seconds(1);
    opts.duration = 500'000'000;
    auto res = online::record_online(std::move(sources), opts);
    CHECK(res.manifest.packet_count == 0);
    CHECK(validate_run(res.run_dir).empty());
}
