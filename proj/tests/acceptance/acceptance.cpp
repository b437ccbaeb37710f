// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when
// any criterion fails.

#include "fixtures.hpp"
#include "oracles.hpp"

#include "surgsync/analysis/latency.hpp"
#include "surgsync/cli/cli.hpp"
#include "surgsync/core/error.hpp"
#include "surgsync/dataset/kin_record.hpp"
#include "surgsync/dataset/manifest.hpp"
#include "surgsync/dataset/reformat.hpp"
#include "surgsync/post/contact.hpp"
#include "surgsync/post/depth.hpp"
#include "surgsync/post/image_ops.hpp"
#include "surgsync/recorder/interpolation.hpp"
#include "surgsync/recorder/offline_recorder.hpp"
#include "surgsync/recorder/online_session.hpp"

#include <fmt/core.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>

namespace fs = std::filesystem;
using namespace surgsync;
using namespace surgsync::testing;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) {
            pass = false;
            detail = what;
        }
    }
};

const Timestamp kEpoch = Timestamp::from_seconds(1);
constexpr Nanos kSecond = 1'000'000'000;

std::vector<SourcePtr> surgical_streams(Nanos span, std::uint64_t seed) {
    std::vector<SourcePtr> s;
    s.push_back(open_synthetic_source(synth(image_desc("cam_left", View::left, 60, 32, 24), seed), {kEpoch, span}));
    const char* arms[] = {"psm1", "psm2", "ecm"};
    for (int k = 0; k < 3; ++k)
        s.push_back(open_synthetic_source(synth(numeric_desc(arms[k], 1000, 7), seed + 1 + k, 1.0), {kEpoch, span}));
    return s;
}

// Realtime online run shared by the soundness and oracle checks.
struct OnlineRun {
    online::OnlineRunResult result;
    double wall_s = 0;
};

OnlineRun record_realtime(const fs::path& out) {
    online::OnlineRunOptions opts;
    opts.out_root = out;
    opts.run_id = "accept";
    opts.epoch = kEpoch;
    opts.speed = 1.0;
    opts.duration = 30 * kSecond;
    opts.raw_tee = true;
    opts.sync.tolerance_ms = 10.0;
    const auto t0 = std::chrono::steady_clock::now();
    auto res = online::record_online(surgical_streams(*opts.duration, 20260101), opts);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(res), wall};
}

Verdict tolerance_soundness(const OnlineRun& run) {
    Verdict v;
    const auto& m = run.result.manifest;
    std::size_t checked = 0;
    Nanos worst = 0;
    for (const auto& d : m.streams) {
        if (!d.is_numeric() || d.is_latched()) continue;
        for (const auto& r : read_records(layout::records_path(run.result.run_dir, d.stream_id))) {
            v.require(r.delta_t.has_value(), d.stream_id + ": record without delta_t");
            if (!r.delta_t) continue;
            worst = std::max(worst, std::abs(*r.delta_t));
            v.require(std::abs(*r.delta_t) <= 10'000'000, fmt::format("{}: |dt| {} ns", d.stream_id, *r.delta_t));
            ++checked;
        }
    }
    const auto violations = validate_run(run.result.run_dir);
    v.require(m.packet_count > 0, "no packets persisted");
    v.require(violations.empty(), violations.empty() ? "" : violations.front());
    v.require(run.wall_s < 60.0, fmt::format("runtime {:.1f} s", run.wall_s));
    if (v.pass)
        v.detail = fmt::format("{} packets, {} matches, max |dt| {:.3f} ms, {} rejected, runtime {:.1f} s", m.packet_count,
                               checked, worst / 1e6, m.reject_count, run.wall_s);
    return v;
}

Verdict oracle_equivalence(const OnlineRun& run) {
    Verdict v;
    const auto& res = run.result;
    v.require(res.stats.drop_count == 0, fmt::format("drop_count {}", res.stats.drop_count));
    v.require(res.raw_dir.has_value(), "no raw logs");
    if (!v.pass) return v;
    std::vector<Timestamp> refs;
    {
        std::ifstream in(*res.raw_dir / "cam_left.stamps");
        for (std::int64_t t; in >> t;) refs.push_back(Timestamp{t});
    }
    std::vector<oracle::RawStream> raw;
    for (const auto& d : res.manifest.streams) {
        if (!d.is_numeric() || d.is_latched()) continue;
        oracle::RawStream s{d.stream_id, {}};
        for (const auto& r : read_kin_binary(*res.raw_dir / (d.stream_id + ".sskb")).records) s.stamps.push_back(r.stamp);
        raw.push_back(std::move(s));
    }
    const auto expected =
        oracle::match_within_tolerance(refs, raw, res.manifest.sync.tolerance_ns(), res.manifest.t_end);
    v.require(expected.size() == res.manifest.packet_count,
              fmt::format("oracle {} packets, recorder {}", expected.size(), res.manifest.packet_count));
    if (!v.pass) return v;
    for (std::size_t s = 0; s < raw.size(); ++s) {
        const auto lines = read_records(layout::records_path(res.run_dir, raw[s].id));
        v.require(lines.size() == expected.size(), raw[s].id + ": record count");
        for (std::size_t i = 0; v.pass && i < lines.size(); ++i) {
            v.require(lines[i].stamp == expected[i].ref, fmt::format("{}: ref {} differs", raw[s].id, i));
            v.require(lines[i].sample_stamp() == expected[i].matched[s], fmt::format("{}: match {} differs", raw[s].id, i));
        }
    }
    if (v.pass) v.detail = fmt::format("{} packets x {} streams identical, drop_count 0", expected.size(), raw.size());
    return v;
}

Verdict offline_uniformity(const fs::path& dir) {
    Verdict v;
    offline::OfflineCaptureOptions o;
    o.fps = 10;
    o.run_id = "uniform";
    o.epoch = kEpoch;
    o.speed = 0;
    o.duration = 20 * kSecond;
    auto run = offline::record_offline(surgical_streams(*o.duration, 77), dir / "capture_uniform", o);
    offline::decouple_and_convert(run);
    auto m = offline::match_offline(run, SyncConfig{}, offline::InterpolationRule::nearest, dir / "run_uniform");
    Nanos worst = 0;
    for (std::size_t i = 1; i < m.ref_stamps.size(); ++i)
        worst = std::max(worst, std::abs((m.ref_stamps[i] - m.ref_stamps[i - 1]) - 100'000'000));
    v.require(m.ref_stamps.size() >= 200, fmt::format("{} frames", m.ref_stamps.size()));
    v.require(worst <= 1, fmt::format("spacing deviates by {} ns", worst));
    const auto f = analysis::frequency_stats(dir / "run_uniform");
    v.require(f.std_hz == 0.0, fmt::format("std_hz {}", f.std_hz));
    if (v.pass)
        v.detail = fmt::format("{} frames, max spacing error {} ns, {} Hz, std_hz 0", m.ref_stamps.size(), worst, f.mean_hz);
    return v;
}

Verdict binary_round_trip() {
    Verdict v;
    std::mt19937_64 rng(100000);
    KinLog log{"psm1/measured_js", 6, {}};
    std::int64_t t = 0;
    for (int i = 0; i < 100'000; ++i) {
        t += 1 + static_cast<std::int64_t>(rng() % 2'000'000);
        KinRecord r{Timestamp{t}, {}};
        for (int k = 0; k < log.arity; ++k) {
            double x = std::bit_cast<double>(rng());
            if (std::isnan(x)) x = std::numeric_limits<double>::quiet_NaN();
            r.values.push_back(x);
        }
        log.records.push_back(std::move(r));
    }
    const auto bin = encode_kin_binary(log);
    const auto again = encode_kin_binary(decode_kin_readable(encode_kin_readable(decode_kin_binary(bin))));
    v.require(again == bin, "binary -> readable -> binary differs");

    const std::size_t h = kin_header_size(log.topic), rs = kin_record_size(log.arity);
    v.require(bin.size() == h + log.records.size() * rs, "length formula");
    // Cuts inside the final record at sampled boundaries, including both ends.
    std::vector<std::size_t> boundaries{0, 1, log.records.size() - 1};
    for (int i = 0; i < 300; ++i) boundaries.push_back(rng() % log.records.size());
    std::size_t cuts = 0;
    for (auto n : boundaries) {
        for (std::size_t extra : {std::size_t{1}, rs / 2, rs - 1}) {
            const std::size_t cut = h + n * rs + extra;
            try {
                decode_kin_binary(std::span<const std::uint8_t>(bin.data(), cut));
                v.require(false, fmt::format("cut at {} decoded", cut));
            } catch (const CorruptFileError& e) {
                v.require(e.offset() == h + n * rs, fmt::format("cut at {}: offset {} expected {}", cut, e.offset(), h + n * rs));
            }
            ++cuts;
        }
        const auto whole = decode_kin_binary(std::span<const std::uint8_t>(bin.data(), h + n * rs));
        v.require(whole.records.size() == n, "prefix at a record boundary");
    }
    if (v.pass) v.detail = fmt::format("1e5 records ({} bytes) identical, {} truncations at exact offsets", bin.size(), cuts);
    return v;
}

Verdict heatmap() {
    Verdict v;
    const post::HeatmapParams hp{40, 30, 7, 5};
    const auto g = post::gaussian_heatmap(80, 60, hp);
    auto rel = [](double got, double want) { return std::abs(got - want) / std::abs(want); };
    const double c = g.at(40, 30), e1 = g.at(47, 30), e2 = g.at(47, 35);
    v.require(rel(c, 1.0) <= 1e-12, fmt::format("G(center) = {}", c));
    v.require(rel(e1, std::exp(-1.0)) <= 1e-12, fmt::format("G(center + sx) = {}", e1));
    v.require(rel(e2, std::exp(-2.0)) <= 1e-12, fmt::format("G(center + sx, + sy) = {}", e2));
    v.require(rel(g.at(33, 25), std::exp(-2.0)) <= 1e-12, "G(center - sx, - sy)");
    if (v.pass)
        v.detail = fmt::format("rel errors {:.1e}, {:.1e}, {:.1e}", rel(c, 1.0), rel(e1, std::exp(-1.0)), rel(e2, std::exp(-2.0)));
    return v;
}

Verdict depth() {
    Verdict v;
    post::StereoParams sp;
    sp.f = 1046.3;
    sp.b = 0.0041;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.05, 300.0);
    FloatImage d(100, 101);
    for (auto& x : d.data) x = u(rng);
    for (int x = 0; x < 100; ++x) d.at(x, 100) = 0.0;
    const auto z = post::disparity_to_depth(d, sp);
    double worst = 0;
    for (int y = 0; y < 100; ++y)
        for (int x = 0; x < 100; ++x) {
            const double ratio = z.at(x, y) * d.at(x, y) / (sp.f * sp.b);
            worst = std::max(worst, std::abs(ratio - 1.0));
        }
    v.require(worst <= 1e-9, fmt::format("ratio off by {}", worst));
    for (int x = 0; x < 100; ++x) v.require(std::isnan(z.at(x, 100)), "zero disparity without sentinel");
    if (v.pass) v.detail = fmt::format("1e4 pixels, max |ratio - 1| {:.1e}, 100 zero-disparity pixels NaN", worst);
    return v;
}

Verdict laplacian() {
    Verdict v;
    ImageFrame flat(64, 48, 1);
    for (auto& b : flat.data()) b = 131;
    v.require(post::laplacian_variance(flat) == 0.0, "constant image nonzero");

    ImageFrame checker(64, 64, 1);
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 64; ++x) checker.at(x, y) = ((x / 2 + y / 2) % 2) ? 255 : 0;
    const double sharp = post::laplacian_variance(checker);
    const double blurred = post::laplacian_variance(oracle::gaussian_blur(checker, 2.0));
    v.require(sharp >= 10 * blurred, fmt::format("sharp {} vs blurred {}", sharp, blurred));

    ImageFrame impulse(15, 15, 1);
    impulse.at(7, 7) = 255;
    const double got = post::laplacian_variance(impulse), want = oracle::laplacian_variance(impulse);
    v.require(std::abs(got - want) <= 1e-9, fmt::format("impulse {} vs {}", got, want));
    if (v.pass) v.detail = fmt::format("flat 0, sharp/blurred {:.1f}x, impulse {} (oracle {})", sharp / blurred, got, want);
    return v;
}

Verdict latency_exact(const fs::path& dir) {
    Verdict v;
    write_crafted_run(dir / "run_lat", {Timestamp{kSecond}, Timestamp{kSecond + 33'333'333}, Timestamp{kSecond + 66'666'667}},
                      {{"psm1", {1, 2, 3}}});
    const auto r = analysis::latency_stats(dir / "run_lat", "cam_left");
    const auto& s = r.streams.at("psm1");
    v.require(s.mean_ms == 2.0, fmt::format("mean {}", s.mean_ms));
    v.require(s.median_ms == 2.0, fmt::format("median {}", s.median_ms));
    v.require(s.std_ms == 1.0, fmt::format("std {}", s.std_ms));
    if (v.pass) v.detail = "mean 2.0, median 2.0, std 1.0";
    return v;
}

Verdict interpolation() {
    Verdict v;
    std::mt19937_64 rng(1000);
    // Dyadic slope and values in [16, 32): every exact value is representable.
    const double slope = std::ldexp(1.0, -36);
    std::vector<KinRecord> s;
    std::vector<Timestamp> stamps;
    std::int64_t t = 0;
    for (int i = 0; i < 2000; ++i) {
        t += 100'000 + static_cast<std::int64_t>(rng() % 5'000'000);
        s.push_back({Timestamp{t}, {20.0 + slope * double(t), -3.0 * double(i)}});
        stamps.push_back(Timestamp{t});
    }
    double worst_ulps = 0;
    for (int q = 0; q < 1000; ++q) {
        const std::int64_t qt = s.front().stamp.nanos +
                                static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(t - s.front().stamp.nanos));
        const double want = 20.0 + slope * double(qt);
        const double got = offline::interpolate(s, Timestamp{qt}, offline::InterpolationRule::linear).values[0];
        const double ulp = std::nextafter(want, 64.0) - want;
        worst_ulps = std::max(worst_ulps, std::abs(got - want) / ulp);
    }
    v.require(worst_ulps <= 1.0, fmt::format("linear error {} ulp", worst_ulps));

    std::size_t ties = 0;
    for (int q = 0; q < 1000; ++q) {
        Timestamp qt;
        if (q % 4 == 0) {
            const auto k = rng() % (stamps.size() - 1);
            const Nanos gap = stamps[k + 1] - stamps[k];
            qt = stamps[k] + (gap % 2 == 0 ? gap / 2 : 0);
            ties += gap % 2 == 0;
        } else {
            qt = Timestamp{static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(t + 10'000'000)) - 5'000'000};
        }
        const auto got = offline::interpolate(s, qt, offline::InterpolationRule::nearest);
        const auto k = oracle::nearest_index(stamps, qt);
        v.require(got.stamp == stamps[k] && got.values == s[k].values, fmt::format("nearest differs at {}", qt.nanos));
    }
    if (v.pass) v.detail = fmt::format("1e3 linear queries max {} ulp, 1e3 nearest queries ({} exact ties) match", worst_ulps, ties);
    return v;
}

// Empty on success, otherwise the command's diagnostics.
std::string cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::dispatch(args, out, err);
    return code == 0 ? std::string{} : fmt::format("{} exited {}: {}", args.front(), code, err.str());
}

Verdict determinism(const fs::path& dir) {
    Verdict v;
    fs::create_directories(dir);
    const auto cfg = dir / "streams.json";
    std::ofstream(cfg) << R"({"streams":[
 {"descriptor":{"stream_id":"cam_left","kind":"image","nominal_rate_hz":60,"view":"left","width":32,"height":24},"seed":1},
 {"descriptor":{"stream_id":"cam_right","kind":"image","nominal_rate_hz":60,"view":"right","width":32,"height":24},"seed":2},
 {"descriptor":{"stream_id":"psm1","kind":"numeric","nominal_rate_hz":1000,"arity":7,"pose":true},"seed":3},
 {"descriptor":{"stream_id":"psm2","kind":"numeric","nominal_rate_hz":1000,"arity":7,"pose":true},"seed":4},
 {"descriptor":{"stream_id":"ecm","kind":"numeric","nominal_rate_hz":1000,"arity":7,"pose":true},"seed":5},
 {"descriptor":{"stream_id":"contact","kind":"latched_numeric","nominal_rate_hz":100,"arity":1},"seed":6}
]})";
    std::size_t files = 0;
    for (const std::string rule : {"nearest", "linear"}) {
        for (const std::string& id : {"a_" + rule, "b_" + rule}) {
            const auto base = std::vector<std::string>{"--streams", cfg.string(), "--duration-s", "5", "--speed", "0",
                                                       "--seed", "99", "--run-id", id};
            auto online = base;
            online.insert(online.begin(), "record-online");
            online.insert(online.end(), {"--out", (dir / "online").string()});
            auto capture = base;
            capture.insert(capture.begin(), "record-offline");
            capture.insert(capture.end(), {"--out", (dir / "capture").string(), "--fps", "10"});
            for (const auto& args : {online, capture,
                                     std::vector<std::string>{"match", "--run", (dir / "capture" / ("capture_" + id)).string(),
                                                              "--out", (dir / "matched").string(), "--rule", rule}}) {
                const auto failure = cli(args);
                v.require(failure.empty(), failure);
            }
        }
        if (!v.pass) return v;
        const std::string a = "a_" + rule, b = "b_" + rule;
        for (const auto& [kind, prefix] : {std::pair{"online", "run_"}, {"capture", "capture_"}, {"matched", "run_"}}) {
            const auto ta = canonical_tree(dir / kind / (prefix + a), a);
            const auto tb = canonical_tree(dir / kind / (prefix + b), b);
            v.require(!ta.empty() && ta == tb, fmt::format("{} runs differ ({} rule)", kind, rule));
            files += ta.size();
        }
    }
    // Realtime pacing must not change the result either.
    for (const char* id : {"pa", "pb"}) {
        const auto failure = cli({"record-online", "--streams", cfg.string(), "--duration-s", "5", "--speed", "1",
                                  "--seed", "99", "--run-id", id, "--out", (dir / "paced").string()});
        v.require(failure.empty(), failure);
    }
    if (!v.pass) return v;
    const auto pa = canonical_tree(dir / "paced" / "run_pa", "pa");
    v.require(!pa.empty() && pa == canonical_tree(dir / "paced" / "run_pb", "pb"), "paced online runs differ");
    v.require(pa == canonical_tree(dir / "online" / "run_a_nearest", "a_nearest"), "paced and unpaced online runs differ");
    files += pa.size();
    if (v.pass)
        v.detail = fmt::format("record-online (paced and unpaced), record-offline, match x 2 rules: {} files identical", files);
    return v;
}

Verdict contact() {
    Verdict v;
    // 25 slow cycles of a capacitance-like trace around the threshold, sampled
    // at 1 kHz with small noise that never reaches the threshold band.
    std::mt19937_64 rng(205);
    std::uniform_real_distribution<double> noise(-2.0, 2.0);
    std::vector<std::pair<Timestamp, double>> trace;
    for (int i = 0; i < 25'000; ++i) {
        const double phase = 2 * M_PI * i / 1000.0;
        const double level = -std::cos(phase);
        const double raw = 205.0 + (std::abs(level) < 0.1 ? std::copysign(0.1, level) : level) * 60.0 + noise(rng);
        trace.push_back({Timestamp::from_ms(i), raw});
    }
    std::size_t crossings = 0;
    for (std::size_t i = 1; i < trace.size(); ++i)
        crossings += (trace[i].second >= 205.0) != (trace[i - 1].second >= 205.0);
    const auto bin = post::binarize_contact(trace, {205.0, 0.0});
    const auto changes = post::count_transitions(bin);
    v.require(crossings == 50, fmt::format("trace crosses {} times", crossings));
    v.require(changes == 50, fmt::format("{} state changes", changes));
    if (v.pass) v.detail = "50 crossings, 50 state changes";
    return v;
}

}  // namespace

int main() {
    TempDir work("acceptance");
    int failures = 0;
    auto report = [&](const std::string& name, const std::function<Verdict()>& check) {
        Verdict v;
        try {
            v = check();
        } catch (const std::exception& e) {
            v = {false, fmt::format("exception: {}", e.what())};
        }
        failures += !v.pass;
        fmt::print("{} {:<22} {}\n", v.pass ? "PASS" : "FAIL", name, v.detail);
        std::fflush(stdout);
    };

    std::optional<OnlineRun> realtime;
    std::string realtime_error;
    try {
        realtime = record_realtime(work / "online");
    } catch (const std::exception& e) {
        realtime_error = e.what();
    }
    auto with_run = [&](Verdict (*check)(const OnlineRun&)) {
        return [&, check] { return realtime ? check(*realtime) : Verdict{false, "recording failed: " + realtime_error}; };
    };
    report("tolerance_soundness", with_run(tolerance_soundness));
    report("oracle_equivalence", with_run(oracle_equivalence));
    report("offline_uniformity", [&] { return offline_uniformity(work / "offline"); });
    report("binary_round_trip", binary_round_trip);
    report("heatmap", heatmap);
    report("depth", depth);
    report("laplacian_variance", laplacian);
    report("latency_stats", [&] { return latency_exact(work.path()); });
    report("interpolation", interpolation);
    report("determinism", [&] { return determinism(work / "determinism"); });
    report("contact_binarization", contact);
    fmt::print("{} of 11 criteria passed\n", 11 - failures);
    return failures == 0 ? 0 : 1;
}
