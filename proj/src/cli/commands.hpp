#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace surgsync::cli {

namespace fs = std::filesystem;

struct RecordOnlineArgs {
    fs::path streams;
    fs::path out;
    double tolerance_ms = 10.0;
    int writers = 4;
    int queue_cap = 64;
    int buffer_cap = 4096;
    double duration_s = 10.0;
    double speed = 1.0;
    std::optional<std::uint64_t> seed;
    std::string run_id;
    std::string reference;
    bool raw_tee = false;
};

struct RecordOfflineArgs {
    fs::path streams;
    fs::path out;
    double fps = 10.0;
    double duration_s = 10.0;
    double speed = 1.0;
    std::optional<std::uint64_t> seed;
    std::string run_id;
};

struct MatchArgs {
    fs::path run;
    fs::path out;
    std::string rule = "nearest";
    std::string reference;
};

struct LatencyArgs {
    fs::path run;
    std::string reference;
    std::optional<fs::path> out;
    double bin_ms = 0.5;
};

struct ReprojectArgs {
    fs::path run;
    fs::path handeye;
    fs::path intrinsics;
    std::vector<double> sigma;
    fs::path out;
    std::string stream;
    std::string view = "left";
    bool heatmaps = false;
};

struct DepthArgs {
    fs::path run;
    fs::path stereo;
    fs::path disparity;
    fs::path out;
};

struct SharpnessArgs {
    fs::path run;
    std::string view = "left";
    std::optional<fs::path> out;
};

struct FlowFilterArgs {
    double tau = 1.0;
    fs::path input;
    fs::path output;
};

struct ContactEvalArgs {
    fs::path run;
    std::string stream;
    std::string arm;
    double threshold = 205.0;
    double hysteresis = 0.0;
    std::optional<fs::path> out;
};

struct ServeArgs {
    fs::path root;
    std::string host = "127.0.0.1";
    int port = 8080;
    std::optional<fs::path> static_dir;
};

int run_record_online(const RecordOnlineArgs& a, std::ostream& out, const std::atomic<bool>* stop);
int run_record_offline(const RecordOfflineArgs& a, std::ostream& out, const std::atomic<bool>* stop);
int run_match(const MatchArgs& a, std::ostream& out);
int run_analyze_latency(const LatencyArgs& a, std::ostream& out);
int run_reproject(const ReprojectArgs& a, std::ostream& out);
int run_depth(const DepthArgs& a, std::ostream& out);
int run_sharpness(const SharpnessArgs& a, std::ostream& out);
int run_flow_filter(const FlowFilterArgs& a, std::ostream& out);
int run_contact_eval(const ContactEvalArgs& a, std::ostream& out);
int run_validate(const fs::path& run, std::ostream& out);
int run_serve(const ServeArgs& a, std::ostream& out, const std::atomic<bool>* stop);

}  // namespace surgsync::cli
