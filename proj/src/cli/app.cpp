#include "surgsync/cli/cli.hpp"

#include "commands.hpp"
#include "surgsync/core/error.hpp"

#include <algorithm>
#include <functional>
#include <ostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

namespace surgsync::cli {

namespace {

struct Parsed {
    std::function<int()> action;
};

void build(CLI::App& app, Parsed& parsed, std::ostream& out, const std::atomic<bool>* stop) {
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    {
        auto a = std::make_shared<RecordOnlineArgs>();
        auto* s = app.add_subcommand("record-online", "Record synthetic streams with tolerance-gated online matching");
        s->add_option("--streams", a->streams, "Stream configuration document")->required();
        s->add_option("--out", a->out, "Output root (default $SURGSYNC_OUT)")->envname("SURGSYNC_OUT")->required();
        s->add_option("--tolerance-ms", a->tolerance_ms, "Maximum |delta t| for a match")->capture_default_str();
        s->add_option("--writers", a->writers, "Writer threads")->capture_default_str();
        s->add_option("--queue-cap", a->queue_cap, "Synced packet queue capacity")->capture_default_str();
        s->add_option("--buffer-cap", a->buffer_cap, "Per-stream buffer capacity")->capture_default_str();
        s->add_option("--duration-s", a->duration_s, "Recording length in stream seconds")->capture_default_str();
        s->add_option("--speed", a->speed, "Stream seconds per wall second; 0 runs unpaced")->capture_default_str();
        s->add_option("--seed", a->seed, "Run seed mixed into every stream seed");
        s->add_option("--run-id", a->run_id, "Run id (default: UTC wall clock)");
        s->add_option("--reference", a->reference, "Reference image stream (default: left view)");
        s->add_flag("--raw-tee", a->raw_tee, "Also log every ingested sample");
        s->callback([&parsed, a, &out, stop] { parsed.action = [a, &out, stop] { return run_record_online(*a, out, stop); }; });
    }
    {
        auto a = std::make_shared<RecordOfflineArgs>();
        auto* s = app.add_subcommand("record-offline", "Capture synthetic streams at a fixed frame rate");
        s->add_option("--streams", a->streams, "Stream configuration document")->required();
        s->add_option("--out", a->out, "Output root (default $SURGSYNC_OUT)")->envname("SURGSYNC_OUT")->required();
        s->add_option("--fps", a->fps, "Frame rate")->capture_default_str();
        s->add_option("--duration-s", a->duration_s, "Recording length in stream seconds")->capture_default_str();
        s->add_option("--speed", a->speed, "Stream seconds per wall second; 0 runs unpaced")->capture_default_str();
        s->add_option("--seed", a->seed, "Run seed mixed into every stream seed");
        s->add_option("--run-id", a->run_id, "Run id (default: UTC wall clock)");
        s->callback([&parsed, a, &out, stop] { parsed.action = [a, &out, stop] { return run_record_offline(*a, out, stop); }; });
    }
    {
        auto a = std::make_shared<MatchArgs>();
        auto* s = app.add_subcommand("match", "Match an offline capture into a final run");
        s->add_option("--run", a->run, "Offline capture directory")->required();
        s->add_option("--out", a->out, "Output root (default $SURGSYNC_OUT)")->envname("SURGSYNC_OUT")->required();
        s->add_option("--rule", a->rule, "Interpolation rule")
            ->check(CLI::IsMember({"nearest", "linear"}))
            ->capture_default_str();
        s->add_option("--reference", a->reference, "Reference image stream (default: left view)");
        s->callback([&parsed, a, &out] { parsed.action = [a, &out] { return run_match(*a, out); }; });
    }
    {
        auto a = std::make_shared<LatencyArgs>();
        auto* s = app.add_subcommand("analyze-latency", "Latency and frequency statistics of a final run");
        s->add_option("--run", a->run, "Final run directory")->required();
        s->add_option("--reference", a->reference, "Reference stream of the run")->required();
        s->add_option("--out", a->out, "Report file (default: stdout)");
        s->add_option("--histogram-bin-ms", a->bin_ms, "Histogram bin width")->capture_default_str();
        s->callback([&parsed, a, &out] { parsed.action = [a, &out] { return run_analyze_latency(*a, out); }; });
    }
    {
        auto a = std::make_shared<ReprojectArgs>();
        auto* s = app.add_subcommand("reproject", "Project tool positions into frames and render attention images");
        s->add_option("--run", a->run, "Final run directory")->required();
        s->add_option("--handeye", a->handeye, "Camera-from-base rigid transform")->required();
        s->add_option("--intrinsics", a->intrinsics, "Camera intrinsics")->required();
        s->add_option("--sigma", a->sigma, "Heatmap spread sigma_x sigma_y in pixels")->expected(2)->required();
        s->add_option("--out", a->out, "Output directory")->required();
        s->add_option("--stream", a->stream, "Position stream (default: first pose stream)");
        s->add_option("--view", a->view, "Image view")->capture_default_str();
        s->add_flag("--heatmaps", a->heatmaps, "Also write the heatmaps as 8-bit images");
        s->callback([&parsed, a, &out] { parsed.action = [a, &out] { return run_reproject(*a, out); }; });
    }
    {
        auto a = std::make_shared<DepthArgs>();
        auto* s = app.add_subcommand("depth", "Convert precomputed disparity maps to depth");
        s->add_option("--run", a->run, "Final run directory")->required();
        s->add_option("--stereo", a->stereo, "Stereo parameters")->required();
        s->add_option("--disparity", a->disparity, "Directory of <%06d>.pfm disparity maps")->required();
        s->add_option("--out", a->out, "Output directory for <%06d>.pfm depth maps")->required();
        s->callback([&parsed, a, &out] { parsed.action = [a, &out] { return run_depth(*a, out); }; });
    }
    {
        auto a = std::make_shared<SharpnessArgs>();
        auto* s = app.add_subcommand("sharpness", "Laplacian variance of every frame in a view");
        s->add_option("--run", a->run, "Final run directory")->required();
        s->add_option("--view", a->view, "Image view")->capture_default_str();
        s->add_option("--out", a->out, "Report file (default: stdout)");
        s->callback([&parsed, a, &out] { parsed.action = [a, &out] { return run_sharpness(*a, out); }; });
    }
    {
        auto a = std::make_shared<FlowFilterArgs>();
        auto* s = app.add_subcommand("flow-filter", "Zero optical-flow vectors below a magnitude");
        s->add_option("--tau", a->tau, "Magnitude threshold in pixels")->capture_default_str();
        s->add_option("--input", a->input, ".flo file or directory of .flo files")->required();
        s->add_option("--output", a->output, "Output file or directory")->required();
        s->callback([&parsed, a, &out] { parsed.action = [a, &out] { return run_flow_filter(*a, out); }; });
    }
    {
        auto a = std::make_shared<ContactEvalArgs>();
        auto* s = app.add_subcommand("contact-eval", "Binarize a contact stream and score it against annotations");
        s->add_option("--run", a->run, "Final run directory")->required();
        s->add_option("--stream", a->stream, "Contact stream (default: first latched stream)");
        s->add_option("--arm", a->arm, "Annotation track (default: the stream id)");
        s->add_option("--threshold", a->threshold, "Contact threshold")->capture_default_str();
        s->add_option("--hysteresis", a->hysteresis, "Exit band below the threshold")->capture_default_str();
        s->add_option("--out", a->out, "Report file (default: stdout)");
        s->callback([&parsed, a, &out] { parsed.action = [a, &out] { return run_contact_eval(*a, out); }; });
    }
    {
        auto run = std::make_shared<std::filesystem::path>();
        auto* s = app.add_subcommand("validate", "Check a final run for consistency");
        s->add_option("--run", *run, "Final run directory")->required();
        s->callback([&parsed, run, &out] { parsed.action = [run, &out] { return run_validate(*run, out); }; });
    }
    {
        auto a = std::make_shared<ServeArgs>();
        auto* s = app.add_subcommand("serve", "Serve the playback and annotation API");
        s->add_option("--root", a->root, "Dataset root (default $SURGSYNC_OUT)")->envname("SURGSYNC_OUT")->required();
        s->add_option("--host", a->host, "Listen address")->capture_default_str();
        s->add_option("--port", a->port, "Listen port; 0 picks a free one")->capture_default_str();
        s->add_option("--static", a->static_dir, "Directory of UI assets served at /");
        s->callback([&parsed, a, &out, stop] { parsed.action = [a, &out, stop] { return run_serve(*a, out, stop); }; });
    }
}

}  // namespace

std::string usage() {
    CLI::App app{"Multi-stream synchronized recorder and post-processing toolbox", "surgsync"};
    Parsed parsed;
    std::ostringstream sink;
    build(app, parsed, sink, nullptr);
    return app.help();
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
             const std::atomic<bool>* stop) {
    CLI::App app{"Multi-stream synchronized recorder and post-processing toolbox", "surgsync"};
    Parsed parsed;
    build(app, parsed, out, stop);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitDomain;
    }
    if (!parsed.action) {
        err << app.help();
        return kExitDomain;
    }

    try {
        return parsed.action();
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitDomain;
    }
}

}  // namespace surgsync::cli
