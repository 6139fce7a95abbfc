// Command-line front end: canned presets, config-file experiments, and
// WAV analysis. Exit codes: 0 ok, 1 bad parameters or malformed input,
// 2 filesystem trouble, 3 analysis failure.

#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "ubr/ubr.hpp"

namespace {

struct CommonFlags {
    std::optional<std::uint64_t> seed;
    std::optional<int> reps;
    std::string out_dir;
    std::string band;
    std::string window;
    bool emit_wav = false;
    bool emit_raw = false;
    int wav_bits = 24;
};

void add_common_flags(CLI::App& cmd, CommonFlags& f, bool with_reps = true) {
    auto* seed_opt = cmd.add_option_function<std::uint64_t>(
        "--seed", [&f](const std::uint64_t& v) { f.seed = v; },
        "Master seed (default from preset/config)");
    seed_opt->expected(1);
    if (with_reps) {
        cmd.add_option_function<int>(
               "--reps", [&f](const int& v) { f.reps = v; },
               "Repetition count override")
            ->check(CLI::PositiveNumber);
    }
    cmd.add_option("--out", f.out_dir, "Directory for CSV/JSON/WAV artifacts");
    cmd.add_option("--band", f.band, "Fit band as lo:hi in Hz, e.g. 0.2:100");
    cmd.add_option("--window", f.window, "Periodogram window: hann or none")
        ->check(CLI::IsMember({"hann", "none"}));
    cmd.add_flag("--emit-wav", f.emit_wav, "Export each repetition as WAV (peak 0.9)");
    cmd.add_flag("--emit-raw", f.emit_raw, "Also write the raw periodogram CSV");
    cmd.add_option("--wav-bits", f.wav_bits, "WAV bit depth: 16, 24 or 32")
        ->check(CLI::IsMember({16, 24, 32}));
}

ubr::RunOptions to_run_options(const CommonFlags& f) {
    ubr::RunOptions opt;
    opt.out_dir = f.out_dir;
    opt.emit_wav = f.emit_wav;
    opt.emit_raw = f.emit_raw;
    opt.wav_bits = f.wav_bits;
    opt.seed_override = f.seed;
    opt.reps_override = f.reps;
    if (!f.band.empty()) {
        const auto colon = f.band.find(':');
        double lo = 0.0, hi = 0.0;
        if (colon == std::string::npos ||
            std::sscanf(f.band.c_str(), "%lf:%lf", &lo, &hi) != 2 || !(lo < hi) ||
            !(lo > 0.0))
            throw ubr::ParameterError("--band expects lo:hi with 0 < lo < hi, got '" +
                                      f.band + "'");
        opt.band_lo = lo;
        opt.band_hi = hi;
    }
    if (!f.window.empty())
        opt.window_override = f.window == "hann" ? ubr::Window::hann : ubr::Window::rect;
    return opt;
}

void print_summary(const ubr::Summary& s) { std::fputs(ubr::format_summary(s).c_str(), stdout); }

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deterministic ensemble synthesis and low-frequency spectral analysis"};
    app.require_subcommand(1);

    // list-presets
    auto* list_cmd = app.add_subcommand("list-presets", "Show the canned experiments");

    // preset
    std::string preset_id;
    CommonFlags preset_flags;
    auto* preset_cmd = app.add_subcommand("preset", "Run a canned experiment");
    preset_cmd->add_option("id", preset_id, "Preset id, e.g. fig1b")->required();
    add_common_flags(*preset_cmd, preset_flags);

    // run
    std::string config_path;
    CommonFlags run_flags;
    auto* run_cmd = app.add_subcommand("run", "Run an experiment described by a config file");
    run_cmd->add_option("config", config_path, "Key-value config file")->required();
    add_common_flags(*run_cmd, run_flags);

    // analyze
    std::string wav_path;
    unsigned channel = 0;
    double start_seconds = 0.0;
    std::optional<double> length_seconds;
    CommonFlags analyze_flags;
    auto* analyze_cmd = app.add_subcommand("analyze", "Fit the low-frequency spectrum of a WAV");
    analyze_cmd->add_option("wav", wav_path, "Input WAV file")->required();
    analyze_cmd->add_option("--channel", channel, "Channel index (default 0)");
    analyze_cmd->add_option("--start", start_seconds, "Clip start in seconds");
    analyze_cmd->add_option_function<double>(
        "--duration", [&length_seconds](const double& v) { length_seconds = v; },
        "Clip length in seconds (default: to the end)");
    add_common_flags(*analyze_cmd, analyze_flags, /*with_reps=*/false);

    // show-config
    std::string show_id;
    auto* show_cmd =
        app.add_subcommand("show-config", "Print a preset as an editable config file");
    show_cmd->add_option("id", show_id, "Preset id")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (list_cmd->parsed()) {
            for (const ubr::Preset& p : ubr::preset_registry())
                std::printf("%-8s %s\n", p.id.c_str(), p.summary.c_str());
            return 0;
        }
        if (preset_cmd->parsed()) {
            print_summary(ubr::run_preset(preset_id, to_run_options(preset_flags)));
            return 0;
        }
        if (run_cmd->parsed()) {
            const ubr::ExperimentConfig cfg = ubr::load_experiment_config(config_path);
            print_summary(ubr::run_experiment(cfg, to_run_options(run_flags)));
            return 0;
        }
        if (analyze_cmd->parsed()) {
            print_summary(ubr::analyze_wav(wav_path, channel, start_seconds, length_seconds,
                                           ubr::AnalysisSpec{},
                                           to_run_options(analyze_flags)));
            return 0;
        }
        if (show_cmd->parsed()) {
            std::fputs(ubr::to_config_text(ubr::find_preset(show_id).config).c_str(), stdout);
            return 0;
        }
    } catch (const ubr::IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 2;
    } catch (const ubr::AnalysisError& e) {
        std::fprintf(stderr, "analysis error: %s\n", e.what());
        return 3;
    } catch (const ubr::ParseError& e) {
        std::fprintf(stderr, "parse error: %s\n", e.what());
        return 1;
    } catch (const ubr::ParameterError& e) {
        std::fprintf(stderr, "parameter error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
