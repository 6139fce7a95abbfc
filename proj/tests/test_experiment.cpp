#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "ubr/config.hpp"
#include "ubr/config_io.hpp"
#include "ubr/experiment.hpp"
#include "ubr/presets.hpp"
#include "ubr/wav.hpp"

using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::MessageMatches;
using ubr::ExperimentConfig;
using ubr::GeneratorKind;
using ubr::KeyValueConfig;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
    const auto d = std::filesystem::temp_directory_path() / "ubr_exp_tests" / name;
    std::filesystem::remove_all(d);
    std::filesystem::create_directories(d);
    return d;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.kind = GeneratorKind::timbre_unison;
    cfg.label = "small";
    cfg.master_seed = 7;
    cfg.repetitions = 2;
    cfg.ensemble.fiducial_freq = 200.0;
    cfg.ensemble.source_count = 2;
    cfg.ensemble.detune_halfwidth = 3.0;
    cfg.ensemble.duration = 0.5;
    cfg.ensemble.sample_rate = 8000.0;
    cfg.ensemble.timbre = ubr::TimbreSpec{10, -0.7, false};
    return cfg;
}

} // namespace

TEST_CASE("the preset registry is fixed and self-consistent") {
    const auto& presets = ubr::preset_registry();
    REQUIRE(presets.size() == 18);

    const std::vector<std::string> expected = {
        "fig1a", "fig1b", "fig1c", "fig2a", "fig2b", "fig2c",
        "fig3a", "fig3b", "fig3c", "fig4a", "fig4b", "fig4c",
        "fig5a", "fig5b", "fig5c", "fig6a", "fig6b", "fig6c"};
    for (std::size_t i = 0; i < expected.size(); ++i) CHECK(presets[i].id == expected[i]);

    for (const auto& p : presets) {
        CAPTURE(p.id);
        CHECK_NOTHROW(p.config.validate());
        CHECK(p.config.master_seed == 1);
        CHECK(p.config.repetitions == 5);
        CHECK(p.config.label == p.id);
        CHECK_FALSE(p.summary.empty());
    }

    CHECK(&ubr::find_preset("fig5b") == &presets[13]);
    CHECK_THROWS_MATCHES(ubr::find_preset("fig9z"), ubr::ParameterError,
                         MessageMatches(ContainsSubstring("available: fig1a")));
}

TEST_CASE("kind names round-trip") {
    using K = GeneratorKind;
    for (K k : {K::timbre_unison, K::vibrato_unison, K::timbre_vibrato, K::melody,
                K::resonance, K::ir_ensemble, K::ir_segments, K::wav_analysis})
        CHECK(ubr::kind_from_name(ubr::kind_name(k)) == k);
    CHECK_THROWS_MATCHES(ubr::kind_from_name("sampler"), ubr::ParseError,
                         MessageMatches(ContainsSubstring("unknown experiment kind")));
}

TEST_CASE("config text is a fixed point of render and parse") {
    for (const auto& p : ubr::preset_registry()) {
        CAPTURE(p.id);
        const std::string text1 = ubr::to_config_text(p.config);
        const ExperimentConfig back = ubr::experiment_from_config(
            KeyValueConfig::parse_text(text1, p.id));
        CHECK(back.kind == p.config.kind);
        CHECK(back.master_seed == p.config.master_seed);
        CHECK(back.repetitions == p.config.repetitions);
        CHECK(ubr::to_config_text(back) == text1);
    }

    ExperimentConfig wav_cfg;
    wav_cfg.kind = GeneratorKind::wav_analysis;
    wav_cfg.label = "listen";
    wav_cfg.repetitions = 1;
    wav_cfg.wav = ubr::WavSource{"take.wav", 1, 0.25, 2.5};
    wav_cfg.analysis.fit_lo = 0.2;
    const std::string text = ubr::to_config_text(wav_cfg);
    const ExperimentConfig back =
        ubr::experiment_from_config(KeyValueConfig::parse_text(text));
    CHECK(back.wav->path == "take.wav");
    CHECK(back.wav->channel == 1);
    CHECK(back.wav->length_seconds == 2.5);
    CHECK(ubr::to_config_text(back) == text);
}

TEST_CASE("config parsing pinpoints mistakes by line") {
    CHECK_THROWS_MATCHES(KeyValueConfig::parse_text("[a]\nx = 1\nx = 2\n"), ubr::ParseError,
                         MessageMatches(ContainsSubstring("duplicate key 'a.x'") &&
                                        ContainsSubstring("line 3")));
    CHECK_THROWS_MATCHES(KeyValueConfig::parse_text("x = 1\n"), ubr::ParseError,
                         MessageMatches(ContainsSubstring("before any [section]")));
    CHECK_THROWS_MATCHES(KeyValueConfig::parse_text("[oops\n"), ubr::ParseError,
                         MessageMatches(ContainsSubstring("malformed section header")));
    CHECK_THROWS_MATCHES(KeyValueConfig::parse_text("[a]\njust words\n"), ubr::ParseError,
                         MessageMatches(ContainsSubstring("expected 'key = value'")));

    const KeyValueConfig kv =
        KeyValueConfig::parse_text("[a]\n# comment\nx = 2.5\nflag = on\n", "mem");
    CHECK(kv.get_double("a.x") == 2.5);
    CHECK(kv.get_bool("a.flag") == true);
    CHECK_FALSE(kv.get_string("a.missing").has_value());
    CHECK(kv.line_of("a.x") == 3);
    CHECK(kv.origin() == "mem");

    const KeyValueConfig bad = KeyValueConfig::parse_text("[a]\nx = fast\n");
    CHECK_THROWS_MATCHES(bad.get_double("a.x"), ubr::ParseError,
                         MessageMatches(ContainsSubstring("expected a number")));
    const KeyValueConfig badint = KeyValueConfig::parse_text("[a]\nx = 1.5\n");
    CHECK_THROWS_AS(badint.get_int("a.x"), ubr::ParseError);
}

TEST_CASE("experiment configs reject unknown keys and bad values") {
    const std::string base =
        "[experiment]\nkind = timbre-unison\n\n[ensemble]\nduration = 0.5\n"
        "sample_rate = 8000\nfiducial_freq = 200\n\n[timbre]\novertones = 5\n";

    CHECK_NOTHROW(ubr::experiment_from_config(KeyValueConfig::parse_text(base)));

    CHECK_THROWS_MATCHES(
        ubr::experiment_from_config(KeyValueConfig::parse_text(base + "bogus = 1\n")),
        ubr::ParseError, MessageMatches(ContainsSubstring("unknown key 'timbre.bogus'")));

    CHECK_THROWS_MATCHES(
        ubr::experiment_from_config(
            KeyValueConfig::parse_text(base + "\n[analysis]\nwindow = hamming\n")),
        ubr::ParseError, MessageMatches(ContainsSubstring("window must be 'hann' or 'none'")));

    CHECK_THROWS_MATCHES(
        ubr::experiment_from_config(KeyValueConfig::parse_text("[ensemble]\nduration = 1\n")),
        ubr::ParseError,
        MessageMatches(ContainsSubstring("missing required key 'experiment.kind'")));
}

TEST_CASE("experiment validation enforces the block schema") {
    ExperimentConfig cfg = small_config();
    cfg.ensemble.vibrato = ubr::VibratoSpec{1.0, 0.0, 1.0, 2.0};
    CHECK_THROWS_MATCHES(cfg.validate(), ubr::ParameterError,
                         MessageMatches(ContainsSubstring("does not belong here")));

    cfg = small_config();
    cfg.kind = GeneratorKind::melody;
    CHECK_THROWS_MATCHES(cfg.validate(), ubr::ParameterError,
                         MessageMatches(ContainsSubstring("[melody] block is required")));

    cfg = small_config();
    cfg.resonance = ubr::ResonanceSpec{10.0, 0.0, {}};
    CHECK_THROWS_MATCHES(cfg.validate(), ubr::ParameterError,
                         MessageMatches(ContainsSubstring("[resonance] block does not belong")));

    cfg = small_config();
    cfg.kind = GeneratorKind::ir_ensemble;
    cfg.ir = ubr::IRDivergentSpec{1e-5, 1000.0, true};
    CHECK_THROWS_MATCHES(cfg.validate(), ubr::ParameterError,
                         MessageMatches(ContainsSubstring("do not belong here")));

    ExperimentConfig wav_cfg;
    wav_cfg.kind = GeneratorKind::wav_analysis;
    wav_cfg.wav = ubr::WavSource{"x.wav", 0, 0.0, {}};
    wav_cfg.repetitions = 2;
    CHECK_THROWS_MATCHES(wav_cfg.validate(), ubr::ParameterError,
                         MessageMatches(ContainsSubstring("single repetition")));
    wav_cfg.repetitions = 1;
    CHECK_NOTHROW(wav_cfg.validate());

    cfg = small_config();
    cfg.repetitions = 0;
    CHECK_THROWS_AS(cfg.validate(), ubr::ParameterError);
    cfg = small_config();
    cfg.analysis.bins_per_decade = 3;
    CHECK_THROWS_AS(cfg.validate(), ubr::ParameterError);
    cfg = small_config();
    cfg.analysis.fit_lo = 200.0; // above fit_hi
    CHECK_THROWS_AS(cfg.validate(), ubr::ParameterError);
}

TEST_CASE("runs are deterministic functions of the config") {
    const ExperimentConfig cfg = small_config();
    ubr::RunOptions opt;
    opt.out_dir = temp_dir("det_a");
    const ubr::Summary a = ubr::run_experiment(cfg, opt);
    opt.out_dir = temp_dir("det_b");
    const ubr::Summary b = ubr::run_experiment(cfg, opt);

    REQUIRE(a.reps.size() == 2);
    REQUIRE(b.reps.size() == 2);
    for (int r = 0; r < 2; ++r) {
        CHECK(slurp(a.reps[r].csv_path) == slurp(b.reps[r].csv_path));
        CHECK(slurp(a.reps[r].meta_path) == slurp(b.reps[r].meta_path));
        CHECK(a.reps[r].fit->index == b.reps[r].fit->index);
        CHECK(a.reps[r].ratio.value == b.reps[r].ratio.value);
    }
    CHECK(slurp(a.summary_path) == slurp(b.summary_path));

    // Repetitions use distinct seed branches.
    CHECK(a.reps[0].seed_path == "rep[0]");
    CHECK(a.reps[1].seed_path == "rep[1]");
    CHECK(a.reps[0].fit->index != a.reps[1].fit->index);

    // In-memory analysis agrees with what the runner recorded.
    const ubr::TimeSeries sig =
        ubr::make_signal(cfg, ubr::SeedTree(cfg.master_seed).child("rep", 0));
    const ubr::AnalysisOutcome out = ubr::analyze_series(sig, cfg.analysis, true);
    CHECK(out.fit->index == a.reps[0].fit->index);
    CHECK(out.ratio.value == a.reps[0].ratio.value);
}

TEST_CASE("run options override seed, reps, band and window") {
    ubr::RunOptions opt;
    opt.seed_override = 99;
    opt.reps_override = 3;
    opt.band_lo = 5.0;
    opt.band_hi = 50.0;
    opt.window_override = ubr::Window::hann;
    const ubr::Summary s = ubr::run_experiment(small_config(), opt);

    CHECK(s.config.master_seed == 99);
    REQUIRE(s.reps.size() == 3);
    CHECK(s.reps[0].fit_lo_used == 5.0);
    CHECK(s.reps[0].fit_hi_used == 50.0);
    CHECK(s.reps[0].fit->f_lo == 5.0);
    CHECK(s.reps[0].binned.window == "hann");
    CHECK(s.summary_path.empty()); // compute-only, nothing written
    CHECK(s.aggregate.has_value());
    CHECK(s.aggregate->fit_count == 3);
}

TEST_CASE("the default fit band floor follows the record length") {
    // fit_lo = max(2/duration, 0.05): two periodogram bins below the band.
    ExperimentConfig cfg = small_config();
    cfg.repetitions = 1;
    const ubr::Summary half_second = ubr::run_experiment(cfg);
    CHECK(half_second.reps[0].fit_lo_used == 4.0);

    cfg.ensemble.duration = 2.0;
    CHECK(ubr::run_experiment(cfg).reps[0].fit_lo_used == 1.0);

    cfg.ensemble.duration = 80.0;
    cfg.ensemble.sample_rate = 2000.0;
    cfg.ensemble.timbre->overtone_count = 4;
    CHECK(ubr::run_experiment(cfg).reps[0].fit_lo_used == 0.05);

    cfg.analysis.fit_lo = 0.7; // explicit band wins over the heuristic
    CHECK(ubr::run_experiment(cfg).reps[0].fit_lo_used == 0.7);
}

TEST_CASE("emitted artifacts are complete and well formed") {
    ExperimentConfig cfg = small_config();
    cfg.repetitions = 1;
    ubr::RunOptions opt;
    opt.out_dir = temp_dir("artifacts");
    opt.emit_wav = true;
    opt.emit_raw = true;
    const ubr::Summary s = ubr::run_experiment(cfg, opt);
    const auto& rep = s.reps[0];

    const std::string csv = slurp(rep.csv_path);
    CHECK(csv.rfind("frequency_hz,power\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') ==
          static_cast<long>(rep.binned.size()) + 1);
    const std::string raw_csv = slurp(rep.raw_csv_path);
    CHECK(std::count(raw_csv.begin(), raw_csv.end(), '\n') == 2000 + 1);

    // The exported WAV is the normalized signal at 24 bits.
    ubr::WavDescriptor d;
    const ubr::TimeSeries w = ubr::read_wav(rep.wav_path, 0, &d);
    CHECK(d.bits_per_sample == 24);
    CHECK(w.size() == 4000u);
    CHECK(ubr::peak_amplitude(w) == Catch::Approx(0.9).margin(2e-7));
    CHECK(rep.wav_scale > 0.0);

    const std::string meta = slurp(rep.meta_path);
    CHECK_THAT(meta, ContainsSubstring("\"kind\": \"timbre-unison\""));
    CHECK_THAT(meta, ContainsSubstring("\"master_seed\": 7"));
    CHECK_THAT(meta, ContainsSubstring("\"rng\": \"splitmix64\""));
    CHECK_THAT(meta, ContainsSubstring("\"seed_path\": \"rep[0]\""));
}

TEST_CASE("wav analysis runs the same pipeline on a file") {
    // Two seconds of a detuned pair plus a faint deterministic dither to
    // keep every spectral bin strictly positive.
    ubr::TimeSeries x;
    x.sample_rate = 8000.0;
    x.samples.resize(16000);
    auto noise = ubr::SeedTree(88).child("dither").stream();
    for (std::size_t j = 0; j < x.samples.size(); ++j) {
        const double t = static_cast<double>(j) / 8000.0;
        x.samples[j] = 0.45 * std::sin(2.0 * std::numbers::pi * 301.0 * t) +
                       0.45 * std::sin(2.0 * std::numbers::pi * 299.0 * t) +
                       1e-4 * noise.uniform(-1.0, 1.0);
    }
    const auto dir = temp_dir("wav_analysis");
    const auto path = dir / "pair.wav";
    ubr::write_wav(path, x, 16);

    const ubr::Summary s = ubr::analyze_wav(path);
    REQUIRE(s.reps.size() == 1);
    CHECK(s.config.kind == GeneratorKind::wav_analysis);
    CHECK(s.reps[0].sample_count == 16000u);
    CHECK(std::isfinite(s.reps[0].ratio.value));
    // A 2 s record resolves 0.5 Hz at best, so the 0.1 Hz lookup falls back
    // to the lowest bin, which holds only dither far below the beat lines.
    CHECK(s.reps[0].ratio.low_bin_substituted);
    CHECK(s.reps[0].ratio.value < 1e-2);

    // Clipping narrows the analyzed window.
    const ubr::Summary clipped = ubr::analyze_wav(path, 0, 0.5, 1.0);
    CHECK(clipped.reps[0].sample_count == 8000u);

    // The config form drives the same reader.
    ExperimentConfig cfg;
    cfg.kind = GeneratorKind::wav_analysis;
    cfg.label = "file";
    cfg.wav = ubr::WavSource{path.string(), 0, 0.0, {}};
    const ubr::Summary via_config = ubr::run_experiment(cfg);
    CHECK(via_config.reps[0].ratio.value == s.reps[0].ratio.value);
}

TEST_CASE("missing inputs surface as io errors") {
    ExperimentConfig cfg;
    cfg.kind = GeneratorKind::wav_analysis;
    cfg.wav = ubr::WavSource{"/nonexistent/ubr_test.wav", 0, 0.0, {}};
    CHECK_THROWS_AS(ubr::run_experiment(cfg), ubr::IoError);
    CHECK_THROWS_AS(ubr::load_experiment_config("/nonexistent/ubr_test.ini"), ubr::IoError);
}
