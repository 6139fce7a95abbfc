#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ubr/config.hpp"
#include "ubr/csv.hpp"
#include "ubr/errors.hpp"
#include "ubr/melody.hpp"
#include "ubr/seed_tree.hpp"
#include "ubr/spectral.hpp"
#include "ubr/synth.hpp"
#include "ubr/time_series.hpp"
#include "ubr/version.hpp"
#include "ubr/wav.hpp"

namespace ubr {

enum class GeneratorKind {
    timbre_unison,
    vibrato_unison,
    timbre_vibrato,
    melody,
    resonance,
    ir_ensemble,
    ir_segments,
    wav_analysis,
};

inline const char* kind_name(GeneratorKind k) {
    switch (k) {
        case GeneratorKind::timbre_unison: return "timbre-unison";
        case GeneratorKind::vibrato_unison: return "vibrato-unison";
        case GeneratorKind::timbre_vibrato: return "timbre-vibrato";
        case GeneratorKind::melody: return "melody";
        case GeneratorKind::resonance: return "resonance";
        case GeneratorKind::ir_ensemble: return "ir-ensemble";
        case GeneratorKind::ir_segments: return "ir-segments";
        case GeneratorKind::wav_analysis: return "wav-analysis";
    }
    return "?";
}

inline GeneratorKind kind_from_name(std::string_view name) {
    for (GeneratorKind k :
         {GeneratorKind::timbre_unison, GeneratorKind::vibrato_unison,
          GeneratorKind::timbre_vibrato, GeneratorKind::melody, GeneratorKind::resonance,
          GeneratorKind::ir_ensemble, GeneratorKind::ir_segments,
          GeneratorKind::wav_analysis}) {
        if (name == kind_name(k)) return k;
    }
    throw ParseError("unknown experiment kind '" + std::string(name) + "'");
}

struct MelodyParams {
    std::vector<std::string> notes;
    double note_duration = 1.0;
    double overlap_fraction = 0.0;
    double reference_pitch = 440.0;
};

struct SegmentParams {
    int count = 1;
    double segment_duration = 1.0;
    double overlap_fraction = 0.0;
};

struct WavSource {
    std::string path;
    unsigned channel = 0;
    double start_seconds = 0.0;
    std::optional<double> length_seconds; ///< absent = to the end
};

struct AnalysisSpec {
    std::optional<double> fit_lo; ///< Hz; absent = max(2/tau, 0.05)
    double fit_hi = 100.0;
    int bins_per_decade = 20;
    double ratio_low = 0.1;
    double ratio_high = 100.0;
    Window window = Window::rect;
};

/// Everything needed to reproduce a run. `ensemble` doubles as the per-note
/// template for melody kind; its seed is replaced per repetition.
struct ExperimentConfig {
    GeneratorKind kind = GeneratorKind::timbre_unison;
    std::string label;
    std::uint64_t master_seed = 1;
    int repetitions = 1;
    bool report_fit = true;
    EnsembleSpec ensemble;
    std::optional<ResonanceSpec> resonance;
    std::optional<IRDivergentSpec> ir;
    std::optional<MelodyParams> melody;
    std::optional<SegmentParams> segments;
    std::optional<WavSource> wav;
    AnalysisSpec analysis;

    void validate() const {
        if (repetitions < 1)
            throw ParameterError("ExperimentConfig: repetitions must be >= 1");
        if (analysis.bins_per_decade < 4)
            throw ParameterError("ExperimentConfig: analysis.bins_per_decade must be >= 4");
        if (analysis.fit_lo && (!(*analysis.fit_lo > 0.0) || !(*analysis.fit_lo < analysis.fit_hi)))
            throw ParameterError("ExperimentConfig: need 0 < fit_lo < fit_hi");
        if (!(analysis.fit_hi > 0.0))
            throw ParameterError("ExperimentConfig: fit_hi must be > 0");
        if (!(analysis.ratio_low > 0.0) || !(analysis.ratio_high > analysis.ratio_low))
            throw ParameterError("ExperimentConfig: need 0 < ratio_low < ratio_high");

        auto need = [&](bool ok, const char* what) {
            if (!ok)
                throw ParameterError(std::string("ExperimentConfig(") + kind_name(kind) +
                                     "): " + what);
        };
        const bool generator = kind != GeneratorKind::wav_analysis;
        switch (kind) {
            case GeneratorKind::timbre_unison:
                need(ensemble.timbre.has_value(), "a [timbre] block is required");
                need(!ensemble.vibrato, "a [vibrato] block does not belong here");
                break;
            case GeneratorKind::vibrato_unison:
                need(ensemble.vibrato.has_value(), "a [vibrato] block is required");
                need(!ensemble.timbre, "a [timbre] block does not belong here");
                break;
            case GeneratorKind::timbre_vibrato:
                need(ensemble.timbre.has_value() && ensemble.vibrato.has_value(),
                     "[timbre] and [vibrato] blocks are both required");
                break;
            case GeneratorKind::melody:
                need(melody.has_value(), "a [melody] block is required");
                break;
            case GeneratorKind::resonance:
                need(resonance.has_value(), "a [resonance] block is required");
                need(!ensemble.vibrato, "a [vibrato] block does not belong here");
                break;
            case GeneratorKind::ir_ensemble:
                need(ir.has_value(), "an [ir] block is required");
                need(!ensemble.timbre && !ensemble.vibrato,
                     "[timbre]/[vibrato] blocks do not belong here");
                break;
            case GeneratorKind::ir_segments:
                need(ir.has_value() && segments.has_value(),
                     "[ir] and [segments] blocks are both required");
                need(!ensemble.timbre && !ensemble.vibrato,
                     "[timbre]/[vibrato] blocks do not belong here");
                break;
            case GeneratorKind::wav_analysis:
                need(wav.has_value(), "a [wav] block is required");
                need(repetitions == 1, "wav analysis runs a single repetition");
                break;
        }
        if (generator && wav)
            throw ParameterError("ExperimentConfig: [wav] block only belongs to wav-analysis");
        if (kind != GeneratorKind::resonance && resonance)
            throw ParameterError("ExperimentConfig: [resonance] block does not belong here");
        if (kind != GeneratorKind::ir_ensemble && kind != GeneratorKind::ir_segments && ir)
            throw ParameterError("ExperimentConfig: [ir] block does not belong here");
        if (kind != GeneratorKind::melody && melody)
            throw ParameterError("ExperimentConfig: [melody] block does not belong here");
        if (kind != GeneratorKind::ir_segments && segments)
            throw ParameterError("ExperimentConfig: [segments] block does not belong here");
        if (melody) {
            MelodySpec probe;
            probe.notes = melody->notes;
            probe.note_duration = melody->note_duration;
            probe.overlap_fraction = melody->overlap_fraction;
            probe.reference_pitch = melody->reference_pitch;
            probe.note_template = ensemble;
            probe.validate();
        }
        if (segments) {
            if (segments->count < 1)
                throw ParameterError("ExperimentConfig: segments.count must be >= 1");
            if (!(segments->segment_duration > 0.0))
                throw ParameterError("ExperimentConfig: segments.duration must be > 0");
            if (!(segments->overlap_fraction >= 0.0) ||
                !(segments->overlap_fraction <= max_overlap_fraction))
                throw ParameterError("ExperimentConfig: segments.overlap out of range");
        }
        if (wav && wav->path.empty())
            throw ParameterError("ExperimentConfig: wav.path is empty");
    }
};

/// The signal for one repetition. Every random quantity descends from
/// `rep_seed`, so one seed value pins the whole repetition.
inline TimeSeries make_signal(const ExperimentConfig& cfg, const SeedTree& rep_seed) {
    EnsembleSpec spec = cfg.ensemble;
    spec.seed = rep_seed;
    switch (cfg.kind) {
        case GeneratorKind::timbre_unison:
            return synth_unison_timbre(spec);
        case GeneratorKind::vibrato_unison:
            return synth_unison_vibrato(spec);
        case GeneratorKind::timbre_vibrato:
            return synth_unison_timbre_vibrato(spec);
        case GeneratorKind::melody: {
            MelodySpec m;
            m.notes = cfg.melody->notes;
            m.note_duration = cfg.melody->note_duration;
            m.overlap_fraction = cfg.melody->overlap_fraction;
            m.reference_pitch = cfg.melody->reference_pitch;
            m.note_template = spec;
            return build_melody(m);
        }
        case GeneratorKind::resonance:
            return synth_resonance(spec, *cfg.resonance);
        case GeneratorKind::ir_ensemble:
            return synth_ir_ensemble(spec, *cfg.ir);
        case GeneratorKind::ir_segments: {
            std::vector<TimeSeries> segs;
            segs.reserve(static_cast<std::size_t>(cfg.segments->count));
            for (int s = 0; s < cfg.segments->count; ++s) {
                EnsembleSpec seg_spec = spec;
                seg_spec.duration = cfg.segments->segment_duration;
                seg_spec.seed = rep_seed.child("seg", static_cast<std::uint64_t>(s));
                segs.push_back(synth_ir_ensemble(seg_spec, *cfg.ir));
            }
            return concat_segments(segs, cfg.segments->overlap_fraction);
        }
        case GeneratorKind::wav_analysis: {
            TimeSeries x = read_wav(cfg.wav->path, cfg.wav->channel);
            if (cfg.wav->start_seconds > 0.0 || cfg.wav->length_seconds) {
                const double remain = x.duration() - cfg.wav->start_seconds;
                const double len = cfg.wav->length_seconds.value_or(remain);
                x = clip(x, cfg.wav->start_seconds, len);
            }
            return x;
        }
    }
    throw ParameterError("make_signal: unhandled kind");
}

struct AnalysisOutcome {
    PowerSpectrum raw;    ///< periodogram of the squared signal
    PowerSpectrum binned; ///< log-binned view of `raw`
    std::optional<PowerLawFit> fit;
    UBRRatio ratio;
    double fit_lo_used = 0.0;
    double fit_hi_used = 0.0;
};

/// square -> periodogram -> ratio (on the raw grid) -> log-bin -> fit.
/// The default fit band starts at max(2/tau, 0.05) Hz so at least two
/// periodogram bins sit below the band edge.
inline AnalysisOutcome analyze_series(const TimeSeries& signal, const AnalysisSpec& a,
                                      bool want_fit) {
    const TimeSeries squared = square_signal(signal);
    AnalysisOutcome out;
    out.raw = periodogram(squared, a.window);
    out.ratio = ubr_ratio(out.raw, a.ratio_low, a.ratio_high);
    out.binned = log_bin(out.raw, a.bins_per_decade);
    out.fit_lo_used = a.fit_lo.value_or(std::max(2.0 / signal.duration(), 0.05));
    out.fit_hi_used = a.fit_hi;
    if (want_fit) out.fit = fit_power_law(out.binned, out.fit_lo_used, out.fit_hi_used);
    return out;
}

struct RepetitionOutcome {
    int rep_index = 0;
    std::string seed_path;
    std::size_t sample_count = 0;
    double duration = 0.0;
    double peak = 0.0;
    UBRRatio ratio;
    std::optional<PowerLawFit> fit;
    double fit_lo_used = 0.0;
    double fit_hi_used = 0.0;
    PowerSpectrum binned;
    std::string csv_path;     ///< empty when nothing was written
    std::string meta_path;
    std::string wav_path;
    std::string raw_csv_path;
    double wav_scale = 0.0;   ///< factor applied before export
};

struct Aggregate {
    int fit_count = 0;
    double gamma_mean = 0.0;
    double gamma_stddev = 0.0; ///< sample stddev, 0 for a single fit
    double gamma_stderr = 0.0;
    double r2_mean = 0.0;
    int ratio_count = 0;
    double ratio_geomean = 0.0;
    double ratio_min = 0.0;
    double ratio_max = 0.0;
};

struct Summary {
    ExperimentConfig config; ///< resolved, after overrides
    std::vector<RepetitionOutcome> reps;
    std::optional<Aggregate> aggregate;
    std::string summary_path; ///< empty when no artifacts were written
};

struct RunOptions {
    std::filesystem::path out_dir; ///< empty = compute only, write nothing
    bool emit_wav = false;
    bool emit_raw = false;
    int wav_bits = 24;
    std::optional<std::uint64_t> seed_override;
    std::optional<int> reps_override;
    std::optional<double> band_lo;
    std::optional<double> band_hi;
    std::optional<Window> window_override;
};

namespace detail {

inline std::string sanitize_label(std::string_view label) {
    std::string out;
    for (char c : label) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
        out += ok ? c : '_';
    }
    return out.empty() ? std::string("run") : out;
}

inline nlohmann::ordered_json parameters_json(const ExperimentConfig& cfg) {
    using json = nlohmann::ordered_json;
    json p;
    const bool generator = cfg.kind != GeneratorKind::wav_analysis;
    if (generator) {
        json ens;
        ens["fiducial_freq_hz"] = cfg.ensemble.fiducial_freq;
        ens["source_count"] = cfg.ensemble.source_count;
        ens["detune_halfwidth_hz"] = cfg.ensemble.detune_halfwidth;
        ens["duration_s"] = cfg.ensemble.duration;
        ens["sample_rate_hz"] = cfg.ensemble.sample_rate;
        p["ensemble"] = ens;
        if (cfg.ensemble.timbre) {
            json t;
            t["overtones"] = cfg.ensemble.timbre->overtone_count;
            t["spectral_slope"] = cfg.ensemble.timbre->spectral_slope;
            t["per_overtone_phase"] = cfg.ensemble.timbre->per_overtone_phase;
            p["timbre"] = t;
        }
        if (cfg.ensemble.vibrato) {
            json v;
            v["depth_hz"] = cfg.ensemble.vibrato->base_depth;
            v["depth_jitter_hz"] = cfg.ensemble.vibrato->depth_jitter;
            v["rate_lo_hz"] = cfg.ensemble.vibrato->rate_lo;
            v["rate_hi_hz"] = cfg.ensemble.vibrato->rate_hi;
            p["vibrato"] = v;
        }
        if (cfg.resonance) {
            json r;
            r["coupling"] = cfg.resonance->coupling;
            r["dissipation"] = cfg.resonance->dissipation;
            if (cfg.resonance->singularity_tolerance_hz)
                r["singularity_tolerance_hz"] = *cfg.resonance->singularity_tolerance_hz;
            p["resonance"] = r;
        }
        if (cfg.ir) {
            json r;
            r["epsilon_hz"] = cfg.ir->epsilon;
            r["kappa_max_hz"] = cfg.ir->kappa_max;
            r["symmetric"] = cfg.ir->symmetric;
            p["ir"] = r;
        }
        if (cfg.melody) {
            json m;
            m["notes"] = cfg.melody->notes;
            m["note_duration_s"] = cfg.melody->note_duration;
            m["overlap_fraction"] = cfg.melody->overlap_fraction;
            m["reference_pitch_hz"] = cfg.melody->reference_pitch;
            p["melody"] = m;
        }
        if (cfg.segments) {
            json s;
            s["count"] = cfg.segments->count;
            s["duration_s"] = cfg.segments->segment_duration;
            s["overlap_fraction"] = cfg.segments->overlap_fraction;
            p["segments"] = s;
        }
    } else if (cfg.wav) {
        json w;
        w["path"] = cfg.wav->path;
        w["channel"] = cfg.wav->channel;
        w["start_s"] = cfg.wav->start_seconds;
        if (cfg.wav->length_seconds) w["length_s"] = *cfg.wav->length_seconds;
        p["wav"] = w;
    }
    json a;
    if (cfg.analysis.fit_lo) a["fit_lo_hz"] = *cfg.analysis.fit_lo;
    else a["fit_lo_hz"] = "auto";
    a["fit_hi_hz"] = cfg.analysis.fit_hi;
    a["bins_per_decade"] = cfg.analysis.bins_per_decade;
    a["ratio_low_hz"] = cfg.analysis.ratio_low;
    a["ratio_high_hz"] = cfg.analysis.ratio_high;
    a["window"] = window_name(cfg.analysis.window);
    p["analysis"] = a;
    return p;
}

inline nlohmann::ordered_json fit_json(const PowerLawFit& fit) {
    nlohmann::ordered_json j;
    j["index"] = fit.index;
    j["log10_amplitude"] = fit.log10_amplitude;
    j["band_hz"] = {fit.f_lo, fit.f_hi};
    j["f_min_used_hz"] = fit.f_min_used;
    j["f_max_used_hz"] = fit.f_max_used;
    j["r_squared"] = fit.r_squared;
    j["points"] = fit.point_count;
    return j;
}

inline nlohmann::ordered_json ratio_json(const UBRRatio& r) {
    nlohmann::ordered_json j;
    j["value"] = r.value;
    j["low_freq_hz"] = r.low_freq;
    j["low_bin_freq_hz"] = r.low_bin_freq;
    j["low_bin_substituted"] = r.low_bin_substituted;
    j["high_threshold_hz"] = r.high_threshold;
    j["numerator"] = r.numerator;
    j["denominator"] = r.denominator;
    return j;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
    f.write(body.data(), static_cast<std::streamsize>(body.size()));
    f.flush();
    if (!f) throw IoError("failed writing '" + path.string() + "'");
}

} // namespace detail

/// Run all repetitions, optionally writing artifacts:
///   <label>_rep<k>.csv        log-binned spectrum (frequency_hz,power)
///   <label>_rep<k>.json       everything needed to reproduce the run
///   <label>_rep<k>.wav        peak-0.9 normalized export (emit_wav)
///   <label>_rep<k>_raw.csv    raw periodogram (emit_raw)
///   <label>_summary.json      aggregate over repetitions
/// All outputs are deterministic functions of the resolved config.
inline Summary run_experiment(ExperimentConfig cfg, const RunOptions& opt = {}) {
    if (opt.seed_override) cfg.master_seed = *opt.seed_override;
    if (opt.reps_override) cfg.repetitions = *opt.reps_override;
    if (opt.band_lo) cfg.analysis.fit_lo = *opt.band_lo;
    if (opt.band_hi) cfg.analysis.fit_hi = *opt.band_hi;
    if (opt.window_override) cfg.analysis.window = *opt.window_override;
    cfg.validate();
    if (opt.wav_bits != 16 && opt.wav_bits != 24 && opt.wav_bits != 32)
        throw ParameterError("run: wav bit depth must be 16, 24 or 32");

    const bool write_files = !opt.out_dir.empty();
    if (write_files) {
        std::error_code ec;
        std::filesystem::create_directories(opt.out_dir, ec);
        if (ec)
            throw IoError("cannot create output directory '" + opt.out_dir.string() +
                          "': " + ec.message());
    }
    const std::string base =
        detail::sanitize_label(cfg.label.empty() ? kind_name(cfg.kind) : cfg.label);

    Summary summary;
    summary.config = cfg;
    const SeedTree root(cfg.master_seed);

    for (int r = 0; r < cfg.repetitions; ++r) {
        const SeedTree rep_seed = root.child("rep", static_cast<std::uint64_t>(r));
        const TimeSeries signal = make_signal(cfg, rep_seed);
        const AnalysisOutcome a = analyze_series(signal, cfg.analysis, cfg.report_fit);

        RepetitionOutcome out;
        out.rep_index = r;
        out.seed_path = rep_seed.path_string();
        out.sample_count = signal.size();
        out.duration = signal.duration();
        out.peak = peak_amplitude(signal);
        out.ratio = a.ratio;
        out.fit = a.fit;
        out.fit_lo_used = a.fit_lo_used;
        out.fit_hi_used = a.fit_hi_used;
        out.binned = a.binned;

        if (write_files) {
            const std::string stem = base + "_rep" + std::to_string(r);
            const auto csv_path = opt.out_dir / (stem + ".csv");
            write_spectrum_csv(a.binned, csv_path);
            out.csv_path = csv_path.string();
            if (opt.emit_raw) {
                const auto raw_path = opt.out_dir / (stem + "_raw.csv");
                write_spectrum_csv(a.raw, raw_path);
                out.raw_csv_path = raw_path.string();
            }
            if (opt.emit_wav && cfg.kind != GeneratorKind::wav_analysis) {
                TimeSeries scaled = signal;
                out.wav_scale = normalize_peak(scaled, 0.9);
                const auto wav_path = opt.out_dir / (stem + ".wav");
                write_wav(wav_path, scaled, opt.wav_bits);
                out.wav_path = wav_path.string();
            }

            using json = nlohmann::ordered_json;
            json meta;
            meta["label"] = cfg.label.empty() ? base : cfg.label;
            meta["kind"] = kind_name(cfg.kind);
            meta["generator_version"] = version_string;
            meta["rng"] = RandomStream::algorithm();
            meta["master_seed"] = cfg.master_seed;
            meta["repetition"] = r;
            meta["seed_path"] = out.seed_path;
            meta["parameters"] = detail::parameters_json(cfg);
            json sig;
            sig["samples"] = out.sample_count;
            sig["sample_rate_hz"] = signal.sample_rate;
            sig["duration_s"] = out.duration;
            sig["peak"] = out.peak;
            meta["signal"] = sig;
            json spec;
            spec["normalization"] = a.raw.normalization;
            spec["window"] = a.raw.window;
            spec["dc_dropped"] = a.raw.dc_dropped;
            spec["frequency_resolution_hz"] = a.raw.frequency_resolution;
            spec["raw_points"] = a.raw.size();
            spec["binned_points"] = a.binned.size();
            meta["spectrum"] = spec;
            meta["fit"] = a.fit ? detail::fit_json(*a.fit) : json(nullptr);
            if (a.fit) {
                meta["fit"]["band_hz"] = {a.fit_lo_used, a.fit_hi_used};
            }
            meta["ratio"] = detail::ratio_json(a.ratio);
            json art;
            art["spectrum_csv"] = std::filesystem::path(out.csv_path).filename().string();
            if (!out.raw_csv_path.empty())
                art["raw_csv"] = std::filesystem::path(out.raw_csv_path).filename().string();
            if (!out.wav_path.empty()) {
                art["wav"] = std::filesystem::path(out.wav_path).filename().string();
                art["wav_scale"] = out.wav_scale;
                art["wav_bits"] = opt.wav_bits;
            }
            meta["artifacts"] = art;

            const auto meta_path = opt.out_dir / (stem + ".json");
            detail::write_text_file(meta_path, meta.dump(2) + "\n");
            out.meta_path = meta_path.string();
        }
        summary.reps.push_back(std::move(out));
    }

    // aggregate
    Aggregate agg;
    double gsum = 0.0, gsq = 0.0, r2sum = 0.0;
    double lsum = 0.0;
    double rmin = 0.0, rmax = 0.0;
    for (const auto& rep : summary.reps) {
        if (rep.fit) {
            ++agg.fit_count;
            gsum += rep.fit->index;
            gsq += rep.fit->index * rep.fit->index;
            r2sum += rep.fit->r_squared;
        }
        const double rv = rep.ratio.value;
        if (rv > 0.0 && std::isfinite(rv)) {
            if (agg.ratio_count == 0) {
                rmin = rmax = rv;
            } else {
                rmin = std::min(rmin, rv);
                rmax = std::max(rmax, rv);
            }
            ++agg.ratio_count;
            lsum += std::log10(rv);
        }
    }
    if (agg.fit_count > 0) {
        const double n = agg.fit_count;
        agg.gamma_mean = gsum / n;
        const double var =
            agg.fit_count > 1 ? std::max(0.0, (gsq - gsum * gsum / n) / (n - 1.0)) : 0.0;
        agg.gamma_stddev = std::sqrt(var);
        agg.gamma_stderr = agg.gamma_stddev / std::sqrt(n);
        agg.r2_mean = r2sum / n;
    }
    if (agg.ratio_count > 0) {
        agg.ratio_geomean = std::pow(10.0, lsum / agg.ratio_count);
        agg.ratio_min = rmin;
        agg.ratio_max = rmax;
    }
    if (agg.fit_count > 0 || agg.ratio_count > 0) summary.aggregate = agg;

    if (write_files) {
        using json = nlohmann::ordered_json;
        json s;
        s["label"] = cfg.label.empty() ? base : cfg.label;
        s["kind"] = kind_name(cfg.kind);
        s["generator_version"] = version_string;
        s["rng"] = RandomStream::algorithm();
        s["master_seed"] = cfg.master_seed;
        s["repetitions"] = cfg.repetitions;
        s["parameters"] = detail::parameters_json(cfg);
        if (summary.aggregate) {
            const Aggregate& g = *summary.aggregate;
            json a;
            if (g.fit_count > 0) {
                a["gamma_mean"] = g.gamma_mean;
                a["gamma_stddev"] = g.gamma_stddev;
                a["gamma_stderr"] = g.gamma_stderr;
                a["r_squared_mean"] = g.r2_mean;
                a["fit_count"] = g.fit_count;
            }
            if (g.ratio_count > 0) {
                a["ratio_geomean"] = g.ratio_geomean;
                a["ratio_min"] = g.ratio_min;
                a["ratio_max"] = g.ratio_max;
            }
            s["aggregate"] = a;
        }
        json reps = json::array();
        for (const auto& rep : summary.reps) {
            json r;
            r["repetition"] = rep.rep_index;
            r["seed_path"] = rep.seed_path;
            if (rep.fit) {
                r["gamma"] = rep.fit->index;
                r["r_squared"] = rep.fit->r_squared;
            }
            r["ratio"] = rep.ratio.value;
            r["peak"] = rep.peak;
            r["samples"] = rep.sample_count;
            reps.push_back(r);
        }
        s["repetitions_detail"] = reps;
        const auto spath = opt.out_dir / (base + "_summary.json");
        detail::write_text_file(spath, s.dump(2) + "\n");
        summary.summary_path = spath.string();
    }
    return summary;
}

/// Read a WAV from disk and push it through the analysis pipeline.
inline Summary analyze_wav(const std::filesystem::path& path, unsigned channel = 0,
                           double start_seconds = 0.0,
                           std::optional<double> length_seconds = std::nullopt,
                           const AnalysisSpec& analysis = {}, const RunOptions& opt = {}) {
    ExperimentConfig cfg;
    cfg.kind = GeneratorKind::wav_analysis;
    cfg.label = path.stem().string() + "_analysis";
    cfg.repetitions = 1;
    cfg.wav = WavSource{path.string(), channel, start_seconds, length_seconds};
    cfg.analysis = analysis;
    return run_experiment(std::move(cfg), opt);
}

/// Human-readable run report for terminals and logs.
inline std::string format_summary(const Summary& s) {
    char buf[256];
    std::string out;
    std::snprintf(buf, sizeof buf, "%s (%s), seed %llu, %d repetition%s\n",
                  s.config.label.empty() ? kind_name(s.config.kind) : s.config.label.c_str(),
                  kind_name(s.config.kind),
                  static_cast<unsigned long long>(s.config.master_seed),
                  s.config.repetitions, s.config.repetitions == 1 ? "" : "s");
    out += buf;
    for (const auto& rep : s.reps) {
        if (rep.fit)
            std::snprintf(buf, sizeof buf,
                          "  rep %d: gamma=%.4f r2=%.3f R=%.3g n=%zu (%.4g s)\n",
                          rep.rep_index, rep.fit->index, rep.fit->r_squared,
                          rep.ratio.value, rep.sample_count, rep.duration);
        else
            std::snprintf(buf, sizeof buf, "  rep %d: R=%.3g n=%zu (%.4g s)\n",
                          rep.rep_index, rep.ratio.value, rep.sample_count, rep.duration);
        out += buf;
        if (rep.ratio.low_bin_substituted) {
            std::snprintf(buf, sizeof buf,
                          "         note: %.3g Hz unresolved, ratio used the %.3g Hz bin\n",
                          rep.ratio.low_freq, rep.ratio.low_bin_freq);
            out += buf;
        }
    }
    if (s.aggregate) {
        const Aggregate& g = *s.aggregate;
        if (g.fit_count > 1) {
            std::snprintf(buf, sizeof buf,
                          "  gamma: mean %.4f +- %.4f (stddev %.4f over %d fits), r2 mean %.3f\n",
                          g.gamma_mean, g.gamma_stderr, g.gamma_stddev, g.fit_count,
                          g.r2_mean);
            out += buf;
        }
        if (g.ratio_count > 1) {
            std::snprintf(buf, sizeof buf, "  ratio: geomean %.3g, range [%.3g, %.3g]\n",
                          g.ratio_geomean, g.ratio_min, g.ratio_max);
            out += buf;
        }
    }
    if (!s.summary_path.empty()) {
        out += "  summary: " + s.summary_path + "\n";
    }
    return out;
}

} // namespace ubr
