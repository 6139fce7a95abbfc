#pragma once

#include <filesystem>
#include <string>

#include "ubr/config.hpp"
#include "ubr/csv.hpp"
#include "ubr/experiment.hpp"

namespace ubr {

/// Build an ExperimentConfig from parsed key-value text. Unknown keys are
/// rejected (with their line numbers) after the known ones are consumed.
///
/// Schema, with [experiment].kind selecting the generator:
///   [experiment] kind, seed, reps, label, report_fit
///   [ensemble]   fiducial_freq, sources, detune_halfwidth, duration, sample_rate
///   [timbre]     overtones, slope, per_overtone_phase
///   [vibrato]    depth, depth_jitter, rate_lo, rate_hi
///   [resonance]  coupling, dissipation, singularity_tolerance
///   [ir]         epsilon, kappa_max, symmetric
///   [melody]     notes, note_duration, overlap, reference_pitch
///   [segments]   count, duration, overlap
///   [wav]        path, channel, start, length
///   [analysis]   fit_lo, fit_hi, bins_per_decade, ratio_low, ratio_high, window
inline ExperimentConfig experiment_from_config(const KeyValueConfig& kv) {
    ExperimentConfig cfg;
    cfg.kind = kind_from_name(kv.require_string("experiment.kind"));
    if (auto v = kv.get_string("experiment.label")) cfg.label = *v;
    if (auto v = kv.get_u64("experiment.seed")) cfg.master_seed = *v;
    if (auto v = kv.get_int("experiment.reps")) cfg.repetitions = static_cast<int>(*v);
    if (auto v = kv.get_bool("experiment.report_fit")) cfg.report_fit = *v;

    if (auto v = kv.get_double("ensemble.fiducial_freq")) cfg.ensemble.fiducial_freq = *v;
    if (auto v = kv.get_int("ensemble.sources"))
        cfg.ensemble.source_count = static_cast<int>(*v);
    if (auto v = kv.get_double("ensemble.detune_halfwidth"))
        cfg.ensemble.detune_halfwidth = *v;
    if (auto v = kv.get_double("ensemble.duration")) cfg.ensemble.duration = *v;
    if (auto v = kv.get_double("ensemble.sample_rate")) cfg.ensemble.sample_rate = *v;

    if (kv.has_section("timbre")) {
        TimbreSpec t;
        if (auto v = kv.get_int("timbre.overtones")) t.overtone_count = static_cast<int>(*v);
        if (auto v = kv.get_double("timbre.slope")) t.spectral_slope = *v;
        if (auto v = kv.get_bool("timbre.per_overtone_phase")) t.per_overtone_phase = *v;
        cfg.ensemble.timbre = t;
    }
    if (kv.has_section("vibrato")) {
        VibratoSpec v;
        if (auto x = kv.get_double("vibrato.depth")) v.base_depth = *x;
        if (auto x = kv.get_double("vibrato.depth_jitter")) v.depth_jitter = *x;
        if (auto x = kv.get_double("vibrato.rate_lo")) v.rate_lo = *x;
        if (auto x = kv.get_double("vibrato.rate_hi")) v.rate_hi = *x;
        cfg.ensemble.vibrato = v;
    }
    if (kv.has_section("resonance")) {
        ResonanceSpec r;
        if (auto x = kv.get_double("resonance.coupling")) r.coupling = *x;
        if (auto x = kv.get_double("resonance.dissipation")) r.dissipation = *x;
        if (auto x = kv.get_double("resonance.singularity_tolerance"))
            r.singularity_tolerance_hz = *x;
        cfg.resonance = r;
    }
    if (kv.has_section("ir")) {
        IRDivergentSpec ir;
        if (auto x = kv.get_double("ir.epsilon")) ir.epsilon = *x;
        if (auto x = kv.get_double("ir.kappa_max")) ir.kappa_max = *x;
        if (auto x = kv.get_bool("ir.symmetric")) ir.symmetric = *x;
        cfg.ir = ir;
    }
    if (kv.has_section("melody")) {
        MelodyParams m;
        if (auto x = kv.get_tokens("melody.notes")) m.notes = *x;
        if (auto x = kv.get_double("melody.note_duration")) m.note_duration = *x;
        if (auto x = kv.get_double("melody.overlap")) m.overlap_fraction = *x;
        if (auto x = kv.get_double("melody.reference_pitch")) m.reference_pitch = *x;
        cfg.melody = m;
    }
    if (kv.has_section("segments")) {
        SegmentParams s;
        if (auto x = kv.get_int("segments.count")) s.count = static_cast<int>(*x);
        if (auto x = kv.get_double("segments.duration")) s.segment_duration = *x;
        if (auto x = kv.get_double("segments.overlap")) s.overlap_fraction = *x;
        cfg.segments = s;
    }
    if (kv.has_section("wav")) {
        WavSource w;
        w.path = kv.require_string("wav.path");
        if (auto x = kv.get_int("wav.channel")) w.channel = static_cast<unsigned>(*x);
        if (auto x = kv.get_double("wav.start")) w.start_seconds = *x;
        if (auto x = kv.get_double("wav.length")) w.length_seconds = *x;
        cfg.wav = w;
    }
    if (auto x = kv.get_double("analysis.fit_lo")) cfg.analysis.fit_lo = *x;
    if (auto x = kv.get_double("analysis.fit_hi")) cfg.analysis.fit_hi = *x;
    if (auto x = kv.get_int("analysis.bins_per_decade"))
        cfg.analysis.bins_per_decade = static_cast<int>(*x);
    if (auto x = kv.get_double("analysis.ratio_low")) cfg.analysis.ratio_low = *x;
    if (auto x = kv.get_double("analysis.ratio_high")) cfg.analysis.ratio_high = *x;
    if (auto x = kv.get_string("analysis.window")) {
        if (*x == "hann") cfg.analysis.window = Window::hann;
        else if (*x == "none" || *x == "rect") cfg.analysis.window = Window::rect;
        else
            throw ParseError(kv.origin() + " line " +
                             std::to_string(kv.line_of("analysis.window")) +
                             ": window must be 'hann' or 'none', got '" + *x + "'");
    }

    kv.reject_unconsumed();
    cfg.validate();
    return cfg;
}

inline ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    return experiment_from_config(KeyValueConfig::parse_file(path));
}

/// Render a config back to parseable text; parse(to_config_text(c)) describes
/// the identical experiment. Doubles use shortest round-trip form.
inline std::string to_config_text(const ExperimentConfig& cfg) {
    std::string out;
    auto line = [&out](const std::string& k, const std::string& v) {
        out += k;
        out += " = ";
        out += v;
        out += '\n';
    };
    auto dbl = [&line](const std::string& k, double v) { line(k, format_shortest(v)); };

    out += "[experiment]\n";
    line("kind", kind_name(cfg.kind));
    if (!cfg.label.empty()) line("label", cfg.label);
    line("seed", std::to_string(cfg.master_seed));
    line("reps", std::to_string(cfg.repetitions));
    line("report_fit", cfg.report_fit ? "true" : "false");

    if (cfg.kind != GeneratorKind::wav_analysis) {
        out += "\n[ensemble]\n";
        dbl("fiducial_freq", cfg.ensemble.fiducial_freq);
        line("sources", std::to_string(cfg.ensemble.source_count));
        dbl("detune_halfwidth", cfg.ensemble.detune_halfwidth);
        dbl("duration", cfg.ensemble.duration);
        dbl("sample_rate", cfg.ensemble.sample_rate);
    }
    if (cfg.ensemble.timbre) {
        const TimbreSpec& t = *cfg.ensemble.timbre;
        out += "\n[timbre]\n";
        line("overtones", std::to_string(t.overtone_count));
        dbl("slope", t.spectral_slope);
        line("per_overtone_phase", t.per_overtone_phase ? "true" : "false");
    }
    if (cfg.ensemble.vibrato) {
        const VibratoSpec& v = *cfg.ensemble.vibrato;
        out += "\n[vibrato]\n";
        dbl("depth", v.base_depth);
        dbl("depth_jitter", v.depth_jitter);
        dbl("rate_lo", v.rate_lo);
        dbl("rate_hi", v.rate_hi);
    }
    if (cfg.resonance) {
        out += "\n[resonance]\n";
        dbl("coupling", cfg.resonance->coupling);
        dbl("dissipation", cfg.resonance->dissipation);
        if (cfg.resonance->singularity_tolerance_hz)
            dbl("singularity_tolerance", *cfg.resonance->singularity_tolerance_hz);
    }
    if (cfg.ir) {
        out += "\n[ir]\n";
        dbl("epsilon", cfg.ir->epsilon);
        dbl("kappa_max", cfg.ir->kappa_max);
        line("symmetric", cfg.ir->symmetric ? "true" : "false");
    }
    if (cfg.melody) {
        out += "\n[melody]\n";
        std::string notes;
        for (const auto& n : cfg.melody->notes) {
            if (!notes.empty()) notes += ' ';
            notes += n;
        }
        line("notes", notes);
        dbl("note_duration", cfg.melody->note_duration);
        dbl("overlap", cfg.melody->overlap_fraction);
        dbl("reference_pitch", cfg.melody->reference_pitch);
    }
    if (cfg.segments) {
        out += "\n[segments]\n";
        line("count", std::to_string(cfg.segments->count));
        dbl("duration", cfg.segments->segment_duration);
        dbl("overlap", cfg.segments->overlap_fraction);
    }
    if (cfg.wav) {
        out += "\n[wav]\n";
        line("path", cfg.wav->path);
        line("channel", std::to_string(cfg.wav->channel));
        dbl("start", cfg.wav->start_seconds);
        if (cfg.wav->length_seconds) dbl("length", *cfg.wav->length_seconds);
    }
    out += "\n[analysis]\n";
    if (cfg.analysis.fit_lo) dbl("fit_lo", *cfg.analysis.fit_lo);
    dbl("fit_hi", cfg.analysis.fit_hi);
    line("bins_per_decade", std::to_string(cfg.analysis.bins_per_decade));
    dbl("ratio_low", cfg.analysis.ratio_low);
    dbl("ratio_high", cfg.analysis.ratio_high);
    line("window", cfg.analysis.window == Window::hann ? "hann" : "none");
    return out;
}

} // namespace ubr
