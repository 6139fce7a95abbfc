#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ubr/experiment.hpp"

namespace ubr {

/// A canned experiment: one spectrum panel of the reproduction study.
struct Preset {
    std::string id;
    std::string summary;
    ExperimentConfig config;
};

namespace detail {

inline std::vector<Preset> build_presets() {
    std::vector<Preset> out;
    auto add = [&out](std::string id, std::string summary, ExperimentConfig cfg) {
        cfg.label = id;
        cfg.master_seed = 1;
        cfg.repetitions = 5;
        out.push_back(Preset{std::move(id), std::move(summary), std::move(cfg)});
    };

    // -- timbre unisons: overtone stacks, uniform detune --------------------
    {
        ExperimentConfig c;
        c.kind = GeneratorKind::timbre_unison;
        c.ensemble.fiducial_freq = 440.0;
        c.ensemble.detune_halfwidth = 3.0;
        c.ensemble.duration = 10.0;
        c.ensemble.timbre = TimbreSpec{30, -0.7, false};

        c.ensemble.source_count = 1;
        c.report_fit = false;
        add("fig1a", "single 30-overtone source, 440 Hz, slope -0.7, 10 s (no enhancement)", c);

        c.ensemble.source_count = 5;
        c.report_fit = true;
        add("fig1b", "unison of 5 detuned 30-overtone sources, +-3 Hz, 10 s", c);

        c.ensemble.source_count = 10;
        add("fig1c", "unison of 10 detuned 30-overtone sources, +-3 Hz, 10 s", c);
    }

    // -- vibrato unisons: random FM rate/depth per source -------------------
    {
        ExperimentConfig c;
        c.kind = GeneratorKind::vibrato_unison;
        c.ensemble.fiducial_freq = 440.0;
        c.ensemble.detune_halfwidth = 6.0;
        c.ensemble.duration = 10.0;
        c.ensemble.vibrato = VibratoSpec{2.0, 1.0, -1.0, 10.0};

        c.ensemble.source_count = 1;
        c.report_fit = false;
        add("fig2a", "single vibrato source, depth 2+-1 Hz, rate in [-1, 10] Hz, 10 s", c);

        c.ensemble.source_count = 5;
        c.report_fit = true;
        add("fig2b", "unison of 5 vibrato sources, detune +-6 Hz, 10 s", c);

        c.ensemble.source_count = 10;
        add("fig2c", "unison of 10 vibrato sources, detune +-6 Hz, 10 s", c);
    }

    // -- combined timbre + vibrato ------------------------------------------
    {
        ExperimentConfig c;
        c.kind = GeneratorKind::timbre_vibrato;
        c.ensemble.fiducial_freq = 440.0;
        c.ensemble.vibrato = VibratoSpec{2.0, 1.0, -1.0, 10.0};

        c.ensemble.source_count = 5;
        c.ensemble.detune_halfwidth = 1.0;
        c.ensemble.duration = 10.0;
        c.ensemble.timbre = TimbreSpec{5, -0.7, false};
        add("fig3a", "5 sources x 5 overtones with vibrato, detune +-1 Hz, 10 s", c);

        c.ensemble.source_count = 10;
        c.ensemble.timbre = TimbreSpec{10, -0.7, false};
        add("fig3b", "10 sources x 10 overtones with vibrato, detune +-1 Hz, 10 s", c);

        c.ensemble.detune_halfwidth = 0.1;
        c.ensemble.duration = 100.0;
        c.analysis.fit_lo = 0.01;
        add("fig3c", "10 sources x 10 overtones with vibrato, detune +-0.1 Hz, 100 s", c);
    }

    // -- melody: 16 one-second notes, varying overlap ------------------------
    {
        ExperimentConfig c;
        c.kind = GeneratorKind::melody;
        c.ensemble.fiducial_freq = 440.0; // replaced per note
        c.ensemble.source_count = 1;
        c.ensemble.detune_halfwidth = 3.0;
        c.ensemble.duration = 1.0;
        c.ensemble.timbre = TimbreSpec{10, -0.7, false};
        MelodyParams m;
        m.notes = {"re", "mi", "fa", "re", "re", "do", "nsi", "la",
                   "#so", "la", "nsi", "la", "so", "#fa", "mi", "re"};
        m.note_duration = 1.0;
        m.reference_pitch = 440.0;

        m.overlap_fraction = 0.0;
        c.melody = m;
        c.report_fit = false;
        add("fig4a", "16-note melody, 1 s notes, no overlap", c);

        m.overlap_fraction = 0.01;
        c.melody = m;
        c.report_fit = true;
        add("fig4b", "16-note melody, 1 s notes, 1% overlap", c);

        m.overlap_fraction = 0.10;
        c.melody = m;
        add("fig4c", "16-note melody, 1 s notes, 10% overlap", c);
    }

    // -- driven resonators ----------------------------------------------------
    {
        ExperimentConfig c;
        c.kind = GeneratorKind::resonance;
        c.ensemble.fiducial_freq = 440.0;
        c.ensemble.source_count = 10;
        c.ensemble.duration = 10.0;

        c.ensemble.detune_halfwidth = 10.0;
        c.resonance = ResonanceSpec{10.0, 0.0, {}};
        add("fig5a", "10 driven resonators, coupling 10, detune +-10 Hz, no timbre", c);

        c.ensemble.detune_halfwidth = 3.0;
        c.ensemble.timbre = TimbreSpec{5, -0.7, false};
        add("fig5b", "10 driven resonators with 5-overtone timbre, detune +-3 Hz", c);

        c.resonance = ResonanceSpec{10.0, 10.0, {}};
        add("fig5c", "10 damped driven resonators (dissipation 10) with timbre", c);
    }

    // -- divergent-detune ensembles -------------------------------------------
    {
        ExperimentConfig c;
        c.kind = GeneratorKind::ir_ensemble;
        c.ensemble.fiducial_freq = 4400.0;
        c.ensemble.source_count = 300;
        c.ensemble.duration = 10.0;
        c.ir = IRDivergentSpec{1e-5, 3000.0, true};
        add("fig6a", "300 sources, 1/(kappa+1e-5) detunes within +-3000 Hz, 10 s", c);
    }
    {
        ExperimentConfig c;
        c.kind = GeneratorKind::ir_segments;
        c.ensemble.fiducial_freq = 4400.0;
        c.ensemble.source_count = 4096;
        c.ensemble.duration = 1.0; // per segment; [segments] duration governs
        c.ir = IRDivergentSpec{1e-5, 12400.0, true};

        c.segments = SegmentParams{100, 1.0, 0.0};
        add("fig6b", "100 x 1 s segments of 4096-source divergent ensembles, juxtaposed", c);

        c.segments = SegmentParams{100, 1.0, 0.5};
        add("fig6c", "100 x 1 s segments of 4096-source divergent ensembles, 50% overlap", c);
    }

    return out;
}

} // namespace detail

inline const std::vector<Preset>& preset_registry() {
    static const std::vector<Preset> presets = detail::build_presets();
    return presets;
}

inline const Preset& find_preset(std::string_view id) {
    for (const Preset& p : preset_registry())
        if (p.id == id) return p;
    std::string known;
    for (const Preset& p : preset_registry()) {
        if (!known.empty()) known += ", ";
        known += p.id;
    }
    throw ParameterError("unknown preset '" + std::string(id) + "'; available: " + known);
}

inline Summary run_preset(std::string_view id, const RunOptions& opt = {}) {
    return run_experiment(find_preset(id).config, opt);
}

} // namespace ubr
