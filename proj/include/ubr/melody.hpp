#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ubr/errors.hpp"
#include "ubr/synth.hpp"
#include "ubr/time_series.hpp"

namespace ubr {

/// Fixed-do solfege relative to a reference "la". Tokens accept the UTF-8
/// accidentals (sharp/flat/natural signs) or ASCII '#', 'b', 'n' prefixes,
/// and "sol" as an alias for "so". Offsets are semitones from la; syllables
/// do..fa sit in the octave above the reference, so and below sit under it,
/// matching a melody centered on la. `overrides` wins over the generic
/// accidental rule (+-1 semitone), which is how "#fa" lands a fifth below
/// instead of a ninth above.
struct SolfegeTable {
    std::map<std::string, int, std::less<>> base;
    std::map<std::string, int, std::less<>> overrides;

    static SolfegeTable defaults() {
        SolfegeTable t;
        t.base = {{"do", 3}, {"re", 5}, {"mi", 7}, {"fa", 8},
                  {"so", -2}, {"la", 0}, {"si", 2}};
        t.overrides = {{"#so", -1}, {"#fa", -3}};
        return t;
    }
};

namespace detail {

/// Replace UTF-8 accidental signs with ASCII and lowercase the rest.
inline std::string normalize_note_token(std::string_view token) {
    std::string out;
    out.reserve(token.size());
    std::size_t i = 0;
    while (i < token.size()) {
        const auto remaining = token.size() - i;
        const auto* b = reinterpret_cast<const unsigned char*>(token.data() + i);
        if (remaining >= 3 && b[0] == 0xe2 && b[1] == 0x99) {
            if (b[2] == 0xaf) { out += '#'; i += 3; continue; }  // sharp sign
            if (b[2] == 0xad) { out += 'b'; i += 3; continue; }  // flat sign
            if (b[2] == 0xae) { out += 'n'; i += 3; continue; }  // natural sign
        }
        char c = token[i];
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        out += c;
        ++i;
    }
    return out;
}

} // namespace detail

/// Semitone offset of a note token relative to the reference pitch.
inline int solfege_offset(std::string_view token, const SolfegeTable& table = SolfegeTable::defaults()) {
    const std::string norm = detail::normalize_note_token(token);
    if (norm.empty())
        throw ParseError("solfege: empty note token");

    int accidental = 0;
    std::string_view rest = norm;
    if (norm[0] == '#') {
        accidental = 1;
        rest = std::string_view(norm).substr(1);
    } else if (norm[0] == 'b') {
        accidental = -1;
        rest = std::string_view(norm).substr(1);
    } else if (norm[0] == 'n') {
        accidental = 0;
        rest = std::string_view(norm).substr(1);
    }
    std::string syllable(rest);
    if (syllable == "sol") syllable = "so";

    if (accidental != 0) {
        const std::string key = (accidental > 0 ? "#" : "b") + syllable;
        if (auto it = table.overrides.find(key); it != table.overrides.end())
            return it->second;
    }
    const auto it = table.base.find(syllable);
    if (it == table.base.end())
        throw ParseError("solfege: unknown note token '" + std::string(token) + "'");
    return it->second + accidental;
}

/// Equal-tempered pitch of a token: reference * 2^(offset/12).
inline double note_pitch(std::string_view token, double reference_pitch = 440.0,
                         const SolfegeTable& table = SolfegeTable::defaults()) {
    if (!(reference_pitch > 0.0) || !std::isfinite(reference_pitch))
        throw ParameterError("note_pitch: reference_pitch must be finite and > 0");
    const int semitones = solfege_offset(token, table);
    return reference_pitch * std::pow(2.0, static_cast<double>(semitones) / 12.0);
}

inline constexpr double max_overlap_fraction = 0.9;

/// A sequence of equal-duration notes rendered with a shared ensemble
/// template. Note k replaces the template's fiducial frequency with the
/// token's pitch and takes its randomness from seed.child("note", k).
struct MelodySpec {
    std::vector<std::string> notes;
    double note_duration = 1.0;    ///< seconds per note
    double overlap_fraction = 0.0; ///< 0 = juxtaposed, 0.5 = half-overlapped
    double reference_pitch = 440.0;
    EnsembleSpec note_template;
    SolfegeTable table = SolfegeTable::defaults();

    void validate() const {
        if (notes.empty())
            throw ParameterError("MelodySpec: no notes");
        if (!(note_duration > 0.0) || !std::isfinite(note_duration))
            throw ParameterError("MelodySpec: note_duration must be finite and > 0");
        if (!(overlap_fraction >= 0.0) || !(overlap_fraction <= max_overlap_fraction))
            throw ParameterError("MelodySpec: overlap_fraction must be in [0, " +
                                 std::to_string(max_overlap_fraction) + "]");
        if (!(reference_pitch > 0.0) || !std::isfinite(reference_pitch))
            throw ParameterError("MelodySpec: reference_pitch must be finite and > 0");
        for (const auto& token : notes) solfege_offset(token, table); // throws on bad token
    }
};

/// Overlap-add of the rendered notes. Note k starts at sample
/// llround(k * note_duration * (1 - overlap) * sample_rate); overlapping
/// regions add plainly, no crossfade. Total length for K equal notes is
/// duration * (K - (K-1) * overlap) up to sample rounding.
inline TimeSeries build_melody(const MelodySpec& spec) {
    spec.validate();
    const double rate = spec.note_template.sample_rate;
    const double stride_seconds = spec.note_duration * (1.0 - spec.overlap_fraction);

    TimeSeries out;
    out.sample_rate = rate;
    for (std::size_t k = 0; k < spec.notes.size(); ++k) {
        EnsembleSpec note_spec = spec.note_template;
        note_spec.fiducial_freq = note_pitch(spec.notes[k], spec.reference_pitch, spec.table);
        note_spec.duration = spec.note_duration;
        note_spec.seed = spec.note_template.seed.child("note", k);
        const TimeSeries note = synth_ensemble(note_spec);

        const auto start = static_cast<std::size_t>(
            std::llround(static_cast<double>(k) * stride_seconds * rate));
        if (start + note.size() > out.samples.size())
            out.samples.resize(start + note.size(), 0.0);
        for (std::size_t j = 0; j < note.size(); ++j)
            out.samples[start + j] += note.samples[j];
    }
    return out;
}

/// Overlap-add a list of segments (same rule as build_melody, generalized to
/// unequal lengths): segment k starts at llround((1 - overlap) * sum of the
/// previous segment lengths).
inline TimeSeries concat_segments(const std::vector<TimeSeries>& segments,
                                  double overlap_fraction) {
    if (segments.empty())
        throw ParameterError("concat_segments: no segments");
    if (!(overlap_fraction >= 0.0) || !(overlap_fraction <= max_overlap_fraction))
        throw ParameterError("concat_segments: overlap_fraction must be in [0, " +
                             std::to_string(max_overlap_fraction) + "]");
    const double rate = segments.front().sample_rate;

    TimeSeries out;
    out.sample_rate = rate;
    double cumulative = 0.0;
    for (const TimeSeries& seg : segments) {
        seg.validate();
        if (seg.sample_rate != rate)
            throw ParameterError("concat_segments: mixed sample rates " +
                                 std::to_string(rate) + " and " +
                                 std::to_string(seg.sample_rate));
        const auto start = static_cast<std::size_t>(
            std::llround((1.0 - overlap_fraction) * cumulative));
        if (start + seg.size() > out.samples.size())
            out.samples.resize(start + seg.size(), 0.0);
        for (std::size_t j = 0; j < seg.size(); ++j)
            out.samples[start + j] += seg.samples[j];
        cumulative += static_cast<double>(seg.size());
    }
    return out;
}

} // namespace ubr
