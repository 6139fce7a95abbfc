#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "ubr/errors.hpp"
#include "ubr/seed_tree.hpp"
#include "ubr/time_series.hpp"

namespace ubr {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Overtone stack: overtone m in 1..overtone_count carries weight
/// m^spectral_slope. With per_overtone_phase each overtone draws its own
/// additive phase; by default one phase is shared across the stack.
struct TimbreSpec {
    int overtone_count = 1;
    double spectral_slope = 0.0;
    bool per_overtone_phase = false;

    void validate() const {
        if (overtone_count < 1)
            throw ParameterError("TimbreSpec: overtone_count must be >= 1, got " +
                                 std::to_string(overtone_count));
        if (!std::isfinite(spectral_slope))
            throw ParameterError("TimbreSpec: spectral_slope must be finite");
    }
};

/// Sinusoidal frequency modulation. Per source, the depth is
/// base_depth + uniform(-depth_jitter, depth_jitter) and the rate is
/// uniform(rate_lo, rate_hi); both in Hz.
struct VibratoSpec {
    double base_depth = 0.0;
    double depth_jitter = 0.0;
    double rate_lo = 0.0;
    double rate_hi = 0.0;

    void validate() const {
        if (!std::isfinite(base_depth) || !std::isfinite(depth_jitter) ||
            !std::isfinite(rate_lo) || !std::isfinite(rate_hi))
            throw ParameterError("VibratoSpec: parameters must be finite");
        if (depth_jitter < 0.0)
            throw ParameterError("VibratoSpec: depth_jitter must be >= 0");
        if (rate_lo > rate_hi)
            throw ParameterError("VibratoSpec: rate_lo must be <= rate_hi");
    }

    double max_abs_depth() const noexcept { return std::fabs(base_depth) + depth_jitter; }
};

/// A unison of detuned sources around one fiducial frequency. Each source i
/// draws its parameters from purpose-keyed children of `seed` (see SeedTree),
/// so the same seed reproduces the same ensemble regardless of which optional
/// features are enabled.
struct EnsembleSpec {
    double fiducial_freq = 440.0;   ///< Hz
    int source_count = 1;           ///< N
    double detune_halfwidth = 0.0;  ///< Hz; detunes are uniform on +-this
    double duration = 1.0;          ///< seconds
    double sample_rate = 44100.0;   ///< Hz
    std::optional<TimbreSpec> timbre;
    std::optional<VibratoSpec> vibrato;
    SeedTree seed{0};

    std::size_t sample_count() const {
        const long long n = std::llround(duration * sample_rate);
        return n > 0 ? static_cast<std::size_t>(n) : 0;
    }

    void validate() const {
        if (!(fiducial_freq > 0.0) || !std::isfinite(fiducial_freq))
            throw ParameterError("EnsembleSpec: fiducial_freq must be finite and > 0");
        if (source_count < 1)
            throw ParameterError("EnsembleSpec: source_count must be >= 1, got " +
                                 std::to_string(source_count));
        if (!(detune_halfwidth >= 0.0) || !std::isfinite(detune_halfwidth))
            throw ParameterError("EnsembleSpec: detune_halfwidth must be finite and >= 0");
        if (!(duration > 0.0) || !std::isfinite(duration))
            throw ParameterError("EnsembleSpec: duration must be finite and > 0");
        if (!(sample_rate > 0.0) || !std::isfinite(sample_rate))
            throw ParameterError("EnsembleSpec: sample_rate must be finite and > 0");
        if (sample_count() < 1)
            throw ParameterError("EnsembleSpec: duration rounds to zero samples");
        if (timbre) timbre->validate();
        if (vibrato) vibrato->validate();

        // Highest instantaneous partial frequency must stay below Nyquist.
        const double unit = fiducial_freq + detune_halfwidth +
                            (vibrato ? vibrato->max_abs_depth() : 0.0);
        const int overtones = timbre ? timbre->overtone_count : 1;
        const double nyquist = sample_rate / 2.0;
        if (static_cast<double>(overtones) * unit >= nyquist) {
            const int bad = std::max(1, static_cast<int>(std::ceil(nyquist / unit)));
            throw ParameterError("EnsembleSpec: overtone " + std::to_string(bad) +
                                 " reaches " + std::to_string(static_cast<double>(bad) * unit) +
                                 " Hz, at or above the Nyquist frequency " +
                                 std::to_string(nyquist) + " Hz");
        }
    }
};

inline constexpr double vibrato_rate_guard_hz = 1e-6;

/// Phase of a frequency-modulated oscillator at time t:
/// the integral of 2*pi*(freq + depth*sin(2*pi*rate*t' + phase_offset)) dt'
/// from 0 to t, in closed form. Below |rate| = vibrato_rate_guard_hz the
/// rate->0 limit (a constant frequency offset depth*sin(phase_offset)) is
/// used to avoid the 0/0; depth == 0 returns the bare carrier phase first,
/// so a rate range containing 0 is harmless when there is no modulation.
inline double vibrato_phase(double freq, double rate, double depth, double phase_offset,
                            double t) {
    const double carrier = two_pi * freq * t;
    if (depth == 0.0) return carrier;
    if (std::fabs(rate) < vibrato_rate_guard_hz)
        return two_pi * depth * t * std::sin(phase_offset) + carrier;
    const double half = std::numbers::pi * rate * t;
    return 2.0 * depth * std::sin(half) * std::sin(half + phase_offset) / rate + carrier;
}

/// Values drawn for one source. stack_phases has one entry (shared across the
/// overtone stack) unless per_overtone_phase is set, then one per overtone.
struct SourceParams {
    double detune = 0.0;
    std::vector<double> stack_phases{0.0};
    double vibrato_rate = 0.0;
    double vibrato_depth = 0.0;
    double vibrato_phase_offset = 0.0;
};

/// The draw schedule is a reproducibility contract: every quantity comes from
/// its own purpose-keyed child stream, so enabling or disabling a feature
/// never shifts the draws of another.
inline SourceParams draw_source_params(const EnsembleSpec& spec, int source_index) {
    const auto idx = static_cast<std::uint64_t>(source_index);
    SourceParams p;
    {
        auto s = spec.seed.child("xi", idx).stream();
        p.detune = s.uniform(-spec.detune_halfwidth, spec.detune_halfwidth);
    }
    if (spec.timbre) {
        auto s = spec.seed.child("eta", idx).stream();
        const std::size_t count =
            spec.timbre->per_overtone_phase
                ? static_cast<std::size_t>(spec.timbre->overtone_count)
                : 1;
        p.stack_phases.resize(count);
        for (double& ph : p.stack_phases) ph = s.uniform(-std::numbers::pi, std::numbers::pi);
    }
    if (spec.vibrato) {
        p.vibrato_rate =
            spec.seed.child("theta", idx).stream().uniform(spec.vibrato->rate_lo,
                                                           spec.vibrato->rate_hi);
        p.vibrato_depth =
            spec.vibrato->base_depth +
            spec.seed.child("depth", idx).stream().uniform(-spec.vibrato->depth_jitter,
                                                           spec.vibrato->depth_jitter);
        p.vibrato_phase_offset =
            spec.seed.child("vibeta", idx).stream().uniform(-std::numbers::pi,
                                                            std::numbers::pi);
    }
    return p;
}

namespace detail {

/// One oscillator with an overtone stack on a common base phase.
struct SourceVoice {
    double freq = 0.0;
    std::vector<double> weights;      ///< overtone weights, size M
    std::vector<double> stack_phases; ///< size 1 (shared) or M
    bool has_vibrato = false;
    double vib_rate = 0.0;
    double vib_depth = 0.0;
    double vib_phase_offset = 0.0;
};

/// acc[j] += sum_m weights[m-1] * sin(m * base(t_j) + phase_m), where base is
/// either 2*pi*freq*t or the vibrato phase. Overtones come from the angle
/// recurrence sin/cos(m*base) = rotate by base, one sin/cos pair per sample;
/// the recurrence error grows like M*eps and stays below 1e-14 for M <= 1000.
inline void accumulate_voice(std::vector<double>& acc, const SourceVoice& v,
                             double sample_rate) {
    const std::size_t n = acc.size();
    const std::size_t m_count = v.weights.size();
    const bool shared = v.stack_phases.size() == 1;
    std::vector<double> psin(v.stack_phases.size()), pcos(v.stack_phases.size());
    for (std::size_t k = 0; k < v.stack_phases.size(); ++k) {
        psin[k] = std::sin(v.stack_phases[k]);
        pcos[k] = std::cos(v.stack_phases[k]);
    }

    const double dt = 1.0 / sample_rate;
    const double w = two_pi * v.freq;
    for (std::size_t j = 0; j < n; ++j) {
        const double t = static_cast<double>(j) * dt;
        const double base =
            v.has_vibrato
                ? vibrato_phase(v.freq, v.vib_rate, v.vib_depth, v.vib_phase_offset, t)
                : w * t;
        const double sb = std::sin(base);
        const double cb = std::cos(base);
        double sm = sb;
        double cm = cb;
        double sum = v.weights[0] * (sm * pcos[0] + cm * psin[0]);
        for (std::size_t m = 2; m <= m_count; ++m) {
            const double sn = sm * cb + cm * sb;
            const double cn = cm * cb - sm * sb;
            sm = sn;
            cm = cn;
            const std::size_t k = shared ? 0 : m - 1;
            sum += v.weights[m - 1] * (sm * pcos[k] + cm * psin[k]);
        }
        acc[j] += sum;
    }
}

inline std::vector<double> overtone_weights(const std::optional<TimbreSpec>& timbre) {
    const int m_count = timbre ? timbre->overtone_count : 1;
    const double slope = timbre ? timbre->spectral_slope : 0.0;
    std::vector<double> w(static_cast<std::size_t>(m_count));
    for (int m = 1; m <= m_count; ++m)
        w[static_cast<std::size_t>(m - 1)] = std::pow(static_cast<double>(m), slope);
    return w;
}

} // namespace detail

/// Unison sum over all sources, in source order. Handles any combination of
/// timbre and vibrato; the public entry points below pin down which.
inline TimeSeries synth_ensemble(const EnsembleSpec& spec) {
    spec.validate();
    TimeSeries out;
    out.sample_rate = spec.sample_rate;
    out.samples.assign(spec.sample_count(), 0.0);
    const std::vector<double> weights = detail::overtone_weights(spec.timbre);

    for (int i = 0; i < spec.source_count; ++i) {
        const SourceParams p = draw_source_params(spec, i);
        detail::SourceVoice v;
        v.freq = spec.fiducial_freq + p.detune;
        v.weights = weights;
        v.stack_phases = p.stack_phases;
        if (spec.vibrato) {
            v.has_vibrato = true;
            v.vib_rate = p.vibrato_rate;
            v.vib_depth = p.vibrato_depth;
            v.vib_phase_offset = p.vibrato_phase_offset;
        }
        detail::accumulate_voice(out.samples, v, spec.sample_rate);
    }
    return out;
}

/// One overtone stack at a fixed frequency and phase; the building block the
/// unison sums are linear in.
inline TimeSeries synth_timbre_note(double freq, const TimbreSpec& timbre, double phase,
                                    std::size_t sample_count, double sample_rate) {
    timbre.validate();
    if (!(freq > 0.0) || !std::isfinite(freq))
        throw ParameterError("synth_timbre_note: freq must be finite and > 0");
    if (sample_count < 1) throw ParameterError("synth_timbre_note: empty note");
    if (!(sample_rate > 0.0))
        throw ParameterError("synth_timbre_note: sample_rate must be > 0");

    TimeSeries out;
    out.sample_rate = sample_rate;
    out.samples.assign(sample_count, 0.0);
    detail::SourceVoice v;
    v.freq = freq;
    v.weights = detail::overtone_weights(timbre);
    v.stack_phases = {phase};
    detail::accumulate_voice(out.samples, v, sample_rate);
    return out;
}

inline TimeSeries synth_unison_timbre(const EnsembleSpec& spec) {
    if (!spec.timbre)
        throw ParameterError("synth_unison_timbre: spec.timbre is required");
    if (spec.vibrato)
        throw ParameterError("synth_unison_timbre: spec.vibrato must be empty here");
    return synth_ensemble(spec);
}

inline TimeSeries synth_unison_vibrato(const EnsembleSpec& spec) {
    if (!spec.vibrato)
        throw ParameterError("synth_unison_vibrato: spec.vibrato is required");
    if (spec.timbre)
        throw ParameterError("synth_unison_vibrato: spec.timbre must be empty here");
    return synth_ensemble(spec);
}

inline TimeSeries synth_unison_timbre_vibrato(const EnsembleSpec& spec) {
    if (!spec.timbre || !spec.vibrato)
        throw ParameterError(
            "synth_unison_timbre_vibrato: both timbre and vibrato are required");
    return synth_ensemble(spec);
}

/// Driven-resonator pair: per source, a resonator line at the fiducial
/// frequency with amplitude coupling/denominator plus a unit-amplitude line
/// at the detuned frequency; with timbre both lines extend to overtone
/// stacks (overtone m scales both frequencies by m). No random phases.
struct ResonanceSpec {
    double coupling = 10.0;    ///< drive strength (lambda)
    double dissipation = 0.0;  ///< damping (mu), >= 0; 0 means undamped
    /// Reject detune draws closer to the resonance pole than this (Hz).
    /// Defaults to 5e-4 * fiducial_freq. Irrelevant when dissipation > 0,
    /// which bounds the denominator away from zero on its own.
    std::optional<double> singularity_tolerance_hz;

    void validate() const {
        if (!std::isfinite(coupling))
            throw ParameterError("ResonanceSpec: coupling must be finite");
        if (!(dissipation >= 0.0) || !std::isfinite(dissipation))
            throw ParameterError("ResonanceSpec: dissipation must be finite and >= 0");
        if (singularity_tolerance_hz &&
            (!(*singularity_tolerance_hz > 0.0) || !std::isfinite(*singularity_tolerance_hz)))
            throw ParameterError("ResonanceSpec: singularity_tolerance_hz must be > 0");
    }
};

inline TimeSeries synth_resonance(const EnsembleSpec& spec, const ResonanceSpec& res) {
    spec.validate();
    res.validate();
    if (spec.vibrato)
        throw ParameterError("synth_resonance: vibrato is not part of the resonant model");

    TimeSeries out;
    out.sample_rate = spec.sample_rate;
    out.samples.assign(spec.sample_count(), 0.0);
    const std::vector<double> weights = detail::overtone_weights(spec.timbre);
    const std::size_t m_count = weights.size();

    const double f0 = spec.fiducial_freq;
    const double tol_hz = res.singularity_tolerance_hz.value_or(5e-4 * f0);
    const double min_d2 = 2.0 * f0 * tol_hz; // first-order |(f0+xi)^2 - f0^2| bound

    for (int i = 0; i < spec.source_count; ++i) {
        auto xi_stream = spec.seed.child("xi", static_cast<std::uint64_t>(i)).stream();
        double xi = 0.0;
        double d2 = 0.0;
        bool accepted = false;
        for (int attempt = 0; attempt < 100; ++attempt) {
            xi = xi_stream.uniform(-spec.detune_halfwidth, spec.detune_halfwidth);
            d2 = (f0 + xi) * (f0 + xi) - f0 * f0;
            if (res.dissipation > 0.0 || std::fabs(d2) >= min_d2) {
                accepted = true;
                break;
            }
        }
        if (!accepted)
            throw ParameterError(
                "synth_resonance: source " + std::to_string(i) +
                " cannot draw a detune clear of the resonance pole (tolerance " +
                std::to_string(tol_hz) +
                " Hz); widen detune_halfwidth or set dissipation > 0");

        detail::SourceVoice resonator;
        resonator.freq = f0;
        resonator.weights.resize(m_count);
        for (std::size_t m = 1; m <= m_count; ++m) {
            const double md2 = static_cast<double>(m) * static_cast<double>(m) * d2;
            const double denom =
                res.dissipation > 0.0
                    ? std::hypot(md2, 2.0 * res.dissipation * static_cast<double>(m) * f0)
                    : md2;
            resonator.weights[m - 1] = weights[m - 1] * res.coupling / denom;
        }
        resonator.stack_phases = {0.0};

        detail::SourceVoice driven;
        driven.freq = f0 + xi;
        driven.weights = weights;
        driven.stack_phases = {0.0};

        detail::accumulate_voice(out.samples, resonator, spec.sample_rate);
        detail::accumulate_voice(out.samples, driven, spec.sample_rate);
    }
    return out;
}

/// Plain-sine ensemble whose per-source frequency shifts follow the
/// divergent 1/(kappa + epsilon) law: sum_i sin(2*pi*(f0 + kappa_i) t + eta_i).
/// Evaluated with a per-source second-order sine recurrence in blocks of 8
/// lanes; the in-block reduction tree and the block order are fixed, they are
/// part of the deterministic-output contract. Recurrence drift over a segment
/// stays orders of magnitude below the oscillator amplitude (about
/// n * 1e-16 / sin(2*pi*f/rate) absolute).
inline TimeSeries synth_ir_ensemble(const EnsembleSpec& spec, const IRDivergentSpec& ir) {
    spec.validate();
    ir.validate();
    if (spec.timbre || spec.vibrato)
        throw ParameterError("synth_ir_ensemble: timbre/vibrato are not part of this model");
    if (spec.detune_halfwidth != 0.0)
        throw ParameterError("synth_ir_ensemble: detune_halfwidth is unused here; "
                             "frequency shifts come from the IR spec");
    const double nyquist = spec.sample_rate / 2.0;
    if (spec.fiducial_freq + ir.kappa_max >= nyquist)
        throw ParameterError("synth_ir_ensemble: fiducial_freq + kappa_max = " +
                             std::to_string(spec.fiducial_freq + ir.kappa_max) +
                             " Hz reaches the Nyquist frequency " + std::to_string(nyquist) +
                             " Hz");

    TimeSeries out;
    out.sample_rate = spec.sample_rate;
    const std::size_t n = spec.sample_count();
    out.samples.assign(n, 0.0);
    double* acc = out.samples.data();

    const double rad_per_sample = two_pi / spec.sample_rate;
    constexpr int lanes = 8;
    const int n_sources = spec.source_count;

    for (int block = 0; block < n_sources; block += lanes) {
        double c2[lanes], sp[lanes], sc[lanes];
        for (int l = 0; l < lanes; ++l) {
            const int i = block + l;
            if (i < n_sources) {
                auto kappa_stream =
                    spec.seed.child("kappa", static_cast<std::uint64_t>(i)).stream();
                const double kappa = sample_ir_divergent(ir, kappa_stream);
                auto eta_stream =
                    spec.seed.child("eta", static_cast<std::uint64_t>(i)).stream();
                const double eta =
                    eta_stream.uniform(-std::numbers::pi, std::numbers::pi);
                const double step = rad_per_sample * (spec.fiducial_freq + kappa);
                c2[l] = 2.0 * std::cos(step);
                sp[l] = std::sin(eta);
                sc[l] = std::sin(step + eta);
            } else {
                // idle lane: contributes exact zeros
                c2[l] = 2.0;
                sp[l] = 0.0;
                sc[l] = 0.0;
            }
        }

        const auto tree8 = [](const double* s) {
            return ((s[0] + s[1]) + (s[2] + s[3])) + ((s[4] + s[5]) + (s[6] + s[7]));
        };
        acc[0] += tree8(sp);
        if (n > 1) acc[1] += tree8(sc);
        for (std::size_t j = 2; j < n; ++j) {
            double s[lanes];
            for (int l = 0; l < lanes; ++l) {
                s[l] = c2[l] * sc[l] - sp[l];
                sp[l] = sc[l];
                sc[l] = s[l];
            }
            acc[j] += tree8(s);
        }
    }
    return out;
}

} // namespace ubr
