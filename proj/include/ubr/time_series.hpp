#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "ubr/errors.hpp"

namespace ubr {

/// Uniformly sampled real signal.
struct TimeSeries {
    std::vector<double> samples;
    double sample_rate = 0.0; ///< Hz

    std::size_t size() const noexcept { return samples.size(); }
    double duration() const noexcept {
        return sample_rate > 0.0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
    }

    void validate() const {
        if (!(sample_rate > 0.0) || !std::isfinite(sample_rate))
            throw ParameterError("TimeSeries: sample_rate must be finite and > 0");
        if (samples.empty())
            throw ParameterError("TimeSeries: empty signal");
    }
};

/// Extract [start, start + length) seconds. The window is clamped to the
/// signal; an empty intersection is an error.
inline TimeSeries clip(const TimeSeries& in, double start_seconds, double length_seconds) {
    in.validate();
    if (!(start_seconds >= 0.0) || !std::isfinite(start_seconds))
        throw ParameterError("clip: start must be finite and >= 0");
    if (!(length_seconds > 0.0) || !std::isfinite(length_seconds))
        throw ParameterError("clip: length must be finite and > 0");

    const auto n = static_cast<long long>(in.samples.size());
    long long first = std::llround(start_seconds * in.sample_rate);
    long long last = std::llround((start_seconds + length_seconds) * in.sample_rate);
    if (first >= n)
        throw ParameterError("clip: start " + std::to_string(start_seconds) +
                             " s is past the end of a " + std::to_string(in.duration()) +
                             " s signal");
    if (last > n) last = n;
    TimeSeries out;
    out.sample_rate = in.sample_rate;
    out.samples.assign(in.samples.begin() + first, in.samples.begin() + last);
    if (out.samples.empty())
        throw ParameterError("clip: selected window is empty");
    return out;
}

inline double peak_amplitude(const TimeSeries& in) {
    double peak = 0.0;
    for (double x : in.samples) {
        const double a = std::fabs(x);
        if (a > peak) peak = a;
    }
    return peak;
}

/// Scale in place so the peak equals `target`. Returns the applied factor
/// (1.0 for an all-zero signal).
inline double normalize_peak(TimeSeries& in, double target = 0.9) {
    if (!(target > 0.0) || !std::isfinite(target))
        throw ParameterError("normalize_peak: target must be finite and > 0");
    const double peak = peak_amplitude(in);
    if (peak == 0.0) return 1.0;
    const double scale = target / peak;
    for (double& x : in.samples) x *= scale;
    return scale;
}

} // namespace ubr
