#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "ubr/errors.hpp"
#include "ubr/fft.hpp"
#include "ubr/time_series.hpp"

namespace ubr {

enum class Window { rect, hann };

inline const char* window_name(Window w) noexcept {
    return w == Window::hann ? "hann" : "rect";
}

/// One-sided power spectrum.
struct PowerSpectrum {
    std::vector<double> frequencies; ///< Hz, strictly ascending
    std::vector<double> power;       ///< same length, >= 0
    std::string normalization = "Xk2_over_n"; ///< |X_k|^2 / n per bin
    std::string window = "rect";
    bool dc_dropped = true;         ///< bin 0 is excluded by construction
    bool log_binned = false;
    double frequency_resolution = 0.0; ///< Delta f = 1/tau of the source signal

    std::size_t size() const noexcept { return frequencies.size(); }
};

/// Pointwise square. The envelope of the squared amplitude is where
/// slow beat structure shows up as spectral lines.
inline TimeSeries square_signal(const TimeSeries& in) {
    in.validate();
    TimeSeries out;
    out.sample_rate = in.sample_rate;
    out.samples.resize(in.samples.size());
    for (std::size_t j = 0; j < in.samples.size(); ++j)
        out.samples[j] = in.samples[j] * in.samples[j];
    return out;
}

/// Binary event series: 1 where the sign of the input flips relative to the
/// previous sample (zeros count as positive), else 0. First sample is 0.
inline TimeSeries zero_crossings(const TimeSeries& in) {
    in.validate();
    TimeSeries out;
    out.sample_rate = in.sample_rate;
    out.samples.assign(in.samples.size(), 0.0);
    for (std::size_t j = 1; j < in.samples.size(); ++j) {
        const bool prev = in.samples[j - 1] >= 0.0;
        const bool curr = in.samples[j] >= 0.0;
        out.samples[j] = (prev != curr) ? 1.0 : 0.0;
    }
    return out;
}

/// Periodogram S_k = |X_k|^2 / n for k = 1..n/2, frequencies k/tau.
/// The DC bin is dropped (flagged in the result); for the Hann window the
/// signal mean is subtracted first, otherwise the huge offset of a squared
/// signal leaks through the window's sidelobes into the low bins.
inline PowerSpectrum periodogram(const TimeSeries& in, Window window = Window::rect) {
    in.validate();
    const std::size_t n = in.samples.size();
    if (n < 16)
        throw ParameterError("periodogram: need at least 16 samples, got " +
                             std::to_string(n));

    std::vector<double> buf;
    const std::vector<double>* src = &in.samples;
    if (window == Window::hann) {
        buf.resize(n);
        double mean = 0.0;
        for (double x : in.samples) mean += x;
        mean /= static_cast<double>(n);
        const double step = 2.0 * std::numbers::pi / static_cast<double>(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double w = 0.5 - 0.5 * std::cos(step * static_cast<double>(j));
            buf[j] = (in.samples[j] - mean) * w;
        }
        src = &buf;
    }

    const auto spectrum = fft::real_dft(*src);
    const double tau = static_cast<double>(n) / in.sample_rate;
    const std::size_t nbins = n / 2; // k = 1..n/2

    PowerSpectrum out;
    out.window = window_name(window);
    out.dc_dropped = true;
    out.frequency_resolution = 1.0 / tau;
    out.frequencies.resize(nbins);
    out.power.resize(nbins);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t k = 1; k <= nbins; ++k) {
        out.frequencies[k - 1] = static_cast<double>(k) / tau;
        out.power[k - 1] = std::norm(spectrum[k]) * inv_n;
    }
    return out;
}

/// Geometric binning: points land in bin floor(bpd * log10(f)), each bin
/// reports the arithmetic mean power at the bin's geometric center.
/// Empty bins are dropped. Non-positive frequencies are skipped.
inline PowerSpectrum log_bin(const PowerSpectrum& in, int bins_per_decade = 20) {
    if (bins_per_decade < 4)
        throw ParameterError("log_bin: bins_per_decade must be >= 4, got " +
                             std::to_string(bins_per_decade));
    if (in.frequencies.size() != in.power.size())
        throw ParameterError("log_bin: frequency/power length mismatch");

    const double bpd = static_cast<double>(bins_per_decade);
    std::map<long long, std::pair<double, std::size_t>> bins; // index -> (sum, count)
    for (std::size_t i = 0; i < in.frequencies.size(); ++i) {
        const double f = in.frequencies[i];
        if (!(f > 0.0)) continue;
        const auto idx = static_cast<long long>(std::floor(bpd * std::log10(f)));
        auto& [sum, count] = bins[idx];
        sum += in.power[i];
        ++count;
    }
    if (bins.empty())
        throw ParameterError("log_bin: no positive-frequency points to bin");

    PowerSpectrum out;
    out.normalization = in.normalization;
    out.window = in.window;
    out.dc_dropped = in.dc_dropped;
    out.log_binned = true;
    out.frequency_resolution = in.frequency_resolution;
    out.frequencies.reserve(bins.size());
    out.power.reserve(bins.size());
    for (const auto& [idx, acc] : bins) {
        out.frequencies.push_back(std::pow(10.0, (static_cast<double>(idx) + 0.5) / bpd));
        out.power.push_back(acc.first / static_cast<double>(acc.second));
    }
    return out;
}

/// Least-squares line through (log10 f, log10 S).
struct PowerLawFit {
    double index = 0.0;           ///< slope, the power-law exponent
    double log10_amplitude = 0.0; ///< intercept at log10 f = 0
    double f_lo = 0.0;            ///< requested band
    double f_hi = 0.0;
    double f_min_used = 0.0;      ///< extreme frequencies actually in the fit
    double f_max_used = 0.0;
    double r_squared = 0.0;
    std::size_t point_count = 0;

    double evaluate(double f) const {
        return std::pow(10.0, log10_amplitude + index * std::log10(f));
    }
};

/// Fit over points with f in [f_lo, f_hi] and power > 0. The spectrum is
/// used as given: bin first (log_bin) if equal weight per decade is wanted,
/// since raw periodogram points pile up at high frequency.
inline PowerLawFit fit_power_law(const PowerSpectrum& spectrum, double f_lo, double f_hi) {
    if (!(f_lo > 0.0) || !(f_hi > f_lo) || !std::isfinite(f_hi))
        throw ParameterError("fit_power_law: need 0 < f_lo < f_hi");
    if (spectrum.frequencies.size() != spectrum.power.size())
        throw ParameterError("fit_power_law: frequency/power length mismatch");

    std::vector<double> lf, lp;
    double fmin = std::numeric_limits<double>::infinity();
    double fmax = 0.0;
    for (std::size_t i = 0; i < spectrum.frequencies.size(); ++i) {
        const double f = spectrum.frequencies[i];
        const double p = spectrum.power[i];
        if (f < f_lo || f > f_hi || !(p > 0.0)) continue;
        lf.push_back(std::log10(f));
        lp.push_back(std::log10(p));
        fmin = std::min(fmin, f);
        fmax = std::max(fmax, f);
    }
    const std::size_t m = lf.size();
    if (m < 8)
        throw AnalysisError("fit_power_law: band [" + std::to_string(f_lo) + ", " +
                            std::to_string(f_hi) + "] Hz holds " + std::to_string(m) +
                            " usable points, need at least 8");

    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        mx += lf[i];
        my += lp[i];
    }
    mx /= static_cast<double>(m);
    my /= static_cast<double>(m);

    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double dx = lf[i] - mx;
        const double dy = lp[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0.0))
        throw AnalysisError("fit_power_law: all points share one frequency bin");

    PowerLawFit fit;
    fit.index = sxy / sxx;
    fit.log10_amplitude = my - fit.index * mx;
    fit.f_lo = f_lo;
    fit.f_hi = f_hi;
    fit.f_min_used = fmin;
    fit.f_max_used = fmax;
    fit.point_count = m;
    const double ss_res = syy - fit.index * sxy;
    fit.r_squared = (syy > 0.0) ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

/// Low-frequency enhancement indicator: power near `low_freq` over the
/// maximum power above `high_threshold`.
struct UBRRatio {
    double value = 0.0;
    double low_freq = 0.1;          ///< requested numerator frequency, Hz
    double high_threshold = 100.0;  ///< denominator band is f > this, Hz
    double low_bin_freq = 0.0;      ///< frequency of the bin actually used
    double numerator = 0.0;         ///< power at that bin
    double denominator = 0.0;       ///< max power above the threshold
    bool low_bin_substituted = false; ///< set when low_freq was unresolved
};

/// Computed on the spectrum as given; use the raw periodogram so that the
/// numerator is an actual bin, not a bin average.
inline UBRRatio ubr_ratio(const PowerSpectrum& spectrum, double low_freq = 0.1,
                          double high_threshold = 100.0) {
    if (!(low_freq > 0.0) || !(high_threshold > low_freq))
        throw ParameterError("ubr_ratio: need 0 < low_freq < high_threshold");
    if (spectrum.frequencies.empty())
        throw ParameterError("ubr_ratio: empty spectrum");

    UBRRatio r;
    r.low_freq = low_freq;
    r.high_threshold = high_threshold;

    // Nearest bin to the requested low frequency.
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < spectrum.frequencies.size(); ++i) {
        const double d = std::fabs(spectrum.frequencies[i] - low_freq);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    r.low_bin_freq = spectrum.frequencies[best];
    r.numerator = spectrum.power[best];
    // Flag when the grid cannot actually resolve low_freq, i.e. the lowest
    // available bin is still above it and was substituted.
    r.low_bin_substituted = spectrum.frequencies.front() > low_freq;

    double den = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < spectrum.frequencies.size(); ++i) {
        if (spectrum.frequencies[i] > high_threshold) {
            den = any ? std::max(den, spectrum.power[i]) : spectrum.power[i];
            any = true;
        }
    }
    if (!any)
        throw AnalysisError("ubr_ratio: no bins above " + std::to_string(high_threshold) +
                            " Hz");
    r.denominator = den;
    r.value = (den > 0.0) ? r.numerator / den
                          : std::numeric_limits<double>::infinity();
    return r;
}

} // namespace ubr
