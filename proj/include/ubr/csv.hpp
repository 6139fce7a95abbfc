#pragma once

#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <string>
#include <system_error>

#include "ubr/errors.hpp"
#include "ubr/spectral.hpp"

namespace ubr {

/// Locale-independent full-precision rendering (17 significant digits,
/// round-trip exact for doubles).
inline std::string format_full(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

/// Shortest round-trip rendering, for config text and summaries.
inline std::string format_shortest(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

/// "frequency_hz,power" rows at full precision, LF line endings. Output is a
/// pure function of the spectrum: same data, same bytes.
inline void write_spectrum_csv(const PowerSpectrum& spectrum,
                               const std::filesystem::path& path) {
    if (spectrum.frequencies.size() != spectrum.power.size())
        throw ParameterError("write_spectrum_csv: frequency/power length mismatch");
    std::string body = "frequency_hz,power\n";
    body.reserve(body.size() + spectrum.size() * 48);
    for (std::size_t i = 0; i < spectrum.size(); ++i) {
        body += format_full(spectrum.frequencies[i]);
        body += ',';
        body += format_full(spectrum.power[i]);
        body += '\n';
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
    f.write(body.data(), static_cast<std::streamsize>(body.size()));
    f.flush();
    if (!f) throw IoError("failed writing '" + path.string() + "'");
}

} // namespace ubr
