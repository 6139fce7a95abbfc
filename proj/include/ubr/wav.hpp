#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "ubr/errors.hpp"
#include "ubr/time_series.hpp"

namespace ubr {

/// What the header said, after unwrapping WAVE_FORMAT_EXTENSIBLE.
struct WavDescriptor {
    std::uint16_t format_tag = 0; ///< 1 = integer PCM, 3 = IEEE float
    std::uint16_t channels = 0;
    std::uint32_t sample_rate = 0;
    std::uint16_t bits_per_sample = 0;
    std::uint16_t block_align = 0;
    std::uint64_t frame_count = 0;
    bool extensible = false;
};

namespace detail {

inline std::uint16_t load_u16le(const unsigned char* p) noexcept {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}
inline std::uint32_t load_u32le(const unsigned char* p) noexcept {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}
inline std::uint64_t load_u64le(const unsigned char* p) noexcept {
    return static_cast<std::uint64_t>(load_u32le(p)) |
           (static_cast<std::uint64_t>(load_u32le(p + 4)) << 32);
}

inline void store_u16le(unsigned char* p, std::uint16_t v) noexcept {
    p[0] = static_cast<unsigned char>(v & 0xff);
    p[1] = static_cast<unsigned char>(v >> 8);
}
inline void store_u32le(unsigned char* p, std::uint32_t v) noexcept {
    p[0] = static_cast<unsigned char>(v & 0xff);
    p[1] = static_cast<unsigned char>((v >> 8) & 0xff);
    p[2] = static_cast<unsigned char>((v >> 16) & 0xff);
    p[3] = static_cast<unsigned char>((v >> 24) & 0xff);
}

struct WavLayout {
    WavDescriptor desc;
    std::uint64_t data_offset = 0;
    std::uint64_t data_size = 0;
};

/// Walk the RIFF chunks, pick up fmt and data, skip everything else.
/// Chunk sizes are validated against the real file size before any seek.
inline WavLayout parse_wav_header(std::ifstream& in, std::uint64_t file_size,
                                  const std::string& name) {
    auto fail = [&](const std::string& what) -> void {
        throw ParseError("wav '" + name + "': " + what);
    };

    if (file_size < 12) fail("file too small for a RIFF header");
    std::array<unsigned char, 12> riff{};
    in.read(reinterpret_cast<char*>(riff.data()), 12);
    if (!in) fail("truncated RIFF header");
    if (std::memcmp(riff.data(), "RIFF", 4) != 0) fail("missing RIFF magic");
    if (std::memcmp(riff.data() + 8, "WAVE", 4) != 0) fail("missing WAVE form type");

    WavLayout layout;
    bool have_fmt = false;
    bool have_data = false;
    std::uint64_t pos = 12;
    while (pos + 8 <= file_size) {
        in.seekg(static_cast<std::streamoff>(pos));
        std::array<unsigned char, 8> head{};
        in.read(reinterpret_cast<char*>(head.data()), 8);
        if (!in) fail("truncated chunk header");
        const std::uint32_t size = load_u32le(head.data() + 4);
        const std::uint64_t body = pos + 8;
        if (body + size > file_size)
            fail("chunk '" + std::string(reinterpret_cast<char*>(head.data()), 4) +
                 "' overruns the file");

        if (std::memcmp(head.data(), "fmt ", 4) == 0) {
            if (size < 16) fail("fmt chunk too small");
            std::vector<unsigned char> fmt(size);
            in.read(reinterpret_cast<char*>(fmt.data()), static_cast<std::streamsize>(size));
            if (!in) fail("truncated fmt chunk");
            WavDescriptor& d = layout.desc;
            d.format_tag = load_u16le(fmt.data());
            d.channels = load_u16le(fmt.data() + 2);
            d.sample_rate = load_u32le(fmt.data() + 4);
            d.block_align = load_u16le(fmt.data() + 12);
            d.bits_per_sample = load_u16le(fmt.data() + 14);
            if (d.format_tag == 0xfffe) {
                // extensible: the real tag lives in the first two bytes of the
                // 16-byte sub-format GUID
                if (size < 40) fail("extensible fmt chunk too small");
                d.format_tag = load_u16le(fmt.data() + 24);
                d.extensible = true;
            }
            have_fmt = true;
        } else if (std::memcmp(head.data(), "data", 4) == 0) {
            layout.data_offset = body;
            layout.data_size = size;
            have_data = true;
        }
        pos = body + size + (size & 1); // chunks are word aligned
    }

    if (!have_fmt) fail("no fmt chunk");
    if (!have_data) fail("no data chunk");

    WavDescriptor& d = layout.desc;
    if (d.channels == 0) fail("zero channels");
    if (d.sample_rate == 0) fail("zero sample rate");
    if (d.format_tag == 1) {
        if (d.bits_per_sample != 16 && d.bits_per_sample != 24 && d.bits_per_sample != 32)
            throw UnsupportedFormatError("wav '" + name + "': unsupported integer depth " +
                                         std::to_string(d.bits_per_sample) +
                                         " (16, 24 or 32 expected)");
    } else if (d.format_tag == 3) {
        if (d.bits_per_sample != 32 && d.bits_per_sample != 64)
            throw UnsupportedFormatError("wav '" + name + "': unsupported float depth " +
                                         std::to_string(d.bits_per_sample));
    } else {
        throw UnsupportedFormatError("wav '" + name + "': unsupported format tag " +
                                     std::to_string(d.format_tag) +
                                     " (integer or float PCM expected)");
    }
    const std::uint32_t expect_align =
        static_cast<std::uint32_t>(d.channels) * (d.bits_per_sample / 8u);
    if (d.block_align != expect_align)
        fail("block alignment " + std::to_string(d.block_align) + " does not match " +
             std::to_string(expect_align));
    d.frame_count = layout.data_size / d.block_align;
    if (d.frame_count == 0) fail("empty data chunk");
    return layout;
}

} // namespace detail

/// Header-only look at a WAV file.
inline WavDescriptor probe_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    in.seekg(0, std::ios::end);
    const auto file_size = static_cast<std::uint64_t>(in.tellg());
    in.seekg(0);
    return detail::parse_wav_header(in, file_size, path.filename().string()).desc;
}

/// Read one channel as doubles normalized by 2^(bits-1) for integer PCM
/// (so full-scale 16-bit 32767 maps just below 1.0); float data is taken
/// as stored. Optionally reports the descriptor through `info`.
inline TimeSeries read_wav(const std::filesystem::path& path, unsigned channel = 0,
                           WavDescriptor* info = nullptr) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    in.seekg(0, std::ios::end);
    const auto file_size = static_cast<std::uint64_t>(in.tellg());
    in.seekg(0);
    const auto name = path.filename().string();
    const detail::WavLayout layout = detail::parse_wav_header(in, file_size, name);
    const WavDescriptor& d = layout.desc;
    if (info) *info = d;

    if (channel >= d.channels)
        throw ParameterError("wav '" + name + "': channel " + std::to_string(channel) +
                             " out of range, file has " + std::to_string(d.channels));

    TimeSeries out;
    out.sample_rate = static_cast<double>(d.sample_rate);
    out.samples.resize(d.frame_count);

    in.seekg(static_cast<std::streamoff>(layout.data_offset));
    const std::size_t bytes_per_sample = d.bits_per_sample / 8u;
    const std::size_t frame_bytes = d.block_align;
    const std::size_t chunk_frames = std::max<std::size_t>(1, (1u << 16) / frame_bytes);
    std::vector<unsigned char> buf(chunk_frames * frame_bytes);

    std::uint64_t frames_done = 0;
    while (frames_done < d.frame_count) {
        const std::size_t batch =
            static_cast<std::size_t>(std::min<std::uint64_t>(chunk_frames,
                                                             d.frame_count - frames_done));
        in.read(reinterpret_cast<char*>(buf.data()),
                static_cast<std::streamsize>(batch * frame_bytes));
        if (!in) throw ParseError("wav '" + name + "': truncated data chunk");
        for (std::size_t f = 0; f < batch; ++f) {
            const unsigned char* p = buf.data() + f * frame_bytes + channel * bytes_per_sample;
            double v = 0.0;
            if (d.format_tag == 1) {
                if (d.bits_per_sample == 16) {
                    const auto raw = static_cast<std::int16_t>(detail::load_u16le(p));
                    v = static_cast<double>(raw) / 32768.0;
                } else if (d.bits_per_sample == 24) {
                    std::int32_t raw = p[0] | (p[1] << 8) | (p[2] << 16);
                    if (raw & 0x800000) raw |= ~0xffffff; // sign extend
                    v = static_cast<double>(raw) / 8388608.0;
                } else {
                    const auto raw = static_cast<std::int32_t>(detail::load_u32le(p));
                    v = static_cast<double>(raw) / 2147483648.0;
                }
            } else { // float
                if (d.bits_per_sample == 32)
                    v = static_cast<double>(std::bit_cast<float>(detail::load_u32le(p)));
                else
                    v = std::bit_cast<double>(detail::load_u64le(p));
            }
            out.samples[frames_done + f] = v;
        }
        frames_done += batch;
    }
    return out;
}

/// Write mono integer PCM at 16, 24 or 32 bits. The signal must already sit
/// in [-1, 1] (normalize_peak first); values quantize by round(x * 2^(bits-1))
/// with the positive rail clamped to full scale minus one step.
inline void write_wav(const std::filesystem::path& path, const TimeSeries& series,
                      int bits_per_sample = 16) {
    series.validate();
    if (bits_per_sample != 16 && bits_per_sample != 24 && bits_per_sample != 32)
        throw ParameterError("write_wav: bits_per_sample must be 16, 24 or 32");
    const double peak = peak_amplitude(series);
    if (peak > 1.0 + 1e-9)
        throw ParameterError("write_wav: peak amplitude " + std::to_string(peak) +
                             " exceeds full scale; normalize_peak first");
    const double rate = series.sample_rate;
    if (std::fabs(rate - std::round(rate)) > 1e-6 || rate < 1.0 || rate > 4.0e9)
        throw ParameterError("write_wav: sample_rate must be a positive integer");

    const std::size_t n = series.samples.size();
    const std::size_t bytes_per_sample = static_cast<std::size_t>(bits_per_sample) / 8;
    const std::uint64_t data_size64 = static_cast<std::uint64_t>(n) * bytes_per_sample;
    if (data_size64 > 0xffffffffull - 44)
        throw ParameterError("write_wav: signal too long for a RIFF file");
    const auto data_size = static_cast<std::uint32_t>(data_size64);

    std::vector<unsigned char> out;
    out.reserve(44 + data_size + (data_size & 1));
    out.resize(44);
    std::memcpy(out.data(), "RIFF", 4);
    detail::store_u32le(out.data() + 4, 36 + data_size + (data_size & 1));
    std::memcpy(out.data() + 8, "WAVE", 4);
    std::memcpy(out.data() + 12, "fmt ", 4);
    detail::store_u32le(out.data() + 16, 16);
    detail::store_u16le(out.data() + 20, 1); // integer PCM
    detail::store_u16le(out.data() + 22, 1); // mono
    const auto irate = static_cast<std::uint32_t>(std::llround(rate));
    detail::store_u32le(out.data() + 24, irate);
    detail::store_u32le(out.data() + 28, irate * static_cast<std::uint32_t>(bytes_per_sample));
    detail::store_u16le(out.data() + 32, static_cast<std::uint16_t>(bytes_per_sample));
    detail::store_u16le(out.data() + 34, static_cast<std::uint16_t>(bits_per_sample));
    std::memcpy(out.data() + 36, "data", 4);
    detail::store_u32le(out.data() + 40, data_size);

    const double scale = std::ldexp(1.0, bits_per_sample - 1); // 2^(bits-1)
    const auto hi = static_cast<long long>(scale) - 1;
    const auto lo = -static_cast<long long>(scale);
    out.resize(44 + data_size + (data_size & 1), 0);
    unsigned char* p = out.data() + 44;
    for (std::size_t j = 0; j < n; ++j) {
        long long q = std::llround(series.samples[j] * scale);
        if (q > hi) q = hi;
        if (q < lo) q = lo;
        const auto u = static_cast<std::uint64_t>(q);
        for (std::size_t b = 0; b < bytes_per_sample; ++b)
            *p++ = static_cast<unsigned char>((u >> (8 * b)) & 0xff);
    }

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
    f.write(reinterpret_cast<const char*>(out.data()),
            static_cast<std::streamsize>(out.size()));
    f.flush();
    if (!f) throw IoError("failed writing '" + path.string() + "'");
}

} // namespace ubr
