#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ubr/errors.hpp"

namespace ubr {

namespace detail {

inline constexpr std::uint64_t golden_gamma = 0x9e3779b97f4a7c15ULL;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace detail

/// SplitMix64 generator. Fixed algorithm, identical output on every platform;
/// this is a reproducibility contract, do not swap in std:: engines.
class RandomStream {
public:
    explicit constexpr RandomStream(std::uint64_t state) noexcept : state_(state) {}

    constexpr std::uint64_t next_u64() noexcept {
        state_ += detail::golden_gamma;
        return detail::mix64(state_);
    }

    /// Uniform double in [0, 1): top 53 bits over 2^53.
    constexpr double next_unit() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi). Degenerate lo == hi yields lo.
    double uniform(double lo, double hi) {
        if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi))
            throw ParameterError("uniform: invalid range [" + std::to_string(lo) + ", " +
                                 std::to_string(hi) + ")");
        return lo + (hi - lo) * next_unit();
    }

    /// Fair coin from the top bit.
    constexpr bool coin() noexcept { return (next_u64() >> 63) != 0; }

    static constexpr const char* algorithm() noexcept { return "splitmix64"; }

private:
    std::uint64_t state_;
};

inline double uniform(RandomStream& stream, double lo, double hi) {
    return stream.uniform(lo, hi);
}

/// Hierarchical seed derivation: a master seed plus a path of
/// (purpose tag, index) pairs. Children with distinct paths give
/// statistically independent streams, and adding a consumer of one
/// purpose never perturbs draws made under another. The per-source
/// purpose tags used by the synthesis layer are frozen:
///   "xi"     detune offset
///   "eta"    additive overtone-stack phase
///   "theta"  vibrato rate
///   "depth"  vibrato depth jitter
///   "vibeta" phase offset inside the vibrato modulation
///   "kappa"  divergent-detune shift (magnitude drawn before sign)
///   "note"   melody note index
///   "seg"    segment index
///   "rep"    repetition index
class SeedTree {
public:
    explicit SeedTree(std::uint64_t master_seed = 0)
        : master_(master_seed), key_(detail::mix64(master_seed ^ detail::golden_gamma)) {}

    /// Child keyed by purpose tag and index.
    SeedTree child(std::string_view tag, std::uint64_t index = 0) const {
        SeedTree c(*this);
        c.key_ = detail::mix64(detail::mix64(key_ ^ detail::fnv1a64(tag)) +
                               index * detail::golden_gamma);
        c.path_.emplace_back(std::string(tag), index);
        return c;
    }

    /// Fresh generator for this node. Repeated calls restart the same stream.
    RandomStream stream() const { return RandomStream(key_); }

    std::uint64_t master_seed() const noexcept { return master_; }

    const std::vector<std::pair<std::string, std::uint64_t>>& path() const noexcept {
        return path_;
    }

    /// "rep[2]/xi[7]" style rendering for metadata.
    std::string path_string() const {
        std::string out;
        for (const auto& [tag, idx] : path_) {
            if (!out.empty()) out += '/';
            out += tag;
            out += '[';
            out += std::to_string(idx);
            out += ']';
        }
        return out;
    }

private:
    std::uint64_t master_ = 0;
    std::uint64_t key_ = 0;
    std::vector<std::pair<std::string, std::uint64_t>> path_;
};

/// Detune distribution with density proportional to 1/(kappa + epsilon) on
/// [0, kappa_max], mirrored to negative values by a fair coin when symmetric.
struct IRDivergentSpec {
    double epsilon = 1e-5;   ///< low-frequency cutoff, Hz; keeps the density integrable
    double kappa_max = 1e4;  ///< truncation bound, Hz
    bool symmetric = true;   ///< mirror sign with a fair coin

    void validate() const {
        if (!(epsilon > 0.0) || !std::isfinite(epsilon))
            throw ParameterError("IRDivergentSpec: epsilon must be finite and > 0");
        if (!(kappa_max > epsilon) || !std::isfinite(kappa_max))
            throw ParameterError("IRDivergentSpec: kappa_max must be finite and > epsilon");
    }
};

/// Upper bound of the inverse-CDF domain, log(1 + kappa_max / epsilon).
inline double ir_domain_bound(const IRDivergentSpec& spec) {
    return std::log1p(spec.kappa_max / spec.epsilon);
}

/// Magnitude for a unit draw u in [0, 1): epsilon * (exp(u * bound) - 1).
/// u = 0 maps to exactly 0, u -> 1 approaches kappa_max.
inline double ir_magnitude_from_unit(double u, const IRDivergentSpec& spec) {
    return spec.epsilon * std::expm1(u * ir_domain_bound(spec));
}

/// CDF of the magnitude distribution, for test-side cross-checks.
inline double ir_cdf(double kappa, const IRDivergentSpec& spec) {
    return std::log1p(kappa / spec.epsilon) / ir_domain_bound(spec);
}

/// One draw. Consumes one unit draw for the magnitude, then one coin for the
/// sign when symmetric; that order is part of the reproducibility contract.
inline double sample_ir_divergent(const IRDivergentSpec& spec, RandomStream& stream) {
    spec.validate();
    const double mag = ir_magnitude_from_unit(stream.next_unit(), spec);
    if (!spec.symmetric) return mag;
    return stream.coin() ? -mag : mag;
}

} // namespace ubr
