#pragma once

#include <complex>
#include <cstddef>
#include <mutex>
#include <span>
#include <vector>

#include <fftw3.h>

#include "ubr/errors.hpp"

namespace ubr::fft {

namespace detail {

// FFTW planning is not thread safe; execution on private buffers is.
inline std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct RealBuffer {
    double* p = nullptr;
    explicit RealBuffer(std::size_t n) : p(fftw_alloc_real(n)) {
        if (!p) throw Error("fftw_alloc_real failed");
    }
    ~RealBuffer() { fftw_free(p); }
    RealBuffer(const RealBuffer&) = delete;
    RealBuffer& operator=(const RealBuffer&) = delete;
};

struct ComplexBuffer {
    fftw_complex* p = nullptr;
    explicit ComplexBuffer(std::size_t n) : p(fftw_alloc_complex(n)) {
        if (!p) throw Error("fftw_alloc_complex failed");
    }
    ~ComplexBuffer() { fftw_free(p); }
    ComplexBuffer(const ComplexBuffer&) = delete;
    ComplexBuffer& operator=(const ComplexBuffer&) = delete;
};

struct Plan {
    fftw_plan p = nullptr;
    Plan(int n, double* in, fftw_complex* out) {
        std::lock_guard<std::mutex> lock(planner_mutex());
        p = fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE);
        if (!p) throw Error("fftw_plan_dft_r2c_1d failed");
    }
    ~Plan() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(p);
    }
    Plan(const Plan&) = delete;
    Plan& operator=(const Plan&) = delete;
};

} // namespace detail

/// Unnormalized forward DFT of a real signal; returns bins 0..n/2.
/// X_k = sum_j x_j exp(-2*pi*i*j*k/n).
inline std::vector<std::complex<double>> real_dft(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 2) throw ParameterError("real_dft: need at least 2 samples");
    if (n > static_cast<std::size_t>(1) << 30)
        throw ParameterError("real_dft: signal too long");

    const std::size_t nbins = n / 2 + 1;
    detail::RealBuffer in(n);
    detail::ComplexBuffer out(nbins);
    // FFTW_ESTIMATE may still touch the buffers during planning, so plan
    // before filling them.
    detail::Plan plan(static_cast<int>(n), in.p, out.p);
    for (std::size_t j = 0; j < n; ++j) in.p[j] = x[j];
    fftw_execute(plan.p);

    std::vector<std::complex<double>> result(nbins);
    for (std::size_t k = 0; k < nbins; ++k)
        result[k] = std::complex<double>(out.p[k][0], out.p[k][1]);
    return result;
}

} // namespace ubr::fft
