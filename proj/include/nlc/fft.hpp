#pragma once

#include <complex>
#include <unordered_map>
#include <vector>

#include "nlc/errors.hpp"
#include "nlc/grid.hpp"
#include "nlc/params.hpp"

namespace nlc {

namespace fft_detail {

using cplx = std::complex<double>;

// Twiddle factors for a given length, cached per thread. Grids are powers
// of two, so a radix-2 iterative transform covers every case.
inline const std::vector<cplx>& twiddles(int nfft, int sign) {
    thread_local std::unordered_map<long long, std::vector<cplx>> cache;
    long long key = static_cast<long long>(nfft) * (sign > 0 ? 1 : -1);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::vector<cplx> tw(nfft / 2);
    for (int i = 0; i < nfft / 2; ++i) {
        double ang = sign * 2.0 * kPi * i / nfft;
        tw[i] = cplx(std::cos(ang), std::sin(ang));
    }
    return cache.emplace(key, std::move(tw)).first->second;
}

// In-place radix-2 transform of a contiguous buffer. sign = -1 forward
// (e^{-2 pi i jk/N}), +1 inverse (unnormalized).
inline void fft_pow2(cplx* a, int nfft, int sign) {
    for (int i = 1, j = 0; i < nfft; ++i) {
        int bit = nfft >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    const auto& tw = twiddles(nfft, sign);
    for (int len = 2; len <= nfft; len <<= 1) {
        int step = nfft / len;
        for (int i = 0; i < nfft; i += len) {
            for (int k = 0; k < len / 2; ++k) {
                cplx w = tw[static_cast<std::size_t>(k) * step];
                cplx u = a[i + k];
                cplx v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
            }
        }
    }
}

// Transform along every axis of an n-dimensional cube, unnormalized.
inline void fft_nd(std::vector<cplx>& data, const GridSpec& grid, int sign) {
    const int N = grid.cells;
    if (grid.n == 1) {
        fft_pow2(data.data(), N, sign);
        return;
    }
    // axis 1 (contiguous rows), layout lin = i*N + j
    parallel_for(static_cast<std::size_t>(N), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) fft_pow2(data.data() + i * N, N, sign);
    });
    // axis 0 (strided columns) via a contiguous scratch copy
    parallel_for(static_cast<std::size_t>(N), [&](std::size_t begin, std::size_t end) {
        std::vector<cplx> col(N);
        for (std::size_t j = begin; j < end; ++j) {
            for (int i = 0; i < N; ++i) col[i] = data[static_cast<std::size_t>(i) * N + j];
            fft_pow2(col.data(), N, sign);
            for (int i = 0; i < N; ++i) data[static_cast<std::size_t>(i) * N + j] = col[i];
        }
    });
}

} // namespace fft_detail

} // namespace nlc
