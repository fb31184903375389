#pragma once

#include <complex>
#include <cstdint>
#include <span>

namespace swformer::fft {

// In-place 1D DFT of arbitrary length. Powers of two use iterative radix-2,
// other lengths a direct sum with a cached twiddle table. Unnormalized:
// X[k] = sum_n x[n] exp(sign * 2*pi*i*n*k / N), sign = -1 forward.
void dft(std::span<std::complex<double>> data, bool inverse);

// In-place 2D transform of one h x w plane (row-major), scaled by 1/sqrt(h*w)
// so forward and inverse are both unitary.
void dft2_orthonormal(std::span<std::complex<double>> plane, std::int64_t h, std::int64_t w,
                      bool inverse);

}  // namespace swformer::fft
