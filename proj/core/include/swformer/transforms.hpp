#pragma once

#include <array>
#include <cstdint>

#include "swformer/tensor.hpp"

namespace swformer {

template <typename T>
struct ComplexTensor {
  Tensor<T> real;
  Tensor<T> imag;
};

// Orthonormal 2D DFT of every (n, c) plane. The packed form stacks the real
// parts on channels [0, c) and the imaginary parts on [c, 2c).
template <typename T>
Tensor<T> fft2_packed(const Tensor<T>& x);
// Inverse of fft2_packed keeping the real part: (n, 2c, h, w) -> (n, c, h, w).
template <typename T>
Tensor<T> ifft2_packed(const Tensor<T>& spectrum);

template <typename T>
ComplexTensor<T> fft2(const Tensor<T>& x);
template <typename T>
Tensor<T> ifft2(const ComplexTensor<T>& spectrum);
// Largest |imag| of the inverse transform, the residue dropped by ifft2. Near
// zero exactly when the spectrum is conjugate-symmetric.
template <typename T>
double ifft2_imag_residue(const ComplexTensor<T>& spectrum);

// Band order is fixed everywhere: LL, LH, HL, HH.
enum class Band : int { kLL = 0, kLH = 1, kHL = 2, kHH = 3 };
inline constexpr std::array<Band, 4> kAllBands{Band::kLL, Band::kLH, Band::kHL, Band::kHH};
const char* band_name(Band b);

template <typename T>
struct SubBands {
  Tensor<T> ll;
  Tensor<T> lh;
  Tensor<T> hl;
  Tensor<T> hh;

  Tensor<T>& operator[](Band b);
  const Tensor<T>& operator[](Band b) const;
  // (n, 4c, h/2, w/2), band-major.
  [[nodiscard]] Tensor<T> packed() const;
  static SubBands unpack(const Tensor<T>& packed);
};

// Orthonormal Haar analysis taps, [band][row][col]:
//   LL = 1/2 [[ 1,  1], [ 1, 1]]    LH = 1/2 [[-1, -1], [ 1, 1]]
//   HL = 1/2 [[-1,  1], [-1, 1]]    HH = 1/2 [[ 1, -1], [-1, 1]]
std::array<double, 16> haar_taps();

// Four 2x2 analysis filters and four synthesis filters, each of shape
// (4, 1, 2, 2), shared depthwise across channels. Initialized to Haar with
// synthesis equal to the adjoint of analysis.
template <typename T>
struct WaveletFilterBank {
  Tensor<T> analysis;
  Tensor<T> synthesis;
  bool learnable = false;

  static WaveletFilterBank haar(bool learnable);
};

enum class OddSizePolicy { kReject, kReflect };

// Depthwise stride-2 2x2 analysis: out[n, b*c + k] = sum_ij f[b,i,j] x[n, k, 2y+i, 2x+j].
template <typename T>
Tensor<T> dwt2_packed(const Tensor<T>& x, const Tensor<T>& filters,
                      OddSizePolicy policy = OddSizePolicy::kReject);
// Depthwise stride-2 2x2 transposed synthesis; optionally crops to out_h x out_w
// (undoing reflect padding).
template <typename T>
Tensor<T> idwt2_packed(const Tensor<T>& bands, const Tensor<T>& filters, std::int64_t out_h = -1,
                       std::int64_t out_w = -1);

template <typename T>
SubBands<T> dwt2(const Tensor<T>& x, const WaveletFilterBank<T>& bank,
                 OddSizePolicy policy = OddSizePolicy::kReject);
template <typename T>
Tensor<T> idwt2(const SubBands<T>& bands, const WaveletFilterBank<T>& bank, std::int64_t out_h = -1,
                std::int64_t out_w = -1);

// (n, c, h, w) -> (n, c*r*r, h/r, w/r) with out[c*r*r + i*r + j] = in[c, y*r+i, x*r+j].
template <typename T>
Tensor<T> pixel_unshuffle(const Tensor<T>& x, std::int64_t r = 2);
template <typename T>
Tensor<T> pixel_shuffle(const Tensor<T>& x, std::int64_t r = 2);

}  // namespace swformer
