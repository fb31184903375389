#include "swformer/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "swformer/fft.hpp"
#include "swformer/ops.hpp"

namespace swformer {

namespace {

using std::int64_t;
using cplx = std::complex<double>;

// Transforms plane pairs (re, im) in place between packed buffers.
template <typename T>
void packed_dft(const T* re_in, const T* im_in, T* re_out, T* im_out, int64_t h, int64_t w, bool inverse,
                std::vector<cplx>& buf) {
  const int64_t count = h * w;
  buf.resize(static_cast<std::size_t>(count));
  for (int64_t i = 0; i < count; ++i) {
    buf[static_cast<std::size_t>(i)] = {static_cast<double>(re_in[i]),
                                        im_in != nullptr ? static_cast<double>(im_in[i]) : 0.0};
  }
  fft::dft2_orthonormal(buf, h, w, inverse);
  for (int64_t i = 0; i < count; ++i) {
    re_out[i] += static_cast<T>(buf[static_cast<std::size_t>(i)].real());
    if (im_out != nullptr) im_out[i] += static_cast<T>(buf[static_cast<std::size_t>(i)].imag());
  }
}

}  // namespace

template <typename T>
Tensor<T> fft2_packed(const Tensor<T>& x) {
  const Shape s = x.shape();
  const Shape so{s.n, 2 * s.c, s.h, s.w};
  auto out = Tensor<T>::zeros(so);
  std::vector<cplx> buf;
  const int64_t plane = s.plane();
  for (int64_t n = 0; n < s.n; ++n) {
    for (int64_t c = 0; c < s.c; ++c) {
      const T* src = x.data().data() + (n * s.c + c) * plane;
      T* re = out.data().data() + (n * so.c + c) * plane;
      T* im = out.data().data() + (n * so.c + s.c + c) * plane;
      packed_dft<T>(src, nullptr, re, im, s.h, s.w, false, buf);
    }
  }
  auto ix = x.impl();
  auto io = out.impl();
  detail::record<T>({&x}, out, [ix, io, s, so, plane]() {
    ix->ensure_grad();
    std::vector<cplx> scratch;
    for (int64_t n = 0; n < s.n; ++n) {
      for (int64_t c = 0; c < s.c; ++c) {
        const T* gre = io->grad.data() + (n * so.c + c) * plane;
        const T* gim = io->grad.data() + (n * so.c + s.c + c) * plane;
        T* gx = ix->grad.data() + (n * s.c + c) * plane;
        packed_dft<T>(gre, gim, gx, nullptr, s.h, s.w, true, scratch);
      }
    }
  });
  return out;
}

template <typename T>
Tensor<T> ifft2_packed(const Tensor<T>& spectrum) {
  const Shape s = spectrum.shape();
  if (s.c % 2 != 0) {
    throw DimensionError("ifft2: packed spectrum needs an even channel count, got " + s.str());
  }
  const int64_t c_out = s.c / 2;
  const Shape so{s.n, c_out, s.h, s.w};
  auto out = Tensor<T>::zeros(so);
  std::vector<cplx> buf;
  const int64_t plane = s.plane();
  for (int64_t n = 0; n < s.n; ++n) {
    for (int64_t c = 0; c < c_out; ++c) {
      const T* re = spectrum.data().data() + (n * s.c + c) * plane;
      const T* im = spectrum.data().data() + (n * s.c + c_out + c) * plane;
      T* dst = out.data().data() + (n * c_out + c) * plane;
      packed_dft<T>(re, im, dst, nullptr, s.h, s.w, true, buf);
    }
  }
  auto ix = spectrum.impl();
  auto io = out.impl();
  detail::record<T>({&spectrum}, out, [ix, io, s, c_out, plane]() {
    ix->ensure_grad();
    std::vector<cplx> scratch;
    for (int64_t n = 0; n < s.n; ++n) {
      for (int64_t c = 0; c < c_out; ++c) {
        const T* g = io->grad.data() + (n * c_out + c) * plane;
        T* gre = ix->grad.data() + (n * s.c + c) * plane;
        T* gim = ix->grad.data() + (n * s.c + c_out + c) * plane;
        packed_dft<T>(g, nullptr, gre, gim, s.h, s.w, false, scratch);
      }
    }
  });
  return out;
}

template <typename T>
ComplexTensor<T> fft2(const Tensor<T>& x) {
  auto parts = split(fft2_packed(x), {x.shape().c, x.shape().c});
  return {std::move(parts[0]), std::move(parts[1])};
}

template <typename T>
Tensor<T> ifft2(const ComplexTensor<T>& spectrum) {
  if (!(spectrum.real.shape() == spectrum.imag.shape())) {
    throw DimensionError("ifft2: real " + spectrum.real.shape().str() + " and imaginary " +
                         spectrum.imag.shape().str() + " parts differ");
  }
  return ifft2_packed(concat<T>({spectrum.real, spectrum.imag}));
}

template <typename T>
double ifft2_imag_residue(const ComplexTensor<T>& spectrum) {
  const Shape s = spectrum.real.shape();
  std::vector<cplx> buf(static_cast<std::size_t>(s.plane()));
  double worst = 0;
  for (int64_t p = 0; p < s.n * s.c; ++p) {
    for (int64_t i = 0; i < s.plane(); ++i) {
      buf[static_cast<std::size_t>(i)] = {static_cast<double>(spectrum.real.data()[p * s.plane() + i]),
                                          static_cast<double>(spectrum.imag.data()[p * s.plane() + i])};
    }
    fft::dft2_orthonormal(buf, s.h, s.w, true);
    for (const auto& v : buf) worst = std::max(worst, std::abs(v.imag()));
  }
  return worst;
}

const char* band_name(Band b) {
  switch (b) {
    case Band::kLL: return "LL";
    case Band::kLH: return "LH";
    case Band::kHL: return "HL";
    case Band::kHH: return "HH";
  }
  return "?";
}

template <typename T>
Tensor<T>& SubBands<T>::operator[](Band b) {
  switch (b) {
    case Band::kLL: return ll;
    case Band::kLH: return lh;
    case Band::kHL: return hl;
    case Band::kHH: break;
  }
  return hh;
}

template <typename T>
const Tensor<T>& SubBands<T>::operator[](Band b) const {
  return const_cast<SubBands&>(*this)[b];
}

template <typename T>
Tensor<T> SubBands<T>::packed() const {
  return concat<T>({ll, lh, hl, hh});
}

template <typename T>
SubBands<T> SubBands<T>::unpack(const Tensor<T>& packed) {
  if (packed.shape().c % 4 != 0) {
    throw DimensionError("sub-band tensor needs a channel count divisible by 4, got " + packed.shape().str());
  }
  const int64_t c = packed.shape().c / 4;
  auto parts = split(packed, {c, c, c, c});
  return {parts[0], parts[1], parts[2], parts[3]};
}

std::array<double, 16> haar_taps() {
  return {0.5, 0.5, 0.5, 0.5,     // LL
          -0.5, -0.5, 0.5, 0.5,   // LH
          -0.5, 0.5, -0.5, 0.5,   // HL
          0.5, -0.5, -0.5, 0.5};  // HH
}

template <typename T>
WaveletFilterBank<T> WaveletFilterBank<T>::haar(bool learnable) {
  const auto taps = haar_taps();
  std::vector<T> v(taps.begin(), taps.end());
  WaveletFilterBank bank;
  bank.analysis = Tensor<T>::from_data(Shape{4, 1, 2, 2}, v);
  bank.synthesis = Tensor<T>::from_data(Shape{4, 1, 2, 2}, v);
  bank.learnable = learnable;
  bank.analysis.set_requires_grad(learnable);
  bank.synthesis.set_requires_grad(learnable);
  return bank;
}

namespace {

void check_filters(const Shape& f, const char* op) {
  if (!(f == Shape{4, 1, 2, 2})) {
    throw DimensionError(std::string(op) + ": filter bank must be (4, 1, 2, 2), got " + f.str());
  }
}

}  // namespace

template <typename T>
Tensor<T> dwt2_packed(const Tensor<T>& input, const Tensor<T>& filters, OddSizePolicy policy) {
  check_filters(filters.shape(), "dwt2");
  Tensor<T> x = input;
  if (input.shape().h % 2 != 0 || input.shape().w % 2 != 0) {
    if (policy == OddSizePolicy::kReject) {
      throw DimensionError("dwt2: height and width must be even, got " + input.shape().str());
    }
    x = pad_reflect(input, input.shape().h % 2, input.shape().w % 2);
  }
  const Shape s = x.shape();
  const Shape so{s.n, 4 * s.c, s.h / 2, s.w / 2};
  auto out = Tensor<T>::zeros(so);
  const T* f = filters.data().data();
  const T* px = x.data().data();
  T* po = out.data().data();
  const int64_t oplane = so.plane();
  for (int64_t n = 0; n < s.n; ++n) {
    for (int64_t c = 0; c < s.c; ++c) {
      const T* src = px + (n * s.c + c) * s.plane();
      for (int64_t b = 0; b < 4; ++b) {
        const T* fb = f + b * 4;
        T* dst = po + (n * so.c + b * s.c + c) * oplane;
        for (int64_t y = 0; y < so.h; ++y) {
          const T* r0 = src + (2 * y) * s.w;
          const T* r1 = r0 + s.w;
          for (int64_t xx = 0; xx < so.w; ++xx) {
            dst[y * so.w + xx] = fb[0] * r0[2 * xx] + fb[1] * r0[2 * xx + 1] + fb[2] * r1[2 * xx] +
                                 fb[3] * r1[2 * xx + 1];
          }
        }
      }
    }
  }
  auto ix = x.impl();
  auto iff = filters.impl();
  auto io = out.impl();
  detail::record<T>({&x, &filters}, out, [ix, iff, io, s, so, oplane]() {
    const bool need_x = ix->requires_grad;
    const bool need_f = iff->requires_grad;
    if (need_x) ix->ensure_grad();
    if (need_f) iff->ensure_grad();
    const T* f = iff->data.data();
    for (int64_t n = 0; n < s.n; ++n) {
      for (int64_t c = 0; c < s.c; ++c) {
        const int64_t ioff = (n * s.c + c) * s.plane();
        for (int64_t b = 0; b < 4; ++b) {
          const T* g = io->grad.data() + (n * so.c + b * s.c + c) * oplane;
          T acc[4] = {0, 0, 0, 0};
          for (int64_t y = 0; y < so.h; ++y) {
            const int64_t r0 = ioff + (2 * y) * s.w;
            const int64_t r1 = r0 + s.w;
            for (int64_t xx = 0; xx < so.w; ++xx) {
              const T gv = g[y * so.w + xx];
              if (need_x) {
                T* gx = ix->grad.data();
                gx[r0 + 2 * xx] += f[b * 4 + 0] * gv;
                gx[r0 + 2 * xx + 1] += f[b * 4 + 1] * gv;
                gx[r1 + 2 * xx] += f[b * 4 + 2] * gv;
                gx[r1 + 2 * xx + 1] += f[b * 4 + 3] * gv;
              }
              if (need_f) {
                const T* xd = ix->data.data();
                acc[0] += gv * xd[r0 + 2 * xx];
                acc[1] += gv * xd[r0 + 2 * xx + 1];
                acc[2] += gv * xd[r1 + 2 * xx];
                acc[3] += gv * xd[r1 + 2 * xx + 1];
              }
            }
          }
          if (need_f) {
            for (int k = 0; k < 4; ++k) iff->grad[static_cast<std::size_t>(b * 4 + k)] += acc[k];
          }
        }
      }
    }
  });
  return out;
}

template <typename T>
Tensor<T> idwt2_packed(const Tensor<T>& bands, const Tensor<T>& filters, int64_t out_h, int64_t out_w) {
  check_filters(filters.shape(), "idwt2");
  const Shape s = bands.shape();
  if (s.c % 4 != 0) {
    throw DimensionError("idwt2: sub-band tensor needs a channel count divisible by 4, got " + s.str());
  }
  const int64_t c_out = s.c / 4;
  const Shape so{s.n, c_out, 2 * s.h, 2 * s.w};
  auto out = Tensor<T>::zeros(so);
  const T* f = filters.data().data();
  const T* pb = bands.data().data();
  T* po = out.data().data();
  for (int64_t n = 0; n < s.n; ++n) {
    for (int64_t c = 0; c < c_out; ++c) {
      T* dst = po + (n * c_out + c) * so.plane();
      for (int64_t b = 0; b < 4; ++b) {
        const T* fb = f + b * 4;
        const T* src = pb + (n * s.c + b * c_out + c) * s.plane();
        for (int64_t y = 0; y < s.h; ++y) {
          T* r0 = dst + (2 * y) * so.w;
          T* r1 = r0 + so.w;
          for (int64_t xx = 0; xx < s.w; ++xx) {
            const T v = src[y * s.w + xx];
            r0[2 * xx] += fb[0] * v;
            r0[2 * xx + 1] += fb[1] * v;
            r1[2 * xx] += fb[2] * v;
            r1[2 * xx + 1] += fb[3] * v;
          }
        }
      }
    }
  }
  auto ib = bands.impl();
  auto iff = filters.impl();
  auto io = out.impl();
  detail::record<T>({&bands, &filters}, out, [ib, iff, io, s, so, c_out]() {
    const bool need_b = ib->requires_grad;
    const bool need_f = iff->requires_grad;
    if (need_b) ib->ensure_grad();
    if (need_f) iff->ensure_grad();
    const T* f = iff->data.data();
    for (int64_t n = 0; n < s.n; ++n) {
      for (int64_t c = 0; c < c_out; ++c) {
        const T* g = io->grad.data() + (n * c_out + c) * so.plane();
        for (int64_t b = 0; b < 4; ++b) {
          const int64_t boff = (n * s.c + b * c_out + c) * s.plane();
          T acc[4] = {0, 0, 0, 0};
          for (int64_t y = 0; y < s.h; ++y) {
            const T* g0 = g + (2 * y) * so.w;
            const T* g1 = g0 + so.w;
            for (int64_t xx = 0; xx < s.w; ++xx) {
              if (need_b) {
                ib->grad[static_cast<std::size_t>(boff + y * s.w + xx)] +=
                    f[b * 4 + 0] * g0[2 * xx] + f[b * 4 + 1] * g0[2 * xx + 1] + f[b * 4 + 2] * g1[2 * xx] +
                    f[b * 4 + 3] * g1[2 * xx + 1];
              }
              if (need_f) {
                const T v = ib->data[static_cast<std::size_t>(boff + y * s.w + xx)];
                acc[0] += v * g0[2 * xx];
                acc[1] += v * g0[2 * xx + 1];
                acc[2] += v * g1[2 * xx];
                acc[3] += v * g1[2 * xx + 1];
              }
            }
          }
          if (need_f) {
            for (int k = 0; k < 4; ++k) iff->grad[static_cast<std::size_t>(b * 4 + k)] += acc[k];
          }
        }
      }
    }
  });
  if (out_h < 0 && out_w < 0) return out;
  const int64_t th = out_h < 0 ? so.h : out_h;
  const int64_t tw = out_w < 0 ? so.w : out_w;
  return crop(out, 0, 0, th, tw);
}

template <typename T>
SubBands<T> dwt2(const Tensor<T>& x, const WaveletFilterBank<T>& bank, OddSizePolicy policy) {
  return SubBands<T>::unpack(dwt2_packed(x, bank.analysis, policy));
}

template <typename T>
Tensor<T> idwt2(const SubBands<T>& bands, const WaveletFilterBank<T>& bank, int64_t out_h, int64_t out_w) {
  const Shape s = bands.ll.shape();
  for (Band b : kAllBands) {
    if (!(bands[b].shape() == s)) {
      throw DimensionError(std::string("idwt2: band ") + band_name(b) + " has shape " + bands[b].shape().str() +
                           ", LL has " + s.str());
    }
  }
  return idwt2_packed(bands.packed(), bank.synthesis, out_h, out_w);
}

template <typename T>
Tensor<T> pixel_unshuffle(const Tensor<T>& x, int64_t r) {
  const Shape s = x.shape();
  if (r < 1 || s.h % r != 0 || s.w % r != 0) {
    throw DimensionError("pixel_unshuffle: height/width of " + s.str() + " not divisible by " +
                         std::to_string(r));
  }
  const Shape so{s.n, s.c * r * r, s.h / r, s.w / r};
  // Gather map: out element -> in element.
  auto index = std::make_shared<std::vector<int64_t>>(static_cast<std::size_t>(s.numel()));
  auto out = Tensor<T>::zeros(so);
  int64_t o = 0;
  for (int64_t n = 0; n < so.n; ++n)
    for (int64_t c = 0; c < so.c; ++c) {
      const int64_t ci = c / (r * r);
      const int64_t i = (c / r) % r;
      const int64_t j = c % r;
      for (int64_t y = 0; y < so.h; ++y)
        for (int64_t xx = 0; xx < so.w; ++xx, ++o) {
          const int64_t src = ((n * s.c + ci) * s.h + y * r + i) * s.w + xx * r + j;
          (*index)[static_cast<std::size_t>(o)] = src;
          out.data()[static_cast<std::size_t>(o)] = x.data()[static_cast<std::size_t>(src)];
        }
    }
  auto ix = x.impl();
  auto io = out.impl();
  detail::record<T>({&x}, out, [ix, io, index]() {
    ix->ensure_grad();
    for (std::size_t k = 0; k < index->size(); ++k) {
      ix->grad[static_cast<std::size_t>((*index)[k])] += io->grad[k];
    }
  });
  return out;
}

template <typename T>
Tensor<T> pixel_shuffle(const Tensor<T>& x, int64_t r) {
  const Shape s = x.shape();
  if (r < 1 || s.c % (r * r) != 0) {
    throw DimensionError("pixel_shuffle: channel axis of " + s.str() + " not divisible by " +
                         std::to_string(r * r));
  }
  const Shape so{s.n, s.c / (r * r), s.h * r, s.w * r};
  auto index = std::make_shared<std::vector<int64_t>>(static_cast<std::size_t>(s.numel()));
  auto out = Tensor<T>::zeros(so);
  int64_t o = 0;
  for (int64_t n = 0; n < so.n; ++n)
    for (int64_t c = 0; c < so.c; ++c)
      for (int64_t y = 0; y < so.h; ++y)
        for (int64_t xx = 0; xx < so.w; ++xx, ++o) {
          const int64_t ci = c * r * r + (y % r) * r + (xx % r);
          const int64_t src = ((n * s.c + ci) * s.h + y / r) * s.w + xx / r;
          (*index)[static_cast<std::size_t>(o)] = src;
          out.data()[static_cast<std::size_t>(o)] = x.data()[static_cast<std::size_t>(src)];
        }
  auto ix = x.impl();
  auto io = out.impl();
  detail::record<T>({&x}, out, [ix, io, index]() {
    ix->ensure_grad();
    for (std::size_t k = 0; k < index->size(); ++k) {
      ix->grad[static_cast<std::size_t>((*index)[k])] += io->grad[k];
    }
  });
  return out;
}

#define SWFORMER_INSTANTIATE_TRANSFORMS(T)                                                      \
  template Tensor<T> fft2_packed(const Tensor<T>&);                                             \
  template Tensor<T> ifft2_packed(const Tensor<T>&);                                            \
  template ComplexTensor<T> fft2(const Tensor<T>&);                                             \
  template Tensor<T> ifft2(const ComplexTensor<T>&);                                            \
  template double ifft2_imag_residue(const ComplexTensor<T>&);                                  \
  template struct SubBands<T>;                                                                  \
  template struct WaveletFilterBank<T>;                                                         \
  template Tensor<T> dwt2_packed(const Tensor<T>&, const Tensor<T>&, OddSizePolicy);            \
  template Tensor<T> idwt2_packed(const Tensor<T>&, const Tensor<T>&, int64_t, int64_t);        \
  template SubBands<T> dwt2(const Tensor<T>&, const WaveletFilterBank<T>&, OddSizePolicy);      \
  template Tensor<T> idwt2(const SubBands<T>&, const WaveletFilterBank<T>&, int64_t, int64_t);  \
  template Tensor<T> pixel_unshuffle(const Tensor<T>&, int64_t);                                \
  template Tensor<T> pixel_shuffle(const Tensor<T>&, int64_t);

SWFORMER_INSTANTIATE_TRANSFORMS(float)
SWFORMER_INSTANTIATE_TRANSFORMS(double)

#undef SWFORMER_INSTANTIATE_TRANSFORMS

}  // namespace swformer
