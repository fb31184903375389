#include "swformer/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace swformer {

namespace {

using std::int64_t;
using std::size_t;

template <typename T>
using ImplPtr = typename Tensor<T>::ImplPtr;

std::string axes_msg(const char* op, const Shape& a, const Shape& b) {
  std::string offending;
  if (a.n != b.n) offending += " batch";
  if (a.c != b.c) offending += " channel";
  if (a.h != b.h) offending += " height";
  if (a.w != b.w) offending += " width";
  return std::string(op) + ": shape mismatch " + a.str() + " vs " + b.str() + " on axes:" + offending;
}

// How `b` maps onto the elements of `a`.
struct Broadcast {
  bool n = false;
  bool c = false;
  bool hw = false;
};

Broadcast broadcast_of(const char* op, const Shape& a, const Shape& b) {
  Broadcast bc;
  const bool ok_n = b.n == a.n || b.n == 1;
  const bool ok_c = b.c == a.c || b.c == 1;
  const bool same_hw = b.h == a.h && b.w == a.w;
  const bool unit_hw = b.h == 1 && b.w == 1;
  if (!ok_n || !ok_c || !(same_hw || unit_hw)) throw DimensionError(axes_msg(op, a, b));
  bc.n = b.n != a.n;
  bc.c = b.c != a.c;
  bc.hw = !same_hw;
  return bc;
}

enum class BinOp { kAdd, kSub, kMul };

template <typename T>
Tensor<T> binary(const Tensor<T>& a, const Tensor<T>& b, BinOp op, const char* name) {
  const Shape& sa = a.shape();
  const Shape& sb = b.shape();
  const Broadcast bc = broadcast_of(name, sa, sb);
  auto out = Tensor<T>::zeros(sa);
  const int64_t plane = sa.plane();
  const T* pa = a.data().data();
  const T* pb = b.data().data();
  T* po = out.data().data();

  auto b_offset = [&](int64_t n, int64_t c) {
    return ((bc.n ? 0 : n) * sb.c + (bc.c ? 0 : c)) * sb.plane();
  };

  for (int64_t n = 0; n < sa.n; ++n) {
    for (int64_t c = 0; c < sa.c; ++c) {
      const int64_t off = (n * sa.c + c) * plane;
      const T* ra = pa + off;
      const T* rb = pb + b_offset(n, c);
      T* ro = po + off;
      if (bc.hw) {
        const T v = rb[0];
        switch (op) {
          case BinOp::kAdd: for (int64_t i = 0; i < plane; ++i) ro[i] = ra[i] + v; break;
          case BinOp::kSub: for (int64_t i = 0; i < plane; ++i) ro[i] = ra[i] - v; break;
          case BinOp::kMul: for (int64_t i = 0; i < plane; ++i) ro[i] = ra[i] * v; break;
        }
      } else {
        switch (op) {
          case BinOp::kAdd: for (int64_t i = 0; i < plane; ++i) ro[i] = ra[i] + rb[i]; break;
          case BinOp::kSub: for (int64_t i = 0; i < plane; ++i) ro[i] = ra[i] - rb[i]; break;
          case BinOp::kMul: for (int64_t i = 0; i < plane; ++i) ro[i] = ra[i] * rb[i]; break;
        }
      }
    }
  }

  auto ia = a.impl();
  auto ib = b.impl();
  auto io = out.impl();
  detail::record<T>({&a, &b}, out, [ia, ib, io, bc, op, plane, sa, sb]() {
    const T* go = io->grad.data();
    const bool need_a = ia->requires_grad;
    const bool need_b = ib->requires_grad;
    if (need_a) ia->ensure_grad();
    if (need_b) ib->ensure_grad();
    for (int64_t n = 0; n < sa.n; ++n) {
      for (int64_t c = 0; c < sa.c; ++c) {
        const int64_t off = (n * sa.c + c) * plane;
        const int64_t boff = ((bc.n ? 0 : n) * sb.c + (bc.c ? 0 : c)) * sb.plane();
        const T* g = go + off;
        if (need_a) {
          T* ga = ia->grad.data() + off;
          if (op == BinOp::kMul) {
            const T* rb = ib->data.data() + boff;
            if (bc.hw) {
              for (int64_t i = 0; i < plane; ++i) ga[i] += g[i] * rb[0];
            } else {
              for (int64_t i = 0; i < plane; ++i) ga[i] += g[i] * rb[i];
            }
          } else {
            for (int64_t i = 0; i < plane; ++i) ga[i] += g[i];
          }
        }
        if (need_b) {
          T* gb = ib->grad.data() + boff;
          const T sign = op == BinOp::kSub ? T(-1) : T(1);
          if (op == BinOp::kMul) {
            const T* ra = ia->data.data() + off;
            if (bc.hw) {
              T acc = 0;
              for (int64_t i = 0; i < plane; ++i) acc += g[i] * ra[i];
              gb[0] += acc;
            } else {
              for (int64_t i = 0; i < plane; ++i) gb[i] += g[i] * ra[i];
            }
          } else if (bc.hw) {
            T acc = 0;
            for (int64_t i = 0; i < plane; ++i) acc += g[i];
            gb[0] += sign * acc;
          } else {
            for (int64_t i = 0; i < plane; ++i) gb[i] += sign * g[i];
          }
        }
      }
    }
  });
  return out;
}

// Applies y = f(x) elementwise with dy/dx = df(x, y).
template <typename T, typename F, typename DF>
Tensor<T> unary(const Tensor<T>& x, F f, DF df) {
  auto out = Tensor<T>::zeros(x.shape());
  const auto src = x.data();
  auto dst = out.data();
  for (size_t i = 0; i < src.size(); ++i) dst[i] = f(src[i]);
  auto ix = x.impl();
  auto io = out.impl();
  detail::record<T>({&x}, out, [ix, io, df]() {
    ix->ensure_grad();
    const size_t count = ix->data.size();
    for (size_t i = 0; i < count; ++i) ix->grad[i] += io->grad[i] * df(ix->data[i], io->data[i]);
  });
  return out;
}

// First/last output index whose input tap lands inside [0, extent).
struct TapRange {
  int64_t lo;
  int64_t hi;  // inclusive; lo > hi means empty
};

TapRange tap_range(int64_t k, int64_t pad, int64_t stride, int64_t in_extent, int64_t out_extent) {
  const int64_t lo_num = pad - k;
  const int64_t lo = lo_num <= 0 ? 0 : (lo_num + stride - 1) / stride;
  const int64_t hi_num = in_extent - 1 + pad - k;
  if (hi_num < 0) return {0, -1};
  return {lo, std::min(out_extent - 1, hi_num / stride)};
}

}  // namespace

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  return binary(a, b, BinOp::kAdd, "add");
}
template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) {
  return binary(a, b, BinOp::kSub, "sub");
}
template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
  return binary(a, b, BinOp::kMul, "mul");
}

template <typename T>
Tensor<T> scale(const Tensor<T>& x, T factor) {
  return unary(
      x, [factor](T v) { return v * factor; }, [factor](T, T) { return factor; });
}

template <typename T>
Tensor<T> add_scalar(const Tensor<T>& x, T value) {
  return unary(
      x, [value](T v) { return v + value; }, [](T, T) { return T(1); });
}

template <typename T>
Tensor<T> abs(const Tensor<T>& x) {
  return unary(
      x, [](T v) { return std::abs(v); },
      [](T v, T) { return v > T(0) ? T(1) : (v < T(0) ? T(-1) : T(0)); });
}

template <typename T>
Tensor<T> gelu(const Tensor<T>& x) {
  constexpr double kInvSqrt2 = 0.70710678118654752440;
  constexpr double kInvSqrt2Pi = 0.39894228040143267794;
  return unary(
      x,
      [](T v) {
        const double d = v;
        return static_cast<T>(0.5 * d * (1.0 + std::erf(d * kInvSqrt2)));
      },
      [](T v, T) {
        const double d = v;
        const double cdf = 0.5 * (1.0 + std::erf(d * kInvSqrt2));
        const double pdf = kInvSqrt2Pi * std::exp(-0.5 * d * d);
        return static_cast<T>(cdf + d * pdf);
      });
}

template <typename T>
Tensor<T> sigmoid(const Tensor<T>& x) {
  return unary(
      x,
      [](T v) {
        if (v >= T(0)) return T(1) / (T(1) + std::exp(-v));
        const T e = std::exp(v);
        return e / (T(1) + e);
      },
      [](T, T y) { return y * (T(1) - y); });
}

template <typename T>
Tensor<T> conv2d(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias,
                 ConvOptions opt) {
  const Shape& sx = x.shape();
  const Shape& sw = weight.shape();
  const int64_t groups = opt.groups;
  const int64_t stride = opt.stride;
  const int64_t pad = opt.padding;
  if (groups < 1 || stride < 1 || pad < 0) throw DimensionError("conv2d: invalid stride/padding/groups");
  if (sx.c % groups != 0 || sw.n % groups != 0) {
    throw DimensionError("conv2d: channels (in " + std::to_string(sx.c) + ", out " +
                         std::to_string(sw.n) + ") not divisible by groups " + std::to_string(groups));
  }
  if (sw.c != sx.c / groups) {
    throw DimensionError("conv2d: weight " + sw.str() + " expects " + std::to_string(sw.c * groups) +
                         " input channels on the channel axis, input " + sx.str() + " has " +
                         std::to_string(sx.c));
  }
  if (bias.defined() && (bias.numel() != sw.n || bias.shape().c != sw.n)) {
    throw DimensionError("conv2d: bias " + bias.shape().str() + " does not match out channels " +
                         std::to_string(sw.n));
  }
  const int64_t kh = sw.h;
  const int64_t kw = sw.w;
  const int64_t span_h = sx.h + 2 * pad - kh;
  const int64_t span_w = sx.w + 2 * pad - kw;
  if (span_h < 0 || span_w < 0) {
    throw DimensionError("conv2d: kernel " + sw.str() + " larger than padded input " + sx.str() +
                         " on height/width axes");
  }
  const int64_t oh = span_h / stride + 1;
  const int64_t ow = span_w / stride + 1;
  const int64_t cin_g = sx.c / groups;
  const int64_t cout_g = sw.n / groups;
  const Shape so{sx.n, sw.n, oh, ow};
  auto out = Tensor<T>::zeros(so);

  std::vector<TapRange> rows(static_cast<size_t>(kh));
  std::vector<TapRange> cols(static_cast<size_t>(kw));
  for (int64_t k = 0; k < kh; ++k) rows[static_cast<size_t>(k)] = tap_range(k, pad, stride, sx.h, oh);
  for (int64_t k = 0; k < kw; ++k) cols[static_cast<size_t>(k)] = tap_range(k, pad, stride, sx.w, ow);

  const T* px = x.data().data();
  const T* pw = weight.data().data();
  T* po = out.data().data();
  const T* pb = bias.defined() ? bias.data().data() : nullptr;

  for (int64_t n = 0; n < sx.n; ++n) {
    for (int64_t g = 0; g < groups; ++g) {
      for (int64_t oc = 0; oc < cout_g; ++oc) {
        const int64_t o = g * cout_g + oc;
        T* oplane = po + (n * so.c + o) * oh * ow;
        if (pb != nullptr) std::fill(oplane, oplane + oh * ow, pb[o]);
        for (int64_t ic = 0; ic < cin_g; ++ic) {
          const int64_t i = g * cin_g + ic;
          const T* iplane = px + (n * sx.c + i) * sx.h * sx.w;
          const T* wk = pw + (o * cin_g + ic) * kh * kw;
          if (kh == 1 && kw == 1 && stride == 1 && pad == 0) {
            const T wv = wk[0];
            const int64_t count = oh * ow;
            for (int64_t p = 0; p < count; ++p) oplane[p] += wv * iplane[p];
            continue;
          }
          for (int64_t ky = 0; ky < kh; ++ky) {
            const TapRange ry = rows[static_cast<size_t>(ky)];
            for (int64_t kx = 0; kx < kw; ++kx) {
              const TapRange rx = cols[static_cast<size_t>(kx)];
              const T wv = wk[ky * kw + kx];
              for (int64_t oy = ry.lo; oy <= ry.hi; ++oy) {
                const T* irow = iplane + (oy * stride + ky - pad) * sx.w + (kx - pad);
                T* orow = oplane + oy * ow;
                if (stride == 1) {
                  for (int64_t ox = rx.lo; ox <= rx.hi; ++ox) orow[ox] += wv * irow[ox];
                } else {
                  for (int64_t ox = rx.lo; ox <= rx.hi; ++ox) orow[ox] += wv * irow[ox * stride];
                }
              }
            }
          }
        }
      }
    }
  }

  auto ix = x.impl();
  auto iw = weight.impl();
  auto ib = bias.defined() ? bias.impl() : nullptr;
  auto io = out.impl();
  detail::record<T>({&x, &weight, &bias}, out,
                    [ix, iw, ib, io, sx, so, kh, kw, stride, pad, groups, cin_g, cout_g, rows, cols]() {
    const bool need_x = ix->requires_grad;
    const bool need_w = iw->requires_grad;
    const bool need_b = ib && ib->requires_grad;
    if (need_x) ix->ensure_grad();
    if (need_w) iw->ensure_grad();
    if (need_b) ib->ensure_grad();
    const T* go = io->grad.data();
    const int64_t oh = so.h;
    const int64_t ow = so.w;
    for (int64_t n = 0; n < sx.n; ++n) {
      for (int64_t g = 0; g < groups; ++g) {
        for (int64_t oc = 0; oc < cout_g; ++oc) {
          const int64_t o = g * cout_g + oc;
          const T* gplane = go + (n * so.c + o) * oh * ow;
          if (need_b) {
            T acc = 0;
            for (int64_t p = 0; p < oh * ow; ++p) acc += gplane[p];
            ib->grad[static_cast<size_t>(o)] += acc;
          }
          for (int64_t ic = 0; ic < cin_g; ++ic) {
            const int64_t i = g * cin_g + ic;
            const size_t ioff = static_cast<size_t>((n * sx.c + i) * sx.h * sx.w);
            const T* iplane = ix->data.data() + ioff;
            T* giplane = need_x ? ix->grad.data() + ioff : nullptr;
            const size_t woff = static_cast<size_t>((o * cin_g + ic) * kh * kw);
            const T* wk = iw->data.data() + woff;
            T* gwk = need_w ? iw->grad.data() + woff : nullptr;
            if (kh == 1 && kw == 1 && stride == 1 && pad == 0) {
              const int64_t count = oh * ow;
              if (need_x) {
                const T wv = wk[0];
                for (int64_t p = 0; p < count; ++p) giplane[p] += wv * gplane[p];
              }
              if (need_w) {
                T acc = 0;
                for (int64_t p = 0; p < count; ++p) acc += gplane[p] * iplane[p];
                gwk[0] += acc;
              }
              continue;
            }
            for (int64_t ky = 0; ky < kh; ++ky) {
              const TapRange ry = rows[static_cast<size_t>(ky)];
              for (int64_t kx = 0; kx < kw; ++kx) {
                const TapRange rx = cols[static_cast<size_t>(kx)];
                const T wv = wk[ky * kw + kx];
                T acc = 0;
                for (int64_t oy = ry.lo; oy <= ry.hi; ++oy) {
                  const int64_t base = (oy * stride + ky - pad) * sx.w + (kx - pad);
                  const T* grow = gplane + oy * ow;
                  if (need_x) {
                    T* girow = giplane + base;
                    for (int64_t ox = rx.lo; ox <= rx.hi; ++ox) girow[ox * stride] += wv * grow[ox];
                  }
                  if (need_w) {
                    const T* irow = iplane + base;
                    for (int64_t ox = rx.lo; ox <= rx.hi; ++ox) acc += grow[ox] * irow[ox * stride];
                  }
                }
                if (need_w) gwk[ky * kw + kx] += acc;
              }
            }
          }
        }
      }
    }
  });
  return out;
}

template <typename T>
Tensor<T> conv2d_transpose(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias,
                           ConvOptions opt) {
  const Shape& sx = x.shape();
  const Shape& sw = weight.shape();
  const int64_t groups = opt.groups;
  const int64_t stride = opt.stride;
  const int64_t pad = opt.padding;
  if (groups < 1 || stride < 1 || pad < 0) {
    throw DimensionError("conv2d_transpose: invalid stride/padding/groups");
  }
  if (sx.c % groups != 0) {
    throw DimensionError("conv2d_transpose: input channels " + std::to_string(sx.c) +
                         " not divisible by groups " + std::to_string(groups));
  }
  if (sw.n != sx.c) {
    throw DimensionError("conv2d_transpose: weight " + sw.str() + " expects " + std::to_string(sw.n) +
                         " input channels on the channel axis, input " + sx.str() + " has " +
                         std::to_string(sx.c));
  }
  const int64_t kh = sw.h;
  const int64_t kw = sw.w;
  const int64_t cin_g = sx.c / groups;
  const int64_t cout_g = sw.c;
  const int64_t cout = cout_g * groups;
  const int64_t oh = (sx.h - 1) * stride - 2 * pad + kh;
  const int64_t ow = (sx.w - 1) * stride - 2 * pad + kw;
  if (oh < 1 || ow < 1) throw DimensionError("conv2d_transpose: empty output for input " + sx.str());
  if (bias.defined() && bias.numel() != cout) {
    throw DimensionError("conv2d_transpose: bias " + bias.shape().str() + " does not match out channels " +
                         std::to_string(cout));
  }
  const Shape so{sx.n, cout, oh, ow};
  auto out = Tensor<T>::zeros(so);
  std::vector<TapRange> rows(static_cast<size_t>(kh));
  std::vector<TapRange> cols(static_cast<size_t>(kw));
  // Input index ranges whose scattered output lands inside the output.
  for (int64_t k = 0; k < kh; ++k) rows[static_cast<size_t>(k)] = tap_range(k, pad, stride, oh, sx.h);
  for (int64_t k = 0; k < kw; ++k) cols[static_cast<size_t>(k)] = tap_range(k, pad, stride, ow, sx.w);

  const T* px = x.data().data();
  const T* pw = weight.data().data();
  T* po = out.data().data();
  for (int64_t n = 0; n < sx.n; ++n) {
    for (int64_t o = 0; o < cout; ++o) {
      T* oplane = po + (n * cout + o) * oh * ow;
      if (bias.defined()) std::fill(oplane, oplane + oh * ow, bias.data()[static_cast<size_t>(o)]);
    }
    for (int64_t g = 0; g < groups; ++g) {
      for (int64_t ic = 0; ic < cin_g; ++ic) {
        const int64_t i = g * cin_g + ic;
        const T* iplane = px + (n * sx.c + i) * sx.h * sx.w;
        for (int64_t oc = 0; oc < cout_g; ++oc) {
          const int64_t o = g * cout_g + oc;
          T* oplane = po + (n * cout + o) * oh * ow;
          const T* wk = pw + (i * cout_g + oc) * kh * kw;
          for (int64_t ky = 0; ky < kh; ++ky) {
            const TapRange ry = rows[static_cast<size_t>(ky)];
            for (int64_t kx = 0; kx < kw; ++kx) {
              const TapRange rx = cols[static_cast<size_t>(kx)];
              const T wv = wk[ky * kw + kx];
              for (int64_t iy = ry.lo; iy <= ry.hi; ++iy) {
                const T* irow = iplane + iy * sx.w;
                T* orow = oplane + (iy * stride + ky - pad) * ow + (kx - pad);
                for (int64_t ixx = rx.lo; ixx <= rx.hi; ++ixx) orow[ixx * stride] += wv * irow[ixx];
              }
            }
          }
        }
      }
    }
  }

  auto ix = x.impl();
  auto iw = weight.impl();
  auto ib = bias.defined() ? bias.impl() : nullptr;
  auto io = out.impl();
  detail::record<T>({&x, &weight, &bias}, out,
                    [ix, iw, ib, io, sx, so, kh, kw, stride, pad, groups, cin_g, cout_g, rows, cols]() {
    const bool need_x = ix->requires_grad;
    const bool need_w = iw->requires_grad;
    const bool need_b = ib && ib->requires_grad;
    if (need_x) ix->ensure_grad();
    if (need_w) iw->ensure_grad();
    if (need_b) ib->ensure_grad();
    const T* go = io->grad.data();
    const int64_t oh = so.h;
    const int64_t ow = so.w;
    for (int64_t n = 0; n < sx.n; ++n) {
      if (need_b) {
        for (int64_t o = 0; o < so.c; ++o) {
          const T* gplane = go + (n * so.c + o) * oh * ow;
          T acc = 0;
          for (int64_t p = 0; p < oh * ow; ++p) acc += gplane[p];
          ib->grad[static_cast<size_t>(o)] += acc;
        }
      }
      for (int64_t g = 0; g < groups; ++g) {
        for (int64_t ic = 0; ic < cin_g; ++ic) {
          const int64_t i = g * cin_g + ic;
          const size_t ioff = static_cast<size_t>((n * sx.c + i) * sx.h * sx.w);
          const T* iplane = ix->data.data() + ioff;
          T* giplane = need_x ? ix->grad.data() + ioff : nullptr;
          for (int64_t oc = 0; oc < cout_g; ++oc) {
            const int64_t o = g * cout_g + oc;
            const T* gplane = go + (n * so.c + o) * oh * ow;
            const size_t woff = static_cast<size_t>((i * cout_g + oc) * kh * kw);
            const T* wk = iw->data.data() + woff;
            T* gwk = need_w ? iw->grad.data() + woff : nullptr;
            for (int64_t ky = 0; ky < kh; ++ky) {
              const TapRange ry = rows[static_cast<size_t>(ky)];
              for (int64_t kx = 0; kx < kw; ++kx) {
                const TapRange rx = cols[static_cast<size_t>(kx)];
                const T wv = wk[ky * kw + kx];
                T acc = 0;
                for (int64_t iy = ry.lo; iy <= ry.hi; ++iy) {
                  const T* grow = gplane + (iy * stride + ky - pad) * ow + (kx - pad);
                  const int64_t base = iy * sx.w;
                  if (need_x) {
                    T* girow = giplane + base;
                    for (int64_t ixx = rx.lo; ixx <= rx.hi; ++ixx) girow[ixx] += wv * grow[ixx * stride];
                  }
                  if (need_w) {
                    const T* irow = iplane + base;
                    for (int64_t ixx = rx.lo; ixx <= rx.hi; ++ixx) acc += irow[ixx] * grow[ixx * stride];
                  }
                }
                if (need_w) gwk[ky * kw + kx] += acc;
              }
            }
          }
        }
      }
    }
  });
  return out;
}

template <typename T>
Tensor<T> batchnorm2d(const Tensor<T>& x, const Tensor<T>& gamma, const Tensor<T>& beta,
                      BatchNormStats<T>& stats, bool training, T momentum, T eps) {
  const Shape& s = x.shape();
  if (gamma.numel() != s.c || beta.numel() != s.c || stats.mean.numel() != s.c ||
      stats.var.numel() != s.c) {
    throw DimensionError("batchnorm2d: per-channel parameters must have " + std::to_string(s.c) +
                         " entries (channel axis of " + s.str() + ")");
  }
  const int64_t plane = s.plane();
  const int64_t count = s.n * plane;
  std::vector<T> mu(static_cast<size_t>(s.c));
  std::vector<T> inv_std(static_cast<size_t>(s.c));
  const T* px = x.data().data();
  for (int64_t c = 0; c < s.c; ++c) {
    const auto ci = static_cast<size_t>(c);
    if (training) {
      double acc = 0;
      for (int64_t n = 0; n < s.n; ++n) {
        const T* p = px + (n * s.c + c) * plane;
        for (int64_t i = 0; i < plane; ++i) acc += p[i];
      }
      const double m = acc / static_cast<double>(count);
      double sq = 0;
      for (int64_t n = 0; n < s.n; ++n) {
        const T* p = px + (n * s.c + c) * plane;
        for (int64_t i = 0; i < plane; ++i) sq += (p[i] - m) * (p[i] - m);
      }
      const double var = sq / static_cast<double>(count);
      mu[ci] = static_cast<T>(m);
      inv_std[ci] = static_cast<T>(1.0 / std::sqrt(var + static_cast<double>(eps)));
      const double unbiased = count > 1 ? sq / static_cast<double>(count - 1) : var;
      auto rm = stats.mean.data();
      auto rv = stats.var.data();
      rm[ci] = static_cast<T>((1.0 - momentum) * rm[ci] + momentum * m);
      rv[ci] = static_cast<T>((1.0 - momentum) * rv[ci] + momentum * unbiased);
    } else {
      mu[ci] = stats.mean.data()[ci];
      inv_std[ci] = static_cast<T>(1.0 / std::sqrt(static_cast<double>(stats.var.data()[ci]) + eps));
    }
  }
  auto out = Tensor<T>::zeros(s);
  auto xhat = std::make_shared<std::vector<T>>(static_cast<size_t>(s.numel()));
  T* po = out.data().data();
  for (int64_t n = 0; n < s.n; ++n) {
    for (int64_t c = 0; c < s.c; ++c) {
      const auto ci = static_cast<size_t>(c);
      const int64_t off = (n * s.c + c) * plane;
      const T g = gamma.data()[ci];
      const T b = beta.data()[ci];
      for (int64_t i = 0; i < plane; ++i) {
        const T xh = (px[off + i] - mu[ci]) * inv_std[ci];
        (*xhat)[static_cast<size_t>(off + i)] = xh;
        po[off + i] = g * xh + b;
      }
    }
  }
  auto ix = x.impl();
  auto ig = gamma.impl();
  auto ibt = beta.impl();
  auto io = out.impl();
  detail::record<T>({&x, &gamma, &beta}, out, [ix, ig, ibt, io, xhat, inv_std, s, plane, count, training]() {
    const T* go = io->grad.data();
    if (ix->requires_grad) ix->ensure_grad();
    if (ig->requires_grad) ig->ensure_grad();
    if (ibt->requires_grad) ibt->ensure_grad();
    for (int64_t c = 0; c < s.c; ++c) {
      const auto ci = static_cast<size_t>(c);
      double sum_g = 0;
      double sum_gx = 0;
      for (int64_t n = 0; n < s.n; ++n) {
        const int64_t off = (n * s.c + c) * plane;
        for (int64_t i = 0; i < plane; ++i) {
          sum_g += go[off + i];
          sum_gx += go[off + i] * (*xhat)[static_cast<size_t>(off + i)];
        }
      }
      if (ig->requires_grad) ig->grad[ci] += static_cast<T>(sum_gx);
      if (ibt->requires_grad) ibt->grad[ci] += static_cast<T>(sum_g);
      if (!ix->requires_grad) continue;
      const T g = ig->data[ci];
      const T k = g * inv_std[ci];
      const double mean_g = sum_g / static_cast<double>(count);
      const double mean_gx = sum_gx / static_cast<double>(count);
      for (int64_t n = 0; n < s.n; ++n) {
        const int64_t off = (n * s.c + c) * plane;
        T* gx = ix->grad.data() + off;
        for (int64_t i = 0; i < plane; ++i) {
          if (training) {
            const double xh = (*xhat)[static_cast<size_t>(off + i)];
            gx[i] += static_cast<T>(k * (go[off + i] - mean_g - xh * mean_gx));
          } else {
            gx[i] += k * go[off + i];
          }
        }
      }
    }
  });
  return out;
}

template <typename T>
Tensor<T> layer_norm_channels(const Tensor<T>& x, const Tensor<T>& gamma, const Tensor<T>& beta, T eps) {
  const Shape& s = x.shape();
  if (gamma.numel() != s.c || beta.numel() != s.c) {
    throw DimensionError("layer_norm_channels: gamma/beta must have " + std::to_string(s.c) +
                         " entries (channel axis of " + s.str() + ")");
  }
  const int64_t plane = s.plane();
  auto out = Tensor<T>::zeros(s);
  auto xhat = std::make_shared<std::vector<T>>(static_cast<size_t>(s.numel()));
  auto inv_std = std::make_shared<std::vector<T>>(static_cast<size_t>(s.n * plane));
  const T* px = x.data().data();
  T* po = out.data().data();
  std::vector<double> mu(static_cast<size_t>(plane));
  std::vector<double> var(static_cast<size_t>(plane));
  for (int64_t n = 0; n < s.n; ++n) {
    const T* base = px + n * s.c * plane;
    std::fill(mu.begin(), mu.end(), 0.0);
    std::fill(var.begin(), var.end(), 0.0);
    for (int64_t c = 0; c < s.c; ++c) {
      for (int64_t i = 0; i < plane; ++i) mu[static_cast<size_t>(i)] += base[c * plane + i];
    }
    for (auto& m : mu) m /= static_cast<double>(s.c);
    for (int64_t c = 0; c < s.c; ++c) {
      for (int64_t i = 0; i < plane; ++i) {
        const double d = base[c * plane + i] - mu[static_cast<size_t>(i)];
        var[static_cast<size_t>(i)] += d * d;
      }
    }
    for (int64_t i = 0; i < plane; ++i) {
      (*inv_std)[static_cast<size_t>(n * plane + i)] =
          static_cast<T>(1.0 / std::sqrt(var[static_cast<size_t>(i)] / static_cast<double>(s.c) + eps));
    }
    for (int64_t c = 0; c < s.c; ++c) {
      const T g = gamma.data()[static_cast<size_t>(c)];
      const T b = beta.data()[static_cast<size_t>(c)];
      for (int64_t i = 0; i < plane; ++i) {
        const int64_t idx = (n * s.c + c) * plane + i;
        const T xh = static_cast<T>((px[idx] - mu[static_cast<size_t>(i)]) *
                                    (*inv_std)[static_cast<size_t>(n * plane + i)]);
        (*xhat)[static_cast<size_t>(idx)] = xh;
        po[idx] = g * xh + b;
      }
    }
  }
  auto ix = x.impl();
  auto ig = gamma.impl();
  auto ibt = beta.impl();
  auto io = out.impl();
  detail::record<T>({&x, &gamma, &beta}, out, [ix, ig, ibt, io, xhat, inv_std, s, plane]() {
    const T* go = io->grad.data();
    if (ig->requires_grad) ig->ensure_grad();
    if (ibt->requires_grad) ibt->ensure_grad();
    for (int64_t n = 0; n < s.n; ++n) {
      for (int64_t c = 0; c < s.c; ++c) {
        const int64_t off = (n * s.c + c) * plane;
        double sg = 0;
        double sgx = 0;
        for (int64_t i = 0; i < plane; ++i) {
          sg += go[off + i];
          sgx += go[off + i] * (*xhat)[static_cast<size_t>(off + i)];
        }
        if (ig->requires_grad) ig->grad[static_cast<size_t>(c)] += static_cast<T>(sgx);
        if (ibt->requires_grad) ibt->grad[static_cast<size_t>(c)] += static_cast<T>(sg);
      }
    }
    if (!ix->requires_grad) return;
    ix->ensure_grad();
    std::vector<double> mean_d(static_cast<size_t>(plane));
    std::vector<double> mean_dx(static_cast<size_t>(plane));
    for (int64_t n = 0; n < s.n; ++n) {
      std::fill(mean_d.begin(), mean_d.end(), 0.0);
      std::fill(mean_dx.begin(), mean_dx.end(), 0.0);
      for (int64_t c = 0; c < s.c; ++c) {
        const T g = ig->data[static_cast<size_t>(c)];
        const int64_t off = (n * s.c + c) * plane;
        for (int64_t i = 0; i < plane; ++i) {
          const double d = go[off + i] * g;
          mean_d[static_cast<size_t>(i)] += d;
          mean_dx[static_cast<size_t>(i)] += d * (*xhat)[static_cast<size_t>(off + i)];
        }
      }
      for (int64_t i = 0; i < plane; ++i) {
        mean_d[static_cast<size_t>(i)] /= static_cast<double>(s.c);
        mean_dx[static_cast<size_t>(i)] /= static_cast<double>(s.c);
      }
      for (int64_t c = 0; c < s.c; ++c) {
        const T g = ig->data[static_cast<size_t>(c)];
        const int64_t off = (n * s.c + c) * plane;
        T* gx = ix->grad.data() + off;
        for (int64_t i = 0; i < plane; ++i) {
          const double d = go[off + i] * g;
          const double xh = (*xhat)[static_cast<size_t>(off + i)];
          gx[i] += static_cast<T>((*inv_std)[static_cast<size_t>(n * plane + i)] *
                                  (d - mean_d[static_cast<size_t>(i)] - xh * mean_dx[static_cast<size_t>(i)]));
        }
      }
    }
  });
  return out;
}

template <typename T>
Tensor<T> concat(const std::vector<Tensor<T>>& parts) {
  if (parts.empty()) throw DimensionError("concat: no inputs");
  const Shape& s0 = parts.front().shape();
  int64_t total_c = 0;
  for (const auto& p : parts) {
    const Shape& s = p.shape();
    if (s.n != s0.n || s.h != s0.h || s.w != s0.w) {
      throw DimensionError(axes_msg("concat", s0, Shape{s.n, s0.c, s.h, s.w}));
    }
    total_c += s.c;
  }
  const Shape so{s0.n, total_c, s0.h, s0.w};
  auto out = Tensor<T>::zeros(so);
  const int64_t plane = so.plane();
  T* po = out.data().data();
  for (int64_t n = 0; n < so.n; ++n) {
    int64_t c0 = 0;
    for (const auto& p : parts) {
      const int64_t len = p.shape().c * plane;
      const T* src = p.data().data() + n * len;
      std::copy(src, src + len, po + (n * total_c + c0) * plane);
      c0 += p.shape().c;
    }
  }
  std::vector<ImplPtr<T>> ins;
  for (const auto& p : parts) ins.push_back(p.impl());
  auto io = out.impl();
  detail::record_many<T>(parts, out, [ins, io, so, plane]() {
    for (int64_t n = 0; n < so.n; ++n) {
      int64_t c0 = 0;
      for (const auto& ip : ins) {
        const int64_t len = ip->shape.c * plane;
        if (ip->requires_grad) {
          ip->ensure_grad();
          const T* g = io->grad.data() + (n * so.c + c0) * plane;
          T* dst = ip->grad.data() + n * len;
          for (int64_t i = 0; i < len; ++i) dst[i] += g[i];
        }
        c0 += ip->shape.c;
      }
    }
  });
  return out;
}

template <typename T>
std::vector<Tensor<T>> split(const Tensor<T>& x, const std::vector<int64_t>& sizes) {
  const Shape& s = x.shape();
  const int64_t total = std::accumulate(sizes.begin(), sizes.end(), int64_t{0});
  if (total != s.c) {
    throw DimensionError("split: sizes sum to " + std::to_string(total) + " but channel axis of " +
                         s.str() + " has " + std::to_string(s.c));
  }
  const int64_t plane = s.plane();
  std::vector<Tensor<T>> outs;
  int64_t c0 = 0;
  for (const int64_t len_c : sizes) {
    if (len_c < 1) throw DimensionError("split: empty part");
    const Shape so{s.n, len_c, s.h, s.w};
    auto out = Tensor<T>::zeros(so);
    for (int64_t n = 0; n < s.n; ++n) {
      const T* src = x.data().data() + (n * s.c + c0) * plane;
      std::copy(src, src + len_c * plane, out.data().data() + n * len_c * plane);
    }
    auto ix = x.impl();
    auto io = out.impl();
    detail::record<T>({&x}, out, [ix, io, s, so, c0, plane]() {
      ix->ensure_grad();
      for (int64_t n = 0; n < s.n; ++n) {
        const T* g = io->grad.data() + n * so.c * plane;
        T* dst = ix->grad.data() + (n * s.c + c0) * plane;
        for (int64_t i = 0; i < so.c * plane; ++i) dst[i] += g[i];
      }
    });
    outs.push_back(std::move(out));
    c0 += len_c;
  }
  return outs;
}

template <typename T>
Tensor<T> reduce_mean(const Tensor<T>& x, unsigned axes) {
  const Shape& s = x.shape();
  const Shape so{(axes & kAxisN) ? 1 : s.n, (axes & kAxisC) ? 1 : s.c, (axes & kAxisH) ? 1 : s.h,
                 (axes & kAxisW) ? 1 : s.w};
  const double denom = static_cast<double>(s.numel()) / static_cast<double>(so.numel());
  std::vector<double> acc(static_cast<size_t>(so.numel()), 0.0);
  auto out_index = [so](int64_t n, int64_t c, int64_t h, int64_t w) {
    return static_cast<size_t>(
        ((std::min(n, so.n - 1) * so.c + std::min(c, so.c - 1)) * so.h + std::min(h, so.h - 1)) * so.w +
        std::min(w, so.w - 1));
  };
  const T* px = x.data().data();
  for (int64_t n = 0; n < s.n; ++n)
    for (int64_t c = 0; c < s.c; ++c)
      for (int64_t h = 0; h < s.h; ++h)
        for (int64_t w = 0; w < s.w; ++w) acc[out_index(n, c, h, w)] += *px++;
  auto out = Tensor<T>::zeros(so);
  for (size_t i = 0; i < acc.size(); ++i) out.data()[i] = static_cast<T>(acc[i] / denom);
  auto ix = x.impl();
  auto io = out.impl();
  detail::record<T>({&x}, out, [ix, io, s, out_index, denom]() {
    ix->ensure_grad();
    T* g = ix->grad.data();
    const T inv = static_cast<T>(1.0 / denom);
    for (int64_t n = 0; n < s.n; ++n)
      for (int64_t c = 0; c < s.c; ++c)
        for (int64_t h = 0; h < s.h; ++h)
          for (int64_t w = 0; w < s.w; ++w) *g++ += io->grad[out_index(n, c, h, w)] * inv;
  });
  return out;
}

template <typename T>
Tensor<T> sum(const Tensor<T>& x) {
  return scale(mean(x), static_cast<T>(x.numel()));
}

namespace {

// Source window [begin, end) for output cell i of an adaptive pool.
struct Bin {
  int64_t begin;
  int64_t end;
};

std::vector<Bin> pool_bins(int64_t in, int64_t factor) {
  std::vector<Bin> bins(static_cast<size_t>((in + factor - 1) / factor));
  for (size_t i = 0; i < bins.size(); ++i) {
    const auto begin = static_cast<int64_t>(i) * factor;
    bins[i] = {begin, std::min(begin + factor, in)};
  }
  return bins;
}

struct Lerp {
  int64_t i0;
  int64_t i1;
  double t;
};

std::vector<Lerp> lerp_table(int64_t in, int64_t out) {
  std::vector<Lerp> tab(static_cast<size_t>(out));
  const double sc = static_cast<double>(in) / static_cast<double>(out);
  for (int64_t o = 0; o < out; ++o) {
    double src = (static_cast<double>(o) + 0.5) * sc - 0.5;
    if (src < 0) src = 0;
    int64_t i0 = static_cast<int64_t>(std::floor(src));
    if (i0 > in - 1) i0 = in - 1;
    const int64_t i1 = std::min(i0 + 1, in - 1);
    tab[static_cast<size_t>(o)] = {i0, i1, src - static_cast<double>(i0)};
  }
  return tab;
}

}  // namespace

template <typename T>
Tensor<T> avg_pool(const Tensor<T>& x, int64_t factor) {
  if (factor < 1) throw DimensionError("avg_pool: factor must be >= 1");
  const Shape& s = x.shape();
  const Shape so{s.n, s.c, (s.h + factor - 1) / factor, (s.w + factor - 1) / factor};
  const auto rows = pool_bins(s.h, factor);
  const auto cols = pool_bins(s.w, factor);
  auto out = Tensor<T>::zeros(so);
  const int64_t planes = s.n * s.c;
  for (int64_t p = 0; p < planes; ++p) {
    const T* src = x.data().data() + p * s.plane();
    T* dst = out.data().data() + p * so.plane();
    for (int64_t oy = 0; oy < so.h; ++oy) {
      const Bin r = rows[static_cast<size_t>(oy)];
      for (int64_t ox = 0; ox < so.w; ++ox) {
        const Bin c = cols[static_cast<size_t>(ox)];
        T acc = 0;
        for (int64_t y = r.begin; y < r.end; ++y)
          for (int64_t xx = c.begin; xx < c.end; ++xx) acc += src[y * s.w + xx];
        dst[oy * so.w + ox] = acc / static_cast<T>((r.end - r.begin) * (c.end - c.begin));
      }
    }
  }
  auto ix = x.impl();
  auto io = out.impl();
  detail::record<T>({&x}, out, [ix, io, s, so, rows, cols, planes]() {
    ix->ensure_grad();
    for (int64_t p = 0; p < planes; ++p) {
      T* dst = ix->grad.data() + p * s.plane();
      const T* g = io->grad.data() + p * so.plane();
      for (int64_t oy = 0; oy < so.h; ++oy) {
        const Bin r = rows[static_cast<size_t>(oy)];
        for (int64_t ox = 0; ox < so.w; ++ox) {
          const Bin c = cols[static_cast<size_t>(ox)];
          const T v = g[oy * so.w + ox] / static_cast<T>((r.end - r.begin) * (c.end - c.begin));
          for (int64_t y = r.begin; y < r.end; ++y)
            for (int64_t xx = c.begin; xx < c.end; ++xx) dst[y * s.w + xx] += v;
        }
      }
    }
  });
  return out;
}

template <typename T>
Tensor<T> bilinear_resize(const Tensor<T>& x, int64_t out_h, int64_t out_w) {
  if (out_h < 1 || out_w < 1) throw DimensionError("bilinear_resize: output extent must be positive");
  const Shape& s = x.shape();
  const Shape so{s.n, s.c, out_h, out_w};
  const auto ry = lerp_table(s.h, out_h);
  const auto rx = lerp_table(s.w, out_w);
  auto out = Tensor<T>::zeros(so);
  const int64_t planes = s.n * s.c;
  for (int64_t p = 0; p < planes; ++p) {
    const T* src = x.data().data() + p * s.plane();
    T* dst = out.data().data() + p * so.plane();
    for (int64_t oy = 0; oy < out_h; ++oy) {
      const Lerp ly = ry[static_cast<size_t>(oy)];
      const T ty = static_cast<T>(ly.t);
      for (int64_t ox = 0; ox < out_w; ++ox) {
        const Lerp lx = rx[static_cast<size_t>(ox)];
        const T tx = static_cast<T>(lx.t);
        const T top = src[ly.i0 * s.w + lx.i0] * (T(1) - tx) + src[ly.i0 * s.w + lx.i1] * tx;
        const T bot = src[ly.i1 * s.w + lx.i0] * (T(1) - tx) + src[ly.i1 * s.w + lx.i1] * tx;
        dst[oy * out_w + ox] = top * (T(1) - ty) + bot * ty;
      }
    }
  }
  auto ix = x.impl();
  auto io = out.impl();
  detail::record<T>({&x}, out, [ix, io, s, so, ry, rx, planes]() {
    ix->ensure_grad();
    for (int64_t p = 0; p < planes; ++p) {
      T* dst = ix->grad.data() + p * s.plane();
      const T* g = io->grad.data() + p * so.plane();
      for (int64_t oy = 0; oy < so.h; ++oy) {
        const Lerp ly = ry[static_cast<size_t>(oy)];
        const T ty = static_cast<T>(ly.t);
        for (int64_t ox = 0; ox < so.w; ++ox) {
          const Lerp lx = rx[static_cast<size_t>(ox)];
          const T tx = static_cast<T>(lx.t);
          const T v = g[oy * so.w + ox];
          dst[ly.i0 * s.w + lx.i0] += v * (T(1) - ty) * (T(1) - tx);
          dst[ly.i0 * s.w + lx.i1] += v * (T(1) - ty) * tx;
          dst[ly.i1 * s.w + lx.i0] += v * ty * (T(1) - tx);
          dst[ly.i1 * s.w + lx.i1] += v * ty * tx;
        }
      }
    }
  });
  return out;
}

template <typename T>
Tensor<T> pad_reflect(const Tensor<T>& x, Padding pad) {
  const Shape& s = x.shape();
  auto bad = [](int64_t p, int64_t extent) { return p < 0 || (p >= extent && extent > 1); };
  if (bad(pad.top, s.h) || bad(pad.bottom, s.h) || bad(pad.left, s.w) || bad(pad.right, s.w)) {
    throw DimensionError("pad_reflect: padding must be smaller than the padded axis of " + s.str());
  }
  if (pad.top == 0 && pad.bottom == 0 && pad.left == 0 && pad.right == 0) return x;
  const Shape so{s.n, s.c, s.h + pad.top + pad.bottom, s.w + pad.left + pad.right};
  auto reflect = [](int64_t i, int64_t extent) {
    if (extent == 1) return int64_t{0};
    if (i < 0) return -i;
    if (i >= extent) return 2 * (extent - 1) - i;
    return i;
  };
  std::vector<int64_t> rmap(static_cast<size_t>(so.h));
  std::vector<int64_t> cmap(static_cast<size_t>(so.w));
  for (int64_t i = 0; i < so.h; ++i) rmap[static_cast<size_t>(i)] = reflect(i - pad.top, s.h);
  for (int64_t i = 0; i < so.w; ++i) cmap[static_cast<size_t>(i)] = reflect(i - pad.left, s.w);
  auto out = Tensor<T>::zeros(so);
  const int64_t planes = s.n * s.c;
  for (int64_t p = 0; p < planes; ++p) {
    const T* src = x.data().data() + p * s.plane();
    T* dst = out.data().data() + p * so.plane();
    for (int64_t y = 0; y < so.h; ++y)
      for (int64_t xx = 0; xx < so.w; ++xx)
        dst[y * so.w + xx] = src[rmap[static_cast<size_t>(y)] * s.w + cmap[static_cast<size_t>(xx)]];
  }
  auto ix = x.impl();
  auto io = out.impl();
  detail::record<T>({&x}, out, [ix, io, s, so, rmap, cmap, planes]() {
    ix->ensure_grad();
    for (int64_t p = 0; p < planes; ++p) {
      T* dst = ix->grad.data() + p * s.plane();
      const T* g = io->grad.data() + p * so.plane();
      for (int64_t y = 0; y < so.h; ++y)
        for (int64_t xx = 0; xx < so.w; ++xx)
          dst[rmap[static_cast<size_t>(y)] * s.w + cmap[static_cast<size_t>(xx)]] += g[y * so.w + xx];
    }
  });
  return out;
}

template <typename T>
Tensor<T> crop(const Tensor<T>& x, int64_t top, int64_t left, int64_t h, int64_t w) {
  const Shape& s = x.shape();
  if (top < 0 || left < 0 || h < 1 || w < 1 || top + h > s.h || left + w > s.w) {
    throw DimensionError("crop: window (" + std::to_string(top) + ", " + std::to_string(left) + ", " +
                         std::to_string(h) + ", " + std::to_string(w) + ") outside " + s.str());
  }
  if (top == 0 && left == 0 && h == s.h && w == s.w) return x;
  const Shape so{s.n, s.c, h, w};
  auto out = Tensor<T>::zeros(so);
  const int64_t planes = s.n * s.c;
  for (int64_t p = 0; p < planes; ++p) {
    const T* src = x.data().data() + p * s.plane();
    T* dst = out.data().data() + p * so.plane();
    for (int64_t y = 0; y < h; ++y) std::copy_n(src + (top + y) * s.w + left, w, dst + y * w);
  }
  auto ix = x.impl();
  auto io = out.impl();
  detail::record<T>({&x}, out, [ix, io, s, so, top, left, planes]() {
    ix->ensure_grad();
    for (int64_t p = 0; p < planes; ++p) {
      T* dst = ix->grad.data() + p * s.plane();
      const T* g = io->grad.data() + p * so.plane();
      for (int64_t y = 0; y < so.h; ++y)
        for (int64_t xx = 0; xx < so.w; ++xx) dst[(top + y) * s.w + left + xx] += g[y * so.w + xx];
    }
  });
  return out;
}

#define SWFORMER_INSTANTIATE_OPS(T)                                                                  \
  template Tensor<T> add(const Tensor<T>&, const Tensor<T>&);                                        \
  template Tensor<T> sub(const Tensor<T>&, const Tensor<T>&);                                        \
  template Tensor<T> mul(const Tensor<T>&, const Tensor<T>&);                                        \
  template Tensor<T> scale(const Tensor<T>&, T);                                                     \
  template Tensor<T> add_scalar(const Tensor<T>&, T);                                                \
  template Tensor<T> abs(const Tensor<T>&);                                                          \
  template Tensor<T> gelu(const Tensor<T>&);                                                         \
  template Tensor<T> sigmoid(const Tensor<T>&);                                                      \
  template Tensor<T> conv2d(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, ConvOptions);      \
  template Tensor<T> conv2d_transpose(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&,          \
                                      ConvOptions);                                                  \
  template Tensor<T> batchnorm2d(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&,               \
                                 BatchNormStats<T>&, bool, T, T);                                    \
  template Tensor<T> layer_norm_channels(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, T);   \
  template Tensor<T> concat(const std::vector<Tensor<T>>&);                                          \
  template std::vector<Tensor<T>> split(const Tensor<T>&, const std::vector<int64_t>&);              \
  template Tensor<T> reduce_mean(const Tensor<T>&, unsigned);                                        \
  template Tensor<T> sum(const Tensor<T>&);                                                          \
  template Tensor<T> avg_pool(const Tensor<T>&, int64_t);                                            \
  template Tensor<T> bilinear_resize(const Tensor<T>&, int64_t, int64_t);                            \
  template Tensor<T> pad_reflect(const Tensor<T>&, Padding);                                \
  template Tensor<T> crop(const Tensor<T>&, int64_t, int64_t, int64_t, int64_t);

SWFORMER_INSTANTIATE_OPS(float)
SWFORMER_INSTANTIATE_OPS(double)

#undef SWFORMER_INSTANTIATE_OPS

}  // namespace swformer
