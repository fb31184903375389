#include "swformer/fft.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <vector>

namespace swformer::fft {

namespace {

struct Plan {
  std::vector<std::complex<double>> twiddle;  // exp(-2*pi*i*k/N), k < N
  std::vector<std::size_t> bitrev;            // radix-2 only
  bool pow2 = false;
};

const Plan& plan_for(std::size_t n) {
  thread_local std::map<std::size_t, Plan> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  Plan p;
  p.twiddle.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double a = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    p.twiddle[k] = {std::cos(a), std::sin(a)};
  }
  p.pow2 = (n & (n - 1)) == 0;
  if (p.pow2) {
    p.bitrev.resize(n);
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < n) ++bits;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t r = 0;
      for (std::size_t b = 0; b < bits; ++b) r |= ((i >> b) & 1u) << (bits - 1 - b);
      p.bitrev[i] = r;
    }
  }
  return cache.emplace(n, std::move(p)).first->second;
}

}  // namespace

void dft(std::span<std::complex<double>> data, bool inverse) {
  const std::size_t n = data.size();
  if (n <= 1) return;
  const Plan& p = plan_for(n);
  auto tw = [&](std::size_t k) { return inverse ? std::conj(p.twiddle[k]) : p.twiddle[k]; };
  if (p.pow2) {
    for (std::size_t i = 0; i < n; ++i) {
      if (i < p.bitrev[i]) std::swap(data[i], data[p.bitrev[i]]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
      const std::size_t half = len / 2;
      const std::size_t step = n / len;
      for (std::size_t start = 0; start < n; start += len) {
        for (std::size_t j = 0; j < half; ++j) {
          const auto u = data[start + j];
          const auto v = data[start + j + half] * tw(j * step);
          data[start + j] = u + v;
          data[start + j + half] = u - v;
        }
      }
    }
    return;
  }
  thread_local std::vector<std::complex<double>> scratch;
  scratch.assign(data.begin(), data.end());
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc = 0;
    std::size_t idx = 0;
    for (std::size_t t = 0; t < n; ++t) {
      acc += scratch[t] * tw(idx);
      idx += k;
      if (idx >= n) idx -= n;
    }
    data[k] = acc;
  }
}

void dft2_orthonormal(std::span<std::complex<double>> plane, std::int64_t h, std::int64_t w,
                      bool inverse) {
  const auto hh = static_cast<std::size_t>(h);
  const auto ww = static_cast<std::size_t>(w);
  for (std::size_t y = 0; y < hh; ++y) dft(plane.subspan(y * ww, ww), inverse);
  thread_local std::vector<std::complex<double>> column;
  column.resize(hh);
  for (std::size_t x = 0; x < ww; ++x) {
    for (std::size_t y = 0; y < hh; ++y) column[y] = plane[y * ww + x];
    dft(column, inverse);
    for (std::size_t y = 0; y < hh; ++y) plane[y * ww + x] = column[y];
  }
  const double s = 1.0 / std::sqrt(static_cast<double>(h * w));
  for (auto& v : plane) v *= s;
}

}  // namespace swformer::fft
