#pragma once

#include <array>
#include <set>
#include <string>
#include <vector>

#include "swformer/tensor.hpp"
#include "swformer/transforms.hpp"

namespace swformer {

// Residual analysis of one (clean, degraded) pair in luma.
struct SpectralReport {
  Tensor<float> residual;                   // (1, 1, H, W): degraded - clean
  Tensor<float> spectrum;                   // log(1 + |F(residual)|), DC centred
  std::array<Tensor<float>, 4> band_spectra;  // same, per Haar sub-band of the residual
  std::array<double, 4> band_energy{};      // sum of squares per band
  std::array<double, 4> energy_fractions{};  // sums to 1; uniform 1/4 for a zero residual
  double residual_energy = 0;

  [[nodiscard]] std::string energy_json(const std::string& id) const;
};

// Moves the zero-frequency bin of every plane to (h/2, w/2).
Tensor<float> fftshift(const Tensor<float>& x);
Tensor<float> log_magnitude(const Tensor<float>& x);

// Both images are (1, 3, H, W) RGB or (1, 1, H, W) gray.
SpectralReport analyze_pair(const Tensor<float>& clean, const Tensor<float>& degraded);

struct SwapResult {
  Tensor<float> a;
  Tensor<float> b;
  std::vector<std::string> warnings;
};

// Exchanges the named fixed-Haar sub-bands between a and b and inverts both.
SwapResult swap_subbands(const Tensor<float>& a, const Tensor<float>& b, const std::set<Band>& bands);

// Writes <dir>/<id>_residual.png, _spectrum.png, _<band>.png panels and
// <dir>/<id>_energy.json.
void write_report(const std::string& dir, const std::string& id, const SpectralReport& report);

}  // namespace swformer
