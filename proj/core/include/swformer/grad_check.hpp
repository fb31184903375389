#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "swformer/module.hpp"

namespace swformer {

struct GradCheckOptions {
  double step = 1e-4;
  // Entries checked per parameter; -1 checks all of them, otherwise a
  // deterministic sample drawn with `seed`.
  std::int64_t max_entries = -1;
  std::uint64_t seed = 0;
};

struct GradCheckEntry {
  std::string name;
  std::int64_t checked = 0;
  double max_abs_error = 0;
  // max |analytic - numeric| / max(max |analytic|, max |numeric|, 1e-12)
  double rel_error = 0;
  bool passed = false;
  std::string message;  // set for non-finite values
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double tol = 0;
  bool passed = false;

  [[nodiscard]] double worst() const;
  [[nodiscard]] std::string summary() const;
};

// Compares tape gradients of the scalar f() against central differences.
// A parameter passes when its relative error is strictly below `tol`.
GradCheckReport grad_check(const std::function<Tensor<double>()>& f, const std::vector<NamedTensor<double>>& params,
                           double tol, const GradCheckOptions& opt = {});

}  // namespace swformer
