#include "swformer/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "swformer/rng.hpp"

namespace swformer {

namespace {

std::uint64_t name_hash(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : s) h = (h ^ ch) * 0x100000001b3ull;
  return h;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double GradCheckReport::worst() const {
  double w = 0;
  for (const auto& e : entries) w = std::max(w, std::isfinite(e.rel_error) ? e.rel_error : kInf);
  return w;
}

std::string GradCheckReport::summary() const {
  std::ostringstream os;
  for (const auto& e : entries) {
    os << (e.passed ? "ok   " : "FAIL ") << e.name << " rel=" << e.rel_error << " abs=" << e.max_abs_error
       << " n=" << e.checked;
    if (!e.message.empty()) os << " (" << e.message << ")";
    os << "\n";
  }
  return os.str();
}

GradCheckReport grad_check(const std::function<Tensor<double>()>& f, const std::vector<NamedTensor<double>>& params,
                           double tol, const GradCheckOptions& opt) {
  GradCheckReport report;
  report.tol = tol;
  active_tape<double>().clear();
  for (auto p : params) {
    p.tensor.zero_grad();
    p.tensor.set_requires_grad(true);
  }
  const auto loss = f();
  if (loss.numel() != 1) throw UsageError("grad_check: f must return a scalar, got " + loss.shape().str());
  const bool loss_finite = std::isfinite(loss.item());
  if (loss_finite) backward(loss);
  active_tape<double>().clear();

  auto eval = [&] {
    NoGradGuard guard;
    return f().item();
  };

  report.passed = true;
  for (auto p : params) {
    GradCheckEntry e;
    e.name = p.name;
    if (!loss_finite) {
      e.message = "non-finite output";
      e.rel_error = kInf;
      report.entries.push_back(e);
      report.passed = false;
      continue;
    }
    const auto n = static_cast<std::size_t>(p.tensor.numel());
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    if (opt.max_entries >= 0 && static_cast<std::size_t>(opt.max_entries) < n) {
      Rng rng = Rng::derive(opt.seed, name_hash(p.name));
      for (std::size_t i = 0; i < static_cast<std::size_t>(opt.max_entries); ++i) {
        std::swap(idx[i], idx[i + rng.below(n - i)]);
      }
      idx.resize(static_cast<std::size_t>(opt.max_entries));
    }
    const auto grad = p.tensor.grad();
    auto data = p.tensor.data();
    double max_a = 0;
    double max_n = 0;
    double max_err = 0;
    bool finite = true;
    for (std::size_t i : idx) {
      const double orig = data[i];
      data[i] = orig + opt.step;
      const double fp = eval();
      data[i] = orig - opt.step;
      const double fm = eval();
      data[i] = orig;
      const double num = (fp - fm) / (2 * opt.step);
      const double ana = grad.empty() ? 0.0 : grad[i];
      if (!std::isfinite(num) || !std::isfinite(ana)) finite = false;
      max_a = std::max(max_a, std::abs(ana));
      max_n = std::max(max_n, std::abs(num));
      max_err = std::max(max_err, std::abs(ana - num));
    }
    e.checked = static_cast<std::int64_t>(idx.size());
    e.max_abs_error = max_err;
    if (!finite) {
      e.message = "non-finite gradient in " + p.name;
      e.rel_error = kInf;
    } else {
      e.rel_error = max_err / std::max({max_a, max_n, 1e-12});
    }
    e.passed = finite && e.rel_error < tol;
    report.passed = report.passed && e.passed;
    report.entries.push_back(e);
  }
  return report;
}

}  // namespace swformer
