#include "avf/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "avf/error.hpp"

namespace avf {

std::vector<std::int64_t> SizeSample::sizes() const {
  std::vector<std::int64_t> out;
  out.reserve(records.size());
  for (const SizeRecord& r : records) out.push_back(r.size);
  return out;
}

std::vector<std::vector<std::int64_t>> SizeSample::by_realization() const {
  std::map<std::int64_t, std::vector<std::int64_t>> groups;
  for (const SizeRecord& r : records) groups[r.realization].push_back(r.size);
  std::vector<std::vector<std::int64_t>> out;
  out.reserve(groups.size());
  for (auto& [_, v] : groups) out.push_back(std::move(v));
  return out;
}

TailWindow default_window(const SizeSample& s) {
  return {30, static_cast<std::int64_t>(s.lx) * s.lx / 4};
}

namespace {

struct LogMoments {
  double mean = 0.0;
  double var = 0.0;
};

// Mean and variance of ln n under p(n) ~ n^-gamma on [a, b].
LogMoments log_moments(double gamma, std::int64_t a, std::int64_t b) {
  // Weights relative to the largest one keep the sums finite for any sign of
  // gamma.
  const double ref = gamma >= 0 ? std::log(static_cast<double>(a)) : std::log(static_cast<double>(b));
  double z = 0.0, m1 = 0.0, m2 = 0.0;
  for (std::int64_t n = a; n <= b; ++n) {
    const double l = std::log(static_cast<double>(n));
    const double w = std::exp(-gamma * (l - ref));
    z += w;
    m1 += w * l;
    m2 += w * l * l;
  }
  const double mean = m1 / z;
  return {mean, std::max(0.0, m2 / z - mean * mean)};
}

}  // namespace

TailFit fit_tail_exponent(const std::vector<std::int64_t>& sizes, TailWindow window) {
  if (window.n_min < 1 || window.n_max <= window.n_min) {
    throw std::invalid_argument("tail window needs 1 <= nMin < nMax");
  }
  std::vector<std::int64_t> in;
  for (std::int64_t n : sizes) {
    if (n >= window.n_min && n <= window.n_max) in.push_back(n);
  }
  if (static_cast<std::int64_t>(in.size()) < kMinTailSizes) {
    throw InsufficientData("only " + std::to_string(in.size()) + " sizes in [" + std::to_string(window.n_min) + ", " +
                           std::to_string(window.n_max) + "], need " + std::to_string(kMinTailSizes));
  }
  double target = 0.0;
  for (std::int64_t n : in) target += std::log(static_cast<double>(n));
  target /= static_cast<double>(in.size());

  // E_gamma[ln n] decreases strictly in gamma.
  double lo = -10.0, hi = 20.0;
  if (log_moments(lo, window.n_min, window.n_max).mean < target ||
      log_moments(hi, window.n_min, window.n_max).mean > target) {
    throw NumericalError("tail exponent outside the bracket [-10, 20]");
  }
  for (int it = 0; it < 100 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (log_moments(mid, window.n_min, window.n_max).mean > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  TailFit fit;
  fit.window = window;
  fit.used = static_cast<std::int64_t>(in.size());
  fit.gamma_hat = 0.5 * (lo + hi);
  const LogMoments at = log_moments(fit.gamma_hat, window.n_min, window.n_max);
  fit.std_error = 1.0 / std::sqrt(static_cast<double>(in.size()) * at.var);

  std::sort(in.begin(), in.end(), std::greater<>());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const auto n = static_cast<double>(in.size());
  for (std::size_t k = 0; k < in.size(); ++k) {
    const double x = std::log(static_cast<double>(k + 1));
    const double y = std::log(static_cast<double>(in[k]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  fit.rank_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.rank_gamma = 1.0 - 1.0 / fit.rank_slope;
  return fit;
}

TailFit fit_tail_exponent(const SizeSample& s, TailWindow window) {
  std::vector<std::int64_t> kept;
  for (const SizeRecord& r : s.records) {
    if (2 * r.size <= s.sites) kept.push_back(r.size);
  }
  return fit_tail_exponent(kept, window);
}

std::vector<std::int64_t> sample_truncated_power_law(double gamma, std::int64_t n_min, std::int64_t n_max,
                                                     std::int64_t count, RandomSource& rng) {
  if (n_min < 1 || n_max < n_min || count < 0) throw std::invalid_argument("bad power-law parameters");
  std::vector<double> cdf;
  cdf.reserve(static_cast<std::size_t>(n_max - n_min + 1));
  double acc = 0.0;
  for (std::int64_t n = n_min; n <= n_max; ++n) {
    acc += std::pow(static_cast<double>(n), -gamma);
    cdf.push_back(acc);
  }
  std::vector<std::int64_t> out;
  out.reserve(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) {
    const double u = rng.uniform() * acc;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const auto idx = std::min<std::ptrdiff_t>(it - cdf.begin(), static_cast<std::ptrdiff_t>(cdf.size()) - 1);
    out.push_back(n_min + idx);
  }
  return out;
}

double giant_fraction(const SizeSample& s, double threshold) {
  if (s.records.empty()) return 0.0;
  std::int64_t giants = 0;
  for (const SizeRecord& r : s.records) {
    if (static_cast<double>(r.size) > threshold * static_cast<double>(s.sites)) ++giants;
  }
  return static_cast<double>(giants) / static_cast<double>(s.records.size());
}

std::vector<std::int64_t> giants_per_realization(const SizeSample& s, double threshold) {
  std::vector<std::int64_t> out;
  for (const auto& sizes : s.by_realization()) {
    std::int64_t g = 0;
    for (std::int64_t n : sizes) {
      if (static_cast<double>(n) > threshold * static_cast<double>(s.sites)) ++g;
    }
    out.push_back(g);
  }
  return out;
}

RankProfile kth_largest_profile(const SizeSample& s, int k_max) {
  if (k_max < 1 || k_max >= s.boundary) throw std::invalid_argument("kMax must satisfy 1 <= kMax < B");
  const auto groups = s.by_realization();
  if (groups.empty()) throw InsufficientData("no realizations");
  RankProfile p;
  p.mean.assign(static_cast<std::size_t>(k_max), 0.0);
  for (auto sizes : groups) {
    std::erase_if(sizes, [&](std::int64_t n) { return 2 * n > s.sites; });
    std::sort(sizes.begin(), sizes.end(), std::greater<>());
    for (int k = 0; k < k_max && k < static_cast<int>(sizes.size()); ++k) {
      p.mean[k] += static_cast<double>(sizes[k]);
    }
  }
  for (double& m : p.mean) m /= static_cast<double>(groups.size());
  p.rescaled.resize(p.mean.size());
  for (int k = 0; k < k_max; ++k) {
    p.rescaled[k] = p.mean[0] > 0 ? p.mean[k] * (k + 1) * (k + 1) / p.mean[0] : 0.0;
  }
  return p;
}

MeanSizeReport mean_size_check(const SizeSample& s) {
  if (s.boundary <= 0 || s.records.empty()) throw InsufficientData("empty size sample");
  MeanSizeReport r;
  const auto b = static_cast<std::size_t>(s.boundary);
  std::vector<double> sum(b, 0.0), sum2(b, 0.0);
  r.edge_count.assign(b, 0);
  double total = 0.0, total2 = 0.0;
  for (const SizeRecord& rec : s.records) {
    const auto x = static_cast<double>(rec.size);
    sum[rec.boundary_edge] += x;
    sum2[rec.boundary_edge] += x * x;
    ++r.edge_count[rec.boundary_edge];
    total += x;
    total2 += x * x;
  }
  const auto stderr_of = [](double s1, double s2, double n) {
    if (n < 2) return 0.0;
    const double mean = s1 / n;
    return std::sqrt(std::max(0.0, (s2 - n * mean * mean) / (n - 1)) / n);
  };
  r.expected = static_cast<double>(s.sites) / static_cast<double>(s.boundary);
  r.edge_mean.resize(b);
  r.edge_stderr.resize(b);
  for (std::size_t e = 0; e < b; ++e) {
    const auto n = static_cast<double>(r.edge_count[e]);
    r.edge_mean[e] = n > 0 ? sum[e] / n : 0.0;
    r.edge_stderr[e] = stderr_of(sum[e], sum2[e], n);
    if (r.edge_stderr[e] > 0) {
      r.max_edge_z = std::max(r.max_edge_z, std::abs(r.edge_mean[e] - r.expected) / r.edge_stderr[e]);
    }
  }
  const auto n = static_cast<double>(s.records.size());
  r.pooled_mean = total / n;
  r.pooled_stderr = stderr_of(total, total2, n);
  r.pooled_z = r.pooled_stderr > 0 ? (r.pooled_mean - r.expected) / r.pooled_stderr : 0.0;
  if (s.process != "single-site") {
    for (const auto& sizes : s.by_realization()) {
      std::int64_t acc = 0;
      for (std::int64_t x : sizes) acc += x;
      if (acc != s.sites) r.partition_exact = false;
    }
  }
  r.pass = r.partition_exact && std::abs(r.pooled_z) <= 3.0;
  return r;
}

}  // namespace avf
