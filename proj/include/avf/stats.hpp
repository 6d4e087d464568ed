#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "avf/graph.hpp"
#include "avf/random.hpp"

namespace avf {

struct SizeRecord {
  std::int64_t realization = 0;
  std::int32_t boundary_edge = 0;
  std::int64_t size = 0;
  bool operator==(const SizeRecord&) const = default;
};

/// Avalanche sizes of an ensemble together with what produced them.
///
/// Full-partition processes (bt, permutation) contribute one record per
/// boundary half-edge per realization; the single-site process contributes
/// one record per realization.
struct SizeSample {
  std::vector<SizeRecord> records;
  Geometry geometry = Geometry::custom;
  int lx = 0;
  int ly = 0;
  std::int64_t sites = 0;
  std::int64_t boundary = 0;
  std::int64_t realizations = 0;
  std::uint64_t seed = 0;
  std::string process;

  std::vector<std::int64_t> sizes() const;
  /// Sizes grouped by realization, in record order.
  std::vector<std::vector<std::int64_t>> by_realization() const;
};

struct TailWindow {
  std::int64_t n_min = 30;
  std::int64_t n_max = 0;
};

/// nMin = 30, nMax = Lx^2 / 4.
TailWindow default_window(const SizeSample& s);

struct TailFit {
  double gamma_hat = 0.0;
  double std_error = 0.0;
  TailWindow window;
  std::int64_t used = 0;
  std::string method = "discrete-truncated-mle";
  /// Least-squares slope of log(size) against log(rank), sizes in the window
  /// sorted in decreasing order. A law n^-gamma gives -1 / (gamma - 1).
  double rank_slope = 0.0;
  double rank_gamma = 0.0;
};

inline constexpr std::int64_t kMinTailSizes = 100;

/// Maximum likelihood for p(n) proportional to n^-gamma on the integers of
/// the window. The stationarity condition E_gamma[ln n] = mean(ln n) is
/// solved by bisection; stderr is the inverse Fisher information
/// 1 / sqrt(N Var_gamma(ln n)). Throws InsufficientData below 100 sizes in
/// the window.
TailFit fit_tail_exponent(const std::vector<std::int64_t>& sizes, TailWindow window);
/// Same, after dropping giants (size > V/2).
TailFit fit_tail_exponent(const SizeSample& s, TailWindow window);

/// Draws from p(n) proportional to n^-gamma on [n_min, n_max] by inverting
/// the exact discrete CDF.
std::vector<std::int64_t> sample_truncated_power_law(double gamma, std::int64_t n_min, std::int64_t n_max,
                                                     std::int64_t count, RandomSource& rng);

/// Fraction of records with size > threshold * V.
double giant_fraction(const SizeSample& s, double threshold = 0.5);
/// Number of records with size > threshold * V in each realization.
std::vector<std::int64_t> giants_per_realization(const SizeSample& s, double threshold = 0.5);

struct RankProfile {
  std::vector<double> mean;      // mean[k-1] = mean k-th largest non-giant size
  std::vector<double> rescaled;  // mean_k k^2 / mean_1
};

/// Mean of the k-th largest non-giant size per realization, k = 1..k_max,
/// missing entries counted as 0. Throws std::invalid_argument when
/// k_max >= B.
RankProfile kth_largest_profile(const SizeSample& s, int k_max);

struct MeanSizeReport {
  std::vector<double> edge_mean;  // per boundary half-edge
  std::vector<double> edge_stderr;
  std::vector<std::int64_t> edge_count;
  double pooled_mean = 0.0;
  double pooled_stderr = 0.0;
  double expected = 0.0;  // V / B
  double pooled_z = 0.0;
  double max_edge_z = 0.0;
  /// Full-partition samples: every realization sums to V. Always true for
  /// single-site samples, where it is not checkable.
  bool partition_exact = true;
  bool pass = false;  // |pooled_z| <= 3 and partition_exact
};

MeanSizeReport mean_size_check(const SizeSample& s);

}  // namespace avf
