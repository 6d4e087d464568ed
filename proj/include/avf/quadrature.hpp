#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <string>
#include <vector>

#include "avf/error.hpp"

namespace avf::quad {

struct Options {
  double abs_tol = 1e-13;
  double rel_tol = 1e-10;
  int max_intervals = 4000;
};

struct Result {
  double value = 0.0;
  double error = 0.0;
  long evaluations = 0;
  bool converged = false;
};

namespace detail {

// Gauss-Kronrod 7/15 nodes on [-1, 1] (positive half) and weights.
inline constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                   0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                   0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                   0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                   0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                   0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                   0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                  0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk15(F& f, double a, double b, long& evals) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double pair = f(c - dx) + f(c + dx);
    kronrod += kWgk[j] * pair;
    if (j % 2 == 1) gauss += kWg[j / 2] * pair;
  }
  evals += 15;
  return {a, b, kronrod * h, std::abs((kronrod - gauss) * h)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod 7/15 on a finite interval: the panel with
/// the largest error estimate is bisected until the summed estimate meets
/// max(abs_tol, rel_tol * |value|).
template <class F>
Result integrate(F&& f, double a, double b, const Options& opt = {}) {
  Result r;
  if (a == b) {
    r.converged = true;
    return r;
  }
  std::priority_queue<detail::Panel> heap;
  heap.push(detail::gk15(f, a, b, r.evaluations));
  double value = heap.top().value;
  double error = heap.top().error;
  int intervals = 1;
  while (error > std::max(opt.abs_tol, opt.rel_tol * std::abs(value)) && intervals < opt.max_intervals) {
    const detail::Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      heap.push(worst);
      break;
    }
    const detail::Panel left = detail::gk15(f, worst.a, mid, r.evaluations);
    const detail::Panel right = detail::gk15(f, mid, worst.b, r.evaluations);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++intervals;
  }
  // Resum to shed accumulated cancellation in the running totals.
  value = 0.0;
  error = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  r.value = value;
  r.error = error;
  r.converged = error <= std::max(opt.abs_tol, opt.rel_tol * std::abs(value));
  return r;
}

/// Integral over (a, b) where either end may be infinite. Infinite ends are
/// mapped to a finite angle range with x = x0 +- scale * tan(theta), which
/// turns algebraic tails into bounded integrands.
template <class F>
Result integrate_improper(F&& f, double a, double b, double scale, const Options& opt = {}) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  constexpr double half_pi = std::numbers::pi / 2;
  if (std::isfinite(a) && std::isfinite(b)) return integrate(f, a, b, opt);
  if (a == -inf && b == inf) {
    auto g = [&](double t) {
      const double c = std::cos(t);
      return f(scale * std::tan(t)) * scale / (c * c);
    };
    return integrate(g, -half_pi, half_pi, opt);
  }
  if (b == inf) {
    auto g = [&](double t) {
      const double c = std::cos(t);
      return f(a + scale * std::tan(t)) * scale / (c * c);
    };
    return integrate(g, 0.0, half_pi, opt);
  }
  auto g = [&](double t) {
    const double c = std::cos(t);
    return f(b - scale * std::tan(t)) * scale / (c * c);
  };
  return integrate(g, 0.0, half_pi, opt);
}

/// Value of a converged integral; throws NumericalError otherwise.
inline double require(const Result& r, const char* what) {
  if (!r.converged || !std::isfinite(r.value)) {
    throw NumericalError(std::string("quadrature did not converge: ") + what + " (error estimate " +
                         std::to_string(r.error) + ")");
  }
  return r.value;
}

}  // namespace avf::quad
