#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "ends_lab/params.hpp"

namespace ends_lab::quad {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline Rule make_gauss_legendre(int order) {
  Rule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  for (int i = 0; i < (order + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Re-evaluate the derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= order; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = order * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[order - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  return rule;
}

template <int Order>
const Rule& gauss_legendre() {
  static const Rule rule = make_gauss_legendre(Order);
  return rule;
}

/// Fixed-order Gauss-Legendre on [a, b].
template <int Order, class F>
double fixed(F&& f, double a, double b) {
  const Rule& rule = gauss_legendre<Order>();
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  double sum = 0.0;
  for (int i = 0; i < Order; ++i) sum += rule.weights[i] * f(std::clamp(mid + half * rule.nodes[i], a, b));
  return sum * half;
}

struct Options {
  double rel_tol = 1e-8;
  double abs_tol = 0.0;
  int max_depth = 40;
  std::size_t max_intervals = 400000;
};

namespace detail {

template <std::size_t K>
using Vec = std::array<double, K>;

template <std::size_t K, class F>
Vec<K> gl_panel(F& f, double a, double b) {
  constexpr int kOrder = 10;
  const Rule& rule = gauss_legendre<kOrder>();
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  Vec<K> sum{};
  for (int i = 0; i < kOrder; ++i) {
    const Vec<K> v = f(std::clamp(mid + half * rule.nodes[i], a, b));  // rounding on tiny panels
    for (std::size_t k = 0; k < K; ++k) sum[k] += rule.weights[i] * v[k];
  }
  for (auto& s : sum) s *= half;
  return sum;
}

template <std::size_t K>
struct Panel {
  double a, b;
  int depth;
  Vec<K> coarse, left, right, err;
  double priority;
};

}  // namespace detail

/// Globally adaptive Gauss-Legendre quadrature of a K-component integrand over
/// the union of the intervals delimited by `breaks` (sorted, at least two).
///
/// Each panel compares a 10-point rule on the whole panel with the same rule on
/// its two halves; the panel with the largest normalized discrepancy is split
/// until every component satisfies |err_k| <= max(abs_tol, rel_tol * |I_k|).
/// Components share the partition, so ratios of components are computed on
/// identical nodes.
template <std::size_t K, class F>
std::array<double, K> integrate_vec(F&& f, std::span<const double> breaks, const Options& opt) {
  using namespace detail;
  using P = Panel<K>;
  std::vector<P> heap;
  heap.reserve(64);
  auto cmp = [](const P& x, const P& y) { return x.priority < y.priority; };

  auto make = [&](double a, double b, int depth, const Vec<K>& coarse) {
    P p{a, b, depth, coarse, {}, {}, {}, 0.0};
    const double c = 0.5 * (a + b);
    p.left = gl_panel<K>(f, a, c);
    p.right = gl_panel<K>(f, c, b);
    for (std::size_t k = 0; k < K; ++k) {
      p.err[k] = std::abs(p.left[k] + p.right[k] - p.coarse[k]);
    }
    return p;
  };

  Vec<K> total{}, err{};
  auto account = [&](const P& p, double sign) {
    for (std::size_t k = 0; k < K; ++k) {
      total[k] += sign * (p.left[k] + p.right[k]);
      err[k] += sign * p.err[k];
    }
  };
  auto tol = [&](std::size_t k) {
    return std::max(opt.abs_tol, opt.rel_tol * std::abs(total[k]));
  };
  auto set_priority = [&](P& p) {
    double pr = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      const double t = tol(k);
      pr = std::max(pr, t > 0 ? p.err[k] / t : (p.err[k] > 0 ? 1e300 : 0.0));
    }
    p.priority = pr;
  };

  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i], b = breaks[i + 1];
    if (!(b > a)) continue;
    P p = make(a, b, 0, gl_panel<K>(f, a, b));
    account(p, +1.0);
    heap.push_back(p);
  }
  for (auto& p : heap) set_priority(p);
  std::make_heap(heap.begin(), heap.end(), cmp);

  auto converged = [&] {
    for (std::size_t k = 0; k < K; ++k) {
      if (err[k] > tol(k)) return false;
    }
    return true;
  };

  std::size_t splits = 0;
  while (!heap.empty() && !converged()) {
    std::pop_heap(heap.begin(), heap.end(), cmp);
    P worst = heap.back();
    heap.pop_back();
    if (worst.depth >= opt.max_depth || ++splits > opt.max_intervals) {
      throw ConvergenceError("adaptive quadrature did not converge on [" +
                             std::to_string(worst.a) + ", " + std::to_string(worst.b) +
                             "] within depth " + std::to_string(opt.max_depth));
    }
    account(worst, -1.0);
    const double c = 0.5 * (worst.a + worst.b);
    P l = make(worst.a, c, worst.depth + 1, worst.left);
    P r = make(c, worst.b, worst.depth + 1, worst.right);
    account(l, +1.0);
    account(r, +1.0);
    set_priority(l);
    set_priority(r);
    heap.push_back(l);
    std::push_heap(heap.begin(), heap.end(), cmp);
    heap.push_back(r);
    std::push_heap(heap.begin(), heap.end(), cmp);
  }
  return total;
}

template <class F>
double integrate(F&& f, std::span<const double> breaks, const Options& opt) {
  auto wrapped = [&](double x) { return std::array<double, 1>{f(x)}; };
  return integrate_vec<1>(wrapped, breaks, opt)[0];
}

template <class F>
double integrate(F&& f, double a, double b, const Options& opt) {
  const std::array<double, 2> br{a, b};
  return integrate(f, std::span<const double>(br), opt);
}

/// Sorts, deduplicates and clips candidate breakpoints to [lo, hi]; the result
/// always starts at lo and ends at hi.
inline std::vector<double> breakpoints(std::vector<double> cand, double lo, double hi) {
  std::vector<double> out;
  out.reserve(cand.size() + 2);
  out.push_back(lo);
  for (double c : cand) {
    if (std::isfinite(c) && c > lo && c < hi) out.push_back(c);
  }
  out.push_back(hi);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(),
                        [&](double x, double y) { return y - x <= 1e-14 * std::max(1.0, std::abs(y)); }),
            out.end());
  if (out.back() != hi) out.back() = hi;
  return out;
}

}  // namespace ends_lab::quad
