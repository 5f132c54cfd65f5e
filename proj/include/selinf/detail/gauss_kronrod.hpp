#pragma once

// Adaptive 21-point Gauss-Kronrod quadrature for small vector-valued
// integrands. Used on hot paths where every integrand shares the same nodes.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace selinf::detail {

inline constexpr std::array<double, 11> kGk21Nodes = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
inline constexpr std::array<double, 11> kGk21Weights = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525478000, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
// Weights of the embedded 10-point Gauss rule at nodes 1, 3, 5, 7, 9.
inline constexpr std::array<double, 5> kGauss10Weights = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

template <std::size_t N>
struct QuadResult {
  std::array<double, N> value{};
  double error = 0.0;
};

template <std::size_t N, typename F>
QuadResult<N> gk21_panel(const F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::array<double, N> kron{};
  std::array<double, N> gauss{};
  const auto fc = f(center);
  for (std::size_t c = 0; c < N; ++c) kron[c] = fc[c] * kGk21Weights[10];
  for (int i = 0; i < 10; ++i) {
    const double dx = half * kGk21Nodes[i];
    const auto f1 = f(center - dx);
    const auto f2 = f(center + dx);
    for (std::size_t c = 0; c < N; ++c) {
      const double s = f1[c] + f2[c];
      kron[c] += kGk21Weights[i] * s;
      if (i % 2 == 1) gauss[c] += kGauss10Weights[i / 2] * s;
    }
  }
  QuadResult<N> out;
  for (std::size_t c = 0; c < N; ++c) {
    out.value[c] = kron[c] * half;
    out.error = std::max(out.error, std::fabs((kron[c] - gauss[c]) * half));
  }
  return out;
}

/// Integrates f over consecutive breakpoints, bisecting the worst panel until
/// the summed error estimate is below max(abs_tol, rel_tol * |I[0]|).
template <std::size_t N, typename F>
QuadResult<N> integrate_adaptive(const F& f, std::span<const double> breakpoints, double abs_tol,
                                 double rel_tol, int max_panels = 200) {
  struct Panel {
    double a;
    double b;
    QuadResult<N> r;
  };
  std::vector<Panel> panels;
  panels.reserve(static_cast<std::size_t>(max_panels) + breakpoints.size());
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (breakpoints[i + 1] > breakpoints[i]) {
      panels.push_back({breakpoints[i], breakpoints[i + 1],
                        gk21_panel<N>(f, breakpoints[i], breakpoints[i + 1])});
    }
  }
  auto totals = [&panels]() {
    QuadResult<N> t;
    for (const auto& p : panels) {
      for (std::size_t c = 0; c < N; ++c) t.value[c] += p.r.value[c];
      t.error += p.r.error;
    }
    return t;
  };
  QuadResult<N> total = totals();
  while (static_cast<int>(panels.size()) < max_panels &&
         total.error > std::max(abs_tol, rel_tol * std::fabs(total.value[0]))) {
    auto worst = std::max_element(panels.begin(), panels.end(), [](const Panel& x, const Panel& y) {
      return x.r.error < y.r.error;
    });
    const double a = worst->a;
    const double b = worst->b;
    const double mid = 0.5 * (a + b);
    if (!(mid > a && mid < b)) break;
    *worst = {a, mid, gk21_panel<N>(f, a, mid)};
    panels.push_back({mid, b, gk21_panel<N>(f, mid, b)});
    total = totals();
  }
  return total;
}

}  // namespace selinf::detail
