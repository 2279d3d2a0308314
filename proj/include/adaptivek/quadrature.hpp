// Copyright 2026 The adaptivek authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstddef>
#include <utility>

namespace adk {

struct QuadratureOptions {
  double abs_tol = 1e-9;
  std::size_t max_subdivisions = std::size_t{1} << 20;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;   // accumulated |Richardson correction|
  std::size_t subdivisions = 0;  // interval splits performed
  bool converged = true;         // false when the subdivision budget ran out
};

namespace detail {

inline double simpson(double h, double fa, double fm, double fb) {
  return (fa + 4.0 * fm + fb) * (h / 6.0);
}

template <typename F>
void simpson_recurse(const F& f, double a, double m, double b, double fa, double fm, double fb,
                     double whole, double tol, int depth, QuadratureResult& out,
                     const QuadratureOptions& opt) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(m - a, fa, flm, fm);
  const double right = simpson(b - m, fm, frm, fb);
  const double delta = left + right - whole;

  // |delta|/15 is the standard Richardson error estimate for Simpson halving.
  if (depth > 0 && (std::abs(delta) <= 15.0 * tol || out.subdivisions >= opt.max_subdivisions)) {
    if (std::abs(delta) > 15.0 * tol) out.converged = false;
    out.value += left + right + delta / 15.0;
    out.error_estimate += std::abs(delta) / 15.0;
    return;
  }
  if (depth > 53) {  // interval narrower than one ulp; nothing left to split
    if (std::abs(delta) > 15.0 * tol) out.converged = false;
    out.value += left + right + delta / 15.0;
    out.error_estimate += std::abs(delta) / 15.0;
    return;
  }
  out.subdivisions += 1;
  simpson_recurse(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth + 1, out, opt);
  simpson_recurse(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth + 1, out, opt);
}

}  // namespace detail

/// Adaptive composite Simpson integration of f over [a, b] to an absolute
/// tolerance. Splits intervals until the local Richardson estimate is under
/// the (recursively halved) tolerance or the subdivision budget is spent.
template <typename F>
QuadratureResult adaptive_simpson(F&& f, double a, double b, QuadratureOptions opt = {}) {
  QuadratureResult out;
  if (a == b) return out;
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fm = f(m);
  const double fb = f(b);
  const double whole = detail::simpson(b - a, fa, fm, fb);
  detail::simpson_recurse(f, a, m, b, fa, fm, fb, whole, opt.abs_tol, 0, out, opt);
  return out;
}

}  // namespace adk
