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

#include "adaptivek/theory.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <utility>

#include "adaptivek/numfmt.hpp"
#include "adaptivek/quadrature.hpp"

namespace adk {

namespace {

constexpr int kMaxOrderStatN = 64;
constexpr double kInvSqrt2Pi = 0.3989422804014326779;
constexpr double kInvSqrt2 = 0.7071067811865475244;

double normal_pdf(double x, double mu, double sigma) {
  const double z = (x - mu) / sigma;
  return kInvSqrt2Pi / sigma * std::exp(-0.5 * z * z);
}

double normal_cdf(double x, double mu, double sigma) {
  return 0.5 * (1.0 + std::erf((x - mu) / sigma * kInvSqrt2));
}

// log k! for k <= kMaxOrderStatN, so binomial coefficients never overflow.
const std::array<double, kMaxOrderStatN + 1>& log_factorials() {
  static const auto table = [] {
    std::array<double, kMaxOrderStatN + 1> t{};
    t[0] = 0.0;
    for (int i = 1; i <= kMaxOrderStatN; ++i) t[i] = t[i - 1] + std::log(static_cast<double>(i));
    return t;
  }();
  return table;
}

double log_binomial(int n, int k) {
  const auto& lf = log_factorials();
  return lf[n] - lf[k] - lf[n - k];
}

void check_order_args(int n, int k) {
  if (n < 1 || n > kMaxOrderStatN) throw std::invalid_argument("n must be in [1, 64]");
  if (k < 1 || k > n) throw std::invalid_argument("k must be in [1, n]");
}

// Integrates f to the module-wide tolerance; throws when the subdivision
// budget runs out before reaching it.
template <typename F>
double integrate(F&& f, double lo, double hi) {
  const QuadratureResult r = adaptive_simpson(std::forward<F>(f), lo, hi);
  if (!r.converged) {
    throw std::runtime_error("quadrature did not converge; achieved absolute error " +
                             format_g9(r.error_estimate));
  }
  return r.value;
}

template <typename Pdf>
Moments moments_of_pdf(Pdf&& pdf, double lo, double hi) {
  Moments out;
  out.mean = integrate([&](double x) { return x * pdf(x); }, lo, hi);
  const double second = integrate([&](double x) { return x * x * pdf(x); }, lo, hi);
  out.variance = std::max(second - out.mean * out.mean, 0.0);
  return out;
}

}  // namespace

void GaussianMixture::validate() const {
  if (!(sigma1 > 0.0) || !std::isfinite(sigma1)) throw std::invalid_argument("sigma1 must be positive");
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw std::invalid_argument("sigma2 must be positive");
  if (!(tau >= 0.0 && tau <= 1.0)) throw std::invalid_argument("tau must be in [0, 1]");
  if (!std::isfinite(mu1) || !std::isfinite(mu2)) throw std::invalid_argument("non-finite mean");
}

std::pair<double, double> integration_range(const GaussianMixture& gm) {
  const double smax = std::max(gm.sigma1, gm.sigma2);
  return {std::min(gm.mu1, gm.mu2) - 10.0 * smax, std::max(gm.mu1, gm.mu2) + 10.0 * smax};
}

double mixture_pdf(const GaussianMixture& gm, double x) {
  return (1.0 - gm.tau) * normal_pdf(x, gm.mu1, gm.sigma1) +
         gm.tau * normal_pdf(x, gm.mu2, gm.sigma2);
}

double mixture_cdf(const GaussianMixture& gm, double x) {
  return (1.0 - gm.tau) * normal_cdf(x, gm.mu1, gm.sigma1) +
         gm.tau * normal_cdf(x, gm.mu2, gm.sigma2);
}

Moments mixture_moments(const GaussianMixture& gm) {
  Moments out;
  out.mean = (1.0 - gm.tau) * gm.mu1 + gm.tau * gm.mu2;
  const double d1 = gm.mu1 - out.mean;
  const double d2 = gm.mu2 - out.mean;
  out.variance = (1.0 - gm.tau) * gm.sigma1 * gm.sigma1 + gm.tau * gm.sigma2 * gm.sigma2 +
                 (1.0 - gm.tau) * d1 * d1 + gm.tau * d2 * d2;
  return out;
}

double order_statistic_pdf(const GaussianMixture& gm, int n, int k, double x) {
  check_order_args(n, k);
  const double f = mixture_pdf(gm, x);
  if (f == 0.0) return 0.0;
  const double F = mixture_cdf(gm, x);
  // 0^0 := 1 at the edges (k == 1 or k == n).
  const double low = k == 1 ? 1.0 : std::pow(F, k - 1);
  const double high = k == n ? 1.0 : std::pow(1.0 - F, n - k);
  return n * f * std::exp(log_binomial(n - 1, k - 1)) * low * high;
}

double mkl_pdf(const GaussianMixture& gm, int n, int k, double x) {
  check_order_args(n, k);
  double sum = 0.0;
  for (int p = 1; p <= k; ++p) sum += order_statistic_pdf(gm, n, p, x);
  return sum / k;
}

Moments mkl_moments(const GaussianMixture& gm, int n, int k) {
  gm.validate();
  check_order_args(n, k);
  const auto [lo, hi] = integration_range(gm);
  return moments_of_pdf([&](double x) { return mkl_pdf(gm, n, k, x); }, lo, hi);
}

double adaptive_pdf(const GaussianMixture& gm, double x) {
  const double mu_d = mixture_moments(gm).mean;
  if (x > mu_d) return 0.0;
  const double z = mixture_cdf(gm, mu_d);
  if (!(z > 0.0) || !std::isfinite(z)) throw std::domain_error("empty truncation region");
  return mixture_pdf(gm, x) / z;
}

Moments adaptive_moments(const GaussianMixture& gm) {
  gm.validate();
  const double mu_d = mixture_moments(gm).mean;
  const double z = mixture_cdf(gm, mu_d);
  if (!(z > 0.0) || !std::isfinite(z)) throw std::domain_error("empty truncation region");
  const auto [lo, hi] = integration_range(gm);
  (void)hi;
  return moments_of_pdf([&](double x) { return mixture_pdf(gm, x) / z; }, lo, mu_d);
}

double mse_sgd(const GaussianMixture& gm) {
  gm.validate();
  const Moments m = mixture_moments(gm);
  const double bias = m.mean - gm.mu1;
  return bias * bias + m.variance;
}

double mse_mkl(const GaussianMixture& gm, int n, int k) {
  const Moments m = mkl_moments(gm, n, k);
  const double bias = gm.mu1 - m.mean;
  return bias * bias + m.variance;
}

double mse_adk(const GaussianMixture& gm) {
  const Moments m = adaptive_moments(gm);
  const double bias = gm.mu1 - m.mean;
  return bias * bias + m.variance;
}

MseReport mse_report(const GaussianMixture& gm, int n, int k) {
  MseReport out;
  out.mse_sgd = mse_sgd(gm);
  out.mse_mkl = mse_mkl(gm, n, k);
  out.mse_adk = mse_adk(gm);
  out.params = gm;
  out.n = n;
  out.k = k;
  return out;
}

// ---------------------------------------------------------------------------
// Parameter sweeps

std::string to_string(SweepParam p) {
  switch (p) {
    case SweepParam::Mu2: return "mu2";
    case SweepParam::Sigma2: return "sigma2";
    case SweepParam::Tau: return "tau";
  }
  return "unknown";
}

std::size_t AxisSpec::count() const {
  if (!(step > 0.0)) throw std::invalid_argument("axis step must be positive");
  if (max < min) throw std::invalid_argument("axis max must be >= min");
  return static_cast<std::size_t>(std::floor((max - min) / step + 1e-9)) + 1;
}

double AxisSpec::value(std::size_t i) const { return min + static_cast<double>(i) * step; }

namespace {

void set_param(GaussianMixture& gm, SweepParam p, double value) {
  switch (p) {
    case SweepParam::Mu2: gm.mu2 = value; break;
    case SweepParam::Sigma2: gm.sigma2 = value; break;
    case SweepParam::Tau: gm.tau = value; break;
  }
}

SurfacePoint evaluate_point(const GaussianMixture& gm, int n, int k) {
  SurfacePoint pt;
  pt.report = mse_report(gm, n, k);
  pt.mkl_beats_sgd = pt.report.mse_mkl < pt.report.mse_sgd;
  pt.adk_beats_mkl = pt.report.mse_adk < pt.report.mse_mkl;
  return pt;
}

SurfaceGrid prepare_grid(const std::vector<AxisSpec>& axes, const GaussianMixture& base, int n,
                         int k) {
  if (axes.empty() || axes.size() > 2) throw std::invalid_argument("expected one or two sweep axes");
  if (axes.size() == 2 && axes[0].param == axes[1].param)
    throw std::invalid_argument("sweep axes must differ");
  base.validate();
  check_order_args(n, k);

  SurfaceGrid grid;
  grid.axes = axes;
  grid.base = base;
  grid.n = n;
  grid.k = k;
  std::size_t total = 1;
  for (const AxisSpec& ax : axes) {
    grid.shape.push_back(ax.count());
    total *= grid.shape.back();
  }
  grid.points.resize(total);
  return grid;
}

GaussianMixture point_params(const SurfaceGrid& grid, std::size_t flat_index) {
  GaussianMixture gm = grid.base;
  if (grid.axes.size() == 1) {
    set_param(gm, grid.axes[0].param, grid.axes[0].value(flat_index));
  } else {
    const std::size_t i = flat_index / grid.shape[1];
    const std::size_t j = flat_index % grid.shape[1];
    set_param(gm, grid.axes[0].param, grid.axes[0].value(i));
    set_param(gm, grid.axes[1].param, grid.axes[1].value(j));
  }
  return gm;
}

}  // namespace

SurfaceGrid mse_surface(const std::vector<AxisSpec>& axes, const GaussianMixture& base, int n,
                        int k) {
  SurfaceGrid grid = prepare_grid(axes, base, n, k);
  const long long total = static_cast<long long>(grid.points.size());

  // Grid points are independent pure evaluations, so the parallel result is
  // bit-identical to the serial one. Exceptions may not cross the parallel
  // region; capture the first and rethrow after.
  std::atomic<bool> failed{false};
  std::string error;
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < total; ++i) {
    if (failed.load(std::memory_order_relaxed)) continue;
    try {
      grid.points[static_cast<std::size_t>(i)] =
          evaluate_point(point_params(grid, static_cast<std::size_t>(i)), n, k);
    } catch (const std::exception& e) {
#pragma omp critical
      {
        if (!failed.exchange(true)) error = e.what();
      }
    }
  }
  if (failed.load()) throw std::runtime_error(error);
  return grid;
}

SurfaceGrid mse_surface_serial(const std::vector<AxisSpec>& axes, const GaussianMixture& base,
                               int n, int k) {
  SurfaceGrid grid = prepare_grid(axes, base, n, k);
  for (std::size_t i = 0; i < grid.points.size(); ++i) {
    grid.points[i] = evaluate_point(point_params(grid, i), n, k);
  }
  return grid;
}

void write_surface_csv(std::ostream& os, const SurfaceGrid& grid) {
  os << "mu1,sigma1,mu2,sigma2,tau,n,k,mse_sgd,mse_mkl,mse_adk,mkl_beats_sgd,adk_beats_mkl\n";
  for (const SurfacePoint& pt : grid.points) {
    const GaussianMixture& gm = pt.report.params;
    os << format_g9(gm.mu1) << ',' << format_g9(gm.sigma1) << ',' << format_g9(gm.mu2) << ','
       << format_g9(gm.sigma2) << ',' << format_g9(gm.tau) << ',' << pt.report.n << ','
       << pt.report.k << ',' << format_g9(pt.report.mse_sgd) << ',' << format_g9(pt.report.mse_mkl)
       << ',' << format_g9(pt.report.mse_adk) << ',' << (pt.mkl_beats_sgd ? 1 : 0) << ','
       << (pt.adk_beats_mkl ? 1 : 0) << '\n';
  }
}

}  // namespace adk
