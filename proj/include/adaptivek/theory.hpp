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

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace adk {

/// Two-component Gaussian loss model: clean samples ~ N(mu1, sigma1^2),
/// noisy samples ~ N(mu2, sigma2^2), noise ratio tau.
struct GaussianMixture {
  double mu1 = 0.0;
  double sigma1 = 1.0;
  double mu2 = 5.0;
  double sigma2 = 2.0;
  double tau = 0.4;

  void validate() const;  // sigma1 > 0, sigma2 > 0, tau in [0, 1]
};

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

double mixture_pdf(const GaussianMixture& gm, double x);
double mixture_cdf(const GaussianMixture& gm, double x);
Moments mixture_moments(const GaussianMixture& gm);

/// Density of the k-th smallest of n i.i.d. mixture draws. Requires
/// 1 <= k <= n <= 64 (binomial coefficients are evaluated in log space).
double order_statistic_pdf(const GaussianMixture& gm, int n, int k, double x);

/// Density of a uniformly chosen sample among the k smallest of n draws:
/// the average of the first k order-statistic densities.
double mkl_pdf(const GaussianMixture& gm, int n, int k, double x);
Moments mkl_moments(const GaussianMixture& gm, int n, int k);

/// Density of the mixture truncated at its mean and renormalized. Throws
/// "empty truncation region" when the normalizer is degenerate.
double adaptive_pdf(const GaussianMixture& gm, double x);
Moments adaptive_moments(const GaussianMixture& gm);

/// Squared bias plus variance of each selection rule's loss distribution,
/// measured against the clean component.
double mse_sgd(const GaussianMixture& gm);
double mse_mkl(const GaussianMixture& gm, int n, int k);
double mse_adk(const GaussianMixture& gm);

struct MseReport {
  double mse_sgd = 0.0;
  double mse_mkl = 0.0;
  double mse_adk = 0.0;
  GaussianMixture params;
  int n = 10;
  int k = 6;
};

MseReport mse_report(const GaussianMixture& gm, int n, int k);

/// Integration window used for every moment/normalization integral:
/// [min(mu) - 10 max(sigma), max(mu) + 10 max(sigma)].
std::pair<double, double> integration_range(const GaussianMixture& gm);

// ---------------------------------------------------------------------------
// Parameter sweeps

enum class SweepParam { Mu2, Sigma2, Tau };

std::string to_string(SweepParam p);

struct AxisSpec {
  SweepParam param = SweepParam::Mu2;
  double min = 0.0;
  double max = 0.0;
  double step = 1.0;

  std::size_t count() const;
  double value(std::size_t i) const;
};

struct SurfacePoint {
  MseReport report;
  bool mkl_beats_sgd = false;
  bool adk_beats_mkl = false;
};

/// Grid of MSE triples swept over one or two mixture parameters. Points are
/// stored row-major in axis order regardless of how they were computed.
struct SurfaceGrid {
  std::vector<AxisSpec> axes;
  GaussianMixture base;
  int n = 10;
  int k = 6;
  std::vector<std::size_t> shape;
  std::vector<SurfacePoint> points;
};

/// Evaluates the grid. Parallelized across grid points with OpenMP when
/// available; output is identical to mse_surface_serial either way.
SurfaceGrid mse_surface(const std::vector<AxisSpec>& axes, const GaussianMixture& base, int n,
                        int k);

/// Single-threaded reference implementation kept for testing and benchmarks.
SurfaceGrid mse_surface_serial(const std::vector<AxisSpec>& axes, const GaussianMixture& base,
                               int n, int k);

/// CSV schema: mu1,sigma1,mu2,sigma2,tau,n,k,mse_sgd,mse_mkl,mse_adk,
/// mkl_beats_sgd,adk_beats_mkl. Floats carry 9 significant digits, booleans
/// print as 0/1.
void write_surface_csv(std::ostream& os, const SurfaceGrid& grid);

}  // namespace adk
