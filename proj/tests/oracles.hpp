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

// Test-only reference computations. Everything here is implemented from
// scratch (own pdf/cdf, own fixed-grid Simpson rule, own samplers) so it can
// stand as an independent check of the library's quadrature- and
// simulation-based results.

#pragma once

#include <cstdint>
#include <utility>

#include "adaptivek/dataset.hpp"
#include "adaptivek/theory.hpp"

namespace adk::oracle {

struct MomentEstimate {
  double mean = 0.0;
  double mean_se = 0.0;
  double variance = 0.0;
  double variance_se = 0.0;
};

/// Sample moments of n_draws mixture losses.
MomentEstimate mc_mixture_moments(const GaussianMixture& gm, std::size_t n_draws,
                                  std::uint64_t seed);

/// Sorted-draws oracle for the k-smallest-of-n selection: pools the k
/// smallest losses of every batch and reports the pooled distribution's
/// mean/variance with standard errors (batch-level replicates).
MomentEstimate mc_mkl_moments(const GaussianMixture& gm, int n, int k, std::size_t n_batches,
                              std::uint64_t seed);

/// Rejection-sampling oracle for the mixture truncated at `cutoff`.
MomentEstimate mc_truncated_moments(const GaussianMixture& gm, double cutoff,
                                    std::size_t n_accepted, std::uint64_t seed);

/// Mean of the k-th smallest of n mixture draws over `trials` batches.
MomentEstimate mc_order_stat_mean(const GaussianMixture& gm, int n, int k, std::size_t trials,
                                  std::uint64_t seed);

/// Closed-form mean/variance of N(mu, sigma^2) truncated to (-inf, upper].
std::pair<double, double> truncated_normal_moments(double mu, double sigma, double upper);

/// Exact long-run expected selection precision and recall of the
/// k-smallest-of-n rule on i.i.d. mixture batches, from order statistics.
std::pair<double, double> exact_mkl_precision_recall(const GaussianMixture& gm, int n, int k);

/// Fixed-grid composite Simpson integral (independent of the library's
/// adaptive integrator).
double simpson_integral(double (*f)(double, const void*), const void* ctx, double lo, double hi,
                        std::size_t intervals);

/// Accuracy of a nearest-centroid classifier fit on train's observed labels.
double nearest_centroid_accuracy(const NoisyDataset& train, const NoisyDataset& test);

}  // namespace adk::oracle
