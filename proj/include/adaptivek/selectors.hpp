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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace adk {

/// Which per-mini-batch sample selection rule to run.
enum class SelectorKind { Vanilla, Oracle, MKL, AdaptiveK };

/// How the adaptive threshold is derived from the moving averages:
///  - RmsNormalized: m / (sqrt(v) + epsilon), the first moment over the
///    root-mean-square of batch means. Dimensionless; tends to 1 on a
///    stationary loss stream.
///  - BiasCorrectedMean: m / (1 - beta1^step), the bias-corrected running
///    mean of the batch means, i.e. an estimate of the average loss itself.
enum class ThresholdVariant { RmsNormalized, BiasCorrectedMean };

std::string to_string(SelectorKind kind);
std::string to_string(ThresholdVariant variant);

struct SelectorConfig {
  SelectorKind kind = SelectorKind::Vanilla;
  int k = 1;               // MKL: number of smallest-loss samples kept
  double beta1 = 0.9;      // first-moment decay
  double beta2 = 0.999;    // second-moment decay
  double epsilon = 1e-8;   // numerical stabilizer
  ThresholdVariant threshold_variant = ThresholdVariant::RmsNormalized;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

/// Moving-average state driving the adaptive threshold. Starts at zero and
/// advances by exactly one step per mini-batch, in order.
struct ThresholdState {
  double m = 0.0;          // EMA of mini-batch mean losses
  double v = 0.0;          // EMA of squared mini-batch mean losses
  std::uint64_t step = 0;  // mini-batches processed so far
};

using Mask = std::vector<std::uint8_t>;

/// Outcome of running a selector on one mini-batch. `threshold` is only
/// present for the adaptive rule.
struct BatchSelection {
  Mask selected;
  std::optional<double> threshold;
  int n_selected = 0;
};

/// Baseline: every sample participates in the update.
BatchSelection select_vanilla(std::span<const double> losses);

/// Keep the min(k, n) samples with the smallest losses. Ties are broken in
/// favor of the lower index; the batch ordering itself is left untouched.
BatchSelection select_mkl(std::span<const double> losses, int k);

/// Keep exactly the samples whose noise flag is false. May select nothing.
BatchSelection select_oracle(std::span<const std::uint8_t> noise_flags);

struct ThresholdUpdate {
  ThresholdState state;
  double threshold = 0.0;
};

/// Advance the moving averages with one mini-batch mean loss and return the
/// new state together with the selection threshold it implies.
ThresholdUpdate update_threshold(const ThresholdState& state, double batch_mean_loss,
                                 const SelectorConfig& config);

struct AdaptiveSelection {
  BatchSelection selection;
  ThresholdState state;
};

/// Adaptive rule: update the threshold from the batch mean, then keep the
/// samples with loss <= threshold. May select nothing or everything.
AdaptiveSelection select_adaptive(std::span<const double> losses, const ThresholdState& state,
                                  const SelectorConfig& config);

/// Dispatch on config.kind. `state` is only consulted and advanced for
/// AdaptiveK; `noise_flags` is only consulted for Oracle.
BatchSelection apply_selector(const SelectorConfig& config, ThresholdState& state,
                              std::span<const double> losses,
                              std::span<const std::uint8_t> noise_flags);

}  // namespace adk
