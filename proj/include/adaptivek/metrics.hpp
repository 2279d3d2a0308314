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
#include <optional>
#include <span>
#include <vector>

#include "adaptivek/selectors.hpp"
#include "adaptivek/trace.hpp"

namespace adk {

/// Selection quality for one mini-batch. Precision is the clean fraction of
/// what was selected; recall is the selected fraction of what was clean.
/// Either is absent when its denominator is zero.
struct SelectionMetrics {
  std::optional<double> precision;
  std::optional<double> recall;
  double selected_fraction = 0.0;
  double clean_fraction_in_batch = 0.0;
};

SelectionMetrics selection_metrics(std::span<const std::uint8_t> mask,
                                   std::span<const std::uint8_t> noise_flags);

struct AveragedMetrics {
  SelectionMetrics mean;  // arithmetic mean over defined values
  std::size_t undefined_precision = 0;
  std::size_t undefined_recall = 0;
};

AveragedMetrics epoch_average(std::span<const SelectionMetrics> records);

/// Noise-ratio estimate: one minus the mean selected fraction over the last
/// `window` epochs of the selection phase. Throws when the trace has fewer
/// selection-phase epochs than the window.
double estimate_noise_ratio(const RunTrace& trace, std::size_t window);

}  // namespace adk
