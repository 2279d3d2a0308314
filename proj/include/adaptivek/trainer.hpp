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

#include "adaptivek/dataset.hpp"
#include "adaptivek/mlp.hpp"
#include "adaptivek/selectors.hpp"
#include "adaptivek/trace.hpp"

namespace adk {

/// Two-phase schedule: `vanilla_epochs` epochs training on every sample, then
/// `adaptive_epochs` epochs with the configured selector active.
struct TrainSchedule {
  std::size_t vanilla_epochs = 10;
  std::size_t adaptive_epochs = 20;
  std::size_t batch_size = 32;
  double learning_rate = 0.5;
  std::uint64_t seed = 0;
  // Keep feeding the moving averages during the vanilla phase and carry the
  // state across the phase boundary (AdaptiveK only). Off by default: the
  // state starts fresh when selection begins.
  bool warm_ema = false;

  void validate() const;
};

/// Run the full two-phase training loop and record everything: per-iteration
/// selection outcomes and per-epoch accuracies/means. Mini-batches come from
/// a fresh Fisher-Yates shuffle each epoch, seeded from (seed, epoch).
RunTrace train(const NoisyDataset& train_set, const MlpConfig& model_config,
               const TrainSchedule& schedule, const SelectorConfig& selector,
               const NoisyDataset& test_set);

}  // namespace adk
