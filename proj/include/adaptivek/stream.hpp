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

#include "adaptivek/selectors.hpp"
#include "adaptivek/theory.hpp"
#include "adaptivek/trace.hpp"

namespace adk {

/// Model-free selector exercise: every batch draws `batch_size` losses i.i.d.
/// from the mixture (the component a draw came from is its noise flag), runs
/// the selector, and records selection metrics. No model is trained; the
/// trace holds a single epoch whose iterations are the batches.
RunTrace simulate_stream(const GaussianMixture& gm, std::size_t n_batches, std::size_t batch_size,
                         const SelectorConfig& selector, std::uint64_t seed);

}  // namespace adk
