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
#include <cstdint>
#include <span>
#include <vector>

namespace adk {

/// Labeled dataset with oracle knowledge kept separate from training inputs:
/// training code reads features + observed_labels; true_labels/noise_flags
/// exist for evaluation and the Oracle selector only.
struct NoisyDataset {
  std::vector<double> features;  // row-major, n_samples x n_features
  std::size_t n_samples = 0;
  std::size_t n_features = 0;
  std::vector<int> observed_labels;
  std::vector<int> true_labels;
  std::vector<std::uint8_t> noise_flags;  // observed != true
  int n_classes = 0;

  std::span<const double> row(std::size_t i) const {
    return {features.data() + i * n_features, n_features};
  }

  double realized_noise_ratio() const;
};

/// Isotropic Gaussian clusters (unit sigma), one per class, centers at mutual
/// distance >= class_separation. Balanced labels, all noise flags false,
/// deterministic for a given seed.
NoisyDataset make_blobs(std::size_t n_samples, std::size_t n_features, int n_classes,
                        double class_separation, std::uint64_t seed);

enum class NoiseMode {
  Directed,   // y -> (y + 1) mod C
  Symmetric,  // uniform over the other C - 1 labels
};

/// Corrupt the labels of exactly round(tau * n) samples, chosen uniformly by
/// seed. The input must be noise-free; true labels are preserved in the copy.
NoisyDataset inject_noise(const NoisyDataset& ds, double tau, NoiseMode mode, std::uint64_t seed);

}  // namespace adk
