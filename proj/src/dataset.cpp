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

#include "adaptivek/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "adaptivek/rng.hpp"

namespace adk {

double NoisyDataset::realized_noise_ratio() const {
  if (n_samples == 0) return 0.0;
  std::size_t flagged = 0;
  for (std::uint8_t f : noise_flags) flagged += f;
  return static_cast<double>(flagged) / static_cast<double>(n_samples);
}

namespace {

// Class centers with unit within-cluster sigma. One feature dimension puts
// them on a line; two or more puts them on a circle whose chord between
// neighbors equals the separation.
std::vector<std::vector<double>> class_centers(std::size_t n_features, int n_classes,
                                               double separation) {
  std::vector<std::vector<double>> centers(n_classes, std::vector<double>(n_features, 0.0));
  if (n_features == 1) {
    for (int c = 0; c < n_classes; ++c) centers[c][0] = separation * c;
    return centers;
  }
  const double radius = separation / (2.0 * std::sin(std::numbers::pi / n_classes));
  for (int c = 0; c < n_classes; ++c) {
    const double angle = 2.0 * std::numbers::pi * c / n_classes;
    centers[c][0] = radius * std::cos(angle);
    centers[c][1] = radius * std::sin(angle);
  }
  return centers;
}

}  // namespace

NoisyDataset make_blobs(std::size_t n_samples, std::size_t n_features, int n_classes,
                        double class_separation, std::uint64_t seed) {
  if (n_samples == 0) throw std::invalid_argument("n_samples must be positive");
  if (n_features == 0) throw std::invalid_argument("n_features must be positive");
  if (n_classes < 2) throw std::invalid_argument("n_classes must be at least 2");
  if (!(class_separation > 0.0)) throw std::invalid_argument("class_separation must be positive");

  const auto centers = class_centers(n_features, n_classes, class_separation);

  NoisyDataset ds;
  ds.n_samples = n_samples;
  ds.n_features = n_features;
  ds.n_classes = n_classes;
  ds.features.resize(n_samples * n_features);
  ds.observed_labels.resize(n_samples);
  ds.true_labels.resize(n_samples);
  ds.noise_flags.assign(n_samples, 0);

  std::mt19937_64 rng(derive_seed(seed, 0x626c6f62));  // "blob"
  std::normal_distribution<double> unit_normal(0.0, 1.0);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const int label = static_cast<int>(i % static_cast<std::size_t>(n_classes));
    ds.true_labels[i] = label;
    ds.observed_labels[i] = label;
    for (std::size_t f = 0; f < n_features; ++f) {
      ds.features[i * n_features + f] = centers[label][f] + unit_normal(rng);
    }
  }
  return ds;
}

NoisyDataset inject_noise(const NoisyDataset& ds, double tau, NoiseMode mode, std::uint64_t seed) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw std::invalid_argument("tau must be in [0, 1]");
  for (std::uint8_t f : ds.noise_flags) {
    if (f) throw std::invalid_argument("inject_noise requires a noise-free dataset");
  }

  NoisyDataset out = ds;
  const auto n_corrupt =
      static_cast<std::size_t>(std::llround(tau * static_cast<double>(ds.n_samples)));
  if (n_corrupt == 0) return out;

  std::mt19937_64 rng(derive_seed(seed, 0x6e6f697365));  // "noise"
  std::vector<std::size_t> order(ds.n_samples);
  std::iota(order.begin(), order.end(), std::size_t{0});
  fisher_yates(std::span<std::size_t>(order), rng);

  const int c = ds.n_classes;
  for (std::size_t i = 0; i < n_corrupt; ++i) {
    const std::size_t idx = order[i];
    const int truth = out.true_labels[idx];
    int corrupted;
    if (mode == NoiseMode::Directed) {
      corrupted = (truth + 1) % c;
    } else {
      // Uniform over the other C-1 labels.
      const int offset = 1 + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(c - 1)));
      corrupted = (truth + offset) % c;
    }
    out.observed_labels[idx] = corrupted;
    out.noise_flags[idx] = 1;
  }
  return out;
}

}  // namespace adk
