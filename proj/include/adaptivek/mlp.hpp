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

#include "adaptivek/dataset.hpp"
#include "adaptivek/selectors.hpp"

namespace adk {

struct MlpConfig {
  std::size_t hidden_width = 64;
};

/// One-hidden-layer tanh classifier with softmax cross-entropy, trained by
/// plain SGD. Gradients are averaged over the selected samples so the step
/// size does not scale with how many samples a selector keeps.
class MlpModel {
 public:
  MlpModel(std::size_t n_features, std::size_t hidden_width, int n_classes, std::uint64_t seed);

  /// Per-sample cross-entropy losses for the batch ds[indices].
  std::vector<double> per_sample_losses(const NoisyDataset& ds,
                                        std::span<const std::size_t> indices) const;

  /// Mean loss over the samples with mask[i] != 0. Throws on empty selection.
  double masked_mean_loss(const NoisyDataset& ds, std::span<const std::size_t> indices,
                          const Mask& mask) const;

  /// Analytic gradient of masked_mean_loss w.r.t. the flat parameter vector.
  std::vector<double> gradient(const NoisyDataset& ds, std::span<const std::size_t> indices,
                               const Mask& mask) const;

  /// One SGD step on the selected samples. No-op when nothing is selected.
  void sgd_update(const NoisyDataset& ds, std::span<const std::size_t> indices, const Mask& mask,
                  double learning_rate);

  int predict(std::span<const double> x) const;

  /// Fraction of samples whose predicted class matches observed_labels.
  double accuracy(const NoisyDataset& ds) const;

  std::vector<double>& parameters() { return params_; }
  const std::vector<double>& parameters() const { return params_; }

  std::size_t n_features() const { return n_features_; }
  std::size_t hidden_width() const { return hidden_; }
  int n_classes() const { return n_classes_; }

 private:
  std::size_t n_features_;
  std::size_t hidden_;
  int n_classes_;
  std::vector<double> params_;  // [W1 (h x d) | b1 (h) | W2 (C x h) | b2 (C)]

  std::size_t w1_off() const { return 0; }
  std::size_t b1_off() const { return hidden_ * n_features_; }
  std::size_t w2_off() const { return b1_off() + hidden_; }
  std::size_t b2_off() const { return w2_off() + static_cast<std::size_t>(n_classes_) * hidden_; }

  // Forward pass for one sample; fills hidden activations and class
  // log-probabilities, returns the cross-entropy loss for `label`.
  double forward(std::span<const double> x, int label, std::vector<double>& hidden_act,
                 std::vector<double>& log_probs) const;

  void accumulate_gradient(const NoisyDataset& ds, std::span<const std::size_t> indices,
                           const Mask& mask, std::vector<double>& grad) const;
};

}  // namespace adk
