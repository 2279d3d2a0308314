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

#include "adaptivek/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "adaptivek/rng.hpp"

namespace adk {

MlpModel::MlpModel(std::size_t n_features, std::size_t hidden_width, int n_classes,
                   std::uint64_t seed)
    : n_features_(n_features), hidden_(hidden_width), n_classes_(n_classes) {
  if (n_features == 0 || hidden_width == 0 || n_classes < 2)
    throw std::invalid_argument("invalid model shape");

  params_.assign(b2_off() + static_cast<std::size_t>(n_classes_), 0.0);
  std::mt19937_64 rng(derive_seed(seed, 0x6d6c70));  // "mlp"
  std::normal_distribution<double> unit_normal(0.0, 1.0);
  const double w1_scale = 1.0 / std::sqrt(static_cast<double>(n_features_));
  for (std::size_t i = 0; i < hidden_ * n_features_; ++i)
    params_[w1_off() + i] = w1_scale * unit_normal(rng);
  const double w2_scale = 1.0 / std::sqrt(static_cast<double>(hidden_));
  for (std::size_t i = 0; i < static_cast<std::size_t>(n_classes_) * hidden_; ++i)
    params_[w2_off() + i] = w2_scale * unit_normal(rng);
  // Biases start at zero.
}

double MlpModel::forward(std::span<const double> x, int label, std::vector<double>& hidden_act,
                         std::vector<double>& log_probs) const {
  hidden_act.resize(hidden_);
  log_probs.resize(static_cast<std::size_t>(n_classes_));

  const double* w1 = params_.data() + w1_off();
  const double* b1 = params_.data() + b1_off();
  const double* w2 = params_.data() + w2_off();
  const double* b2 = params_.data() + b2_off();

  for (std::size_t h = 0; h < hidden_; ++h) {
    double a = b1[h];
    const double* row = w1 + h * n_features_;
    for (std::size_t f = 0; f < n_features_; ++f) a += row[f] * x[f];
    hidden_act[h] = std::tanh(a);
  }

  double max_logit = -std::numeric_limits<double>::infinity();
  for (int c = 0; c < n_classes_; ++c) {
    double o = b2[c];
    const double* row = w2 + static_cast<std::size_t>(c) * hidden_;
    for (std::size_t h = 0; h < hidden_; ++h) o += row[h] * hidden_act[h];
    log_probs[c] = o;
    max_logit = std::max(max_logit, o);
  }
  double sum_exp = 0.0;
  for (int c = 0; c < n_classes_; ++c) sum_exp += std::exp(log_probs[c] - max_logit);
  const double lse = max_logit + std::log(sum_exp);
  for (int c = 0; c < n_classes_; ++c) log_probs[c] -= lse;

  return label >= 0 ? -log_probs[label] : 0.0;
}

std::vector<double> MlpModel::per_sample_losses(const NoisyDataset& ds,
                                                std::span<const std::size_t> indices) const {
  std::vector<double> losses(indices.size());
  std::vector<double> hidden_act, log_probs;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const std::size_t idx = indices[i];
    losses[i] = forward(ds.row(idx), ds.observed_labels[idx], hidden_act, log_probs);
  }
  return losses;
}

double MlpModel::masked_mean_loss(const NoisyDataset& ds, std::span<const std::size_t> indices,
                                  const Mask& mask) const {
  double sum = 0.0;
  std::size_t count = 0;
  std::vector<double> hidden_act, log_probs;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (!mask[i]) continue;
    const std::size_t idx = indices[i];
    sum += forward(ds.row(idx), ds.observed_labels[idx], hidden_act, log_probs);
    ++count;
  }
  if (count == 0) throw std::invalid_argument("empty selection");
  return sum / static_cast<double>(count);
}

void MlpModel::accumulate_gradient(const NoisyDataset& ds, std::span<const std::size_t> indices,
                                   const Mask& mask, std::vector<double>& grad) const {
  if (mask.size() != indices.size()) throw std::invalid_argument("mask/batch size mismatch");
  std::size_t n_selected = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) n_selected += mask[i] ? 1 : 0;
  if (n_selected == 0) throw std::invalid_argument("empty selection");
  const double weight = 1.0 / static_cast<double>(n_selected);

  grad.assign(params_.size(), 0.0);
  double* gw1 = grad.data() + w1_off();
  double* gb1 = grad.data() + b1_off();
  double* gw2 = grad.data() + w2_off();
  double* gb2 = grad.data() + b2_off();
  const double* w2 = params_.data() + w2_off();

  std::vector<double> hidden_act, log_probs;
  std::vector<double> dlogit(static_cast<std::size_t>(n_classes_));
  std::vector<double> dhidden(hidden_);

  // Samples accumulate in batch order so that masking and physically
  // sub-setting the batch produce bit-identical sums.
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (!mask[i]) continue;
    const std::size_t idx = indices[i];
    const auto x = ds.row(idx);
    const int label = ds.observed_labels[idx];
    forward(x, label, hidden_act, log_probs);

    for (int c = 0; c < n_classes_; ++c) {
      dlogit[c] = (std::exp(log_probs[c]) - (c == label ? 1.0 : 0.0)) * weight;
    }
    for (std::size_t h = 0; h < hidden_; ++h) {
      double acc = 0.0;
      for (int c = 0; c < n_classes_; ++c) acc += w2[static_cast<std::size_t>(c) * hidden_ + h] * dlogit[c];
      dhidden[h] = acc * (1.0 - hidden_act[h] * hidden_act[h]);
    }
    for (int c = 0; c < n_classes_; ++c) {
      double* row = gw2 + static_cast<std::size_t>(c) * hidden_;
      for (std::size_t h = 0; h < hidden_; ++h) row[h] += dlogit[c] * hidden_act[h];
      gb2[c] += dlogit[c];
    }
    for (std::size_t h = 0; h < hidden_; ++h) {
      double* row = gw1 + h * n_features_;
      for (std::size_t f = 0; f < n_features_; ++f) row[f] += dhidden[h] * x[f];
      gb1[h] += dhidden[h];
    }
  }
}

std::vector<double> MlpModel::gradient(const NoisyDataset& ds, std::span<const std::size_t> indices,
                                       const Mask& mask) const {
  std::vector<double> grad;
  accumulate_gradient(ds, indices, mask, grad);
  return grad;
}

void MlpModel::sgd_update(const NoisyDataset& ds, std::span<const std::size_t> indices,
                          const Mask& mask, double learning_rate) {
  bool any = false;
  for (std::size_t i = 0; i < mask.size(); ++i) any |= mask[i] != 0;
  if (!any) return;

  std::vector<double> grad;
  accumulate_gradient(ds, indices, mask, grad);
  for (std::size_t i = 0; i < params_.size(); ++i) params_[i] -= learning_rate * grad[i];
}

int MlpModel::predict(std::span<const double> x) const {
  std::vector<double> hidden_act, log_probs;
  forward(x, -1, hidden_act, log_probs);
  int best = 0;
  for (int c = 1; c < n_classes_; ++c) {
    if (log_probs[c] > log_probs[best]) best = c;
  }
  return best;
}

double MlpModel::accuracy(const NoisyDataset& ds) const {
  if (ds.n_samples == 0) throw std::invalid_argument("empty dataset");
  std::size_t correct = 0;
  std::vector<double> hidden_act, log_probs;
  for (std::size_t i = 0; i < ds.n_samples; ++i) {
    forward(ds.row(i), -1, hidden_act, log_probs);
    int best = 0;
    for (int c = 1; c < n_classes_; ++c) {
      if (log_probs[c] > log_probs[best]) best = c;
    }
    correct += best == ds.observed_labels[i] ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(ds.n_samples);
}

}  // namespace adk
