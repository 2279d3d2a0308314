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

#include "adaptivek/selectors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace adk {

namespace {

void check_losses(std::span<const double> losses) {
  if (losses.empty()) throw std::invalid_argument("empty mini-batch");
  for (double l : losses) {
    if (!std::isfinite(l)) throw std::invalid_argument("non-finite loss");
  }
}

}  // namespace

std::string to_string(SelectorKind kind) {
  switch (kind) {
    case SelectorKind::Vanilla: return "vanilla";
    case SelectorKind::Oracle: return "oracle";
    case SelectorKind::MKL: return "mkl";
    case SelectorKind::AdaptiveK: return "adaptive";
  }
  return "unknown";
}

std::string to_string(ThresholdVariant variant) {
  switch (variant) {
    case ThresholdVariant::RmsNormalized: return "rms-normalized";
    case ThresholdVariant::BiasCorrectedMean: return "bias-corrected-mean";
  }
  return "unknown";
}

void SelectorConfig::validate() const {
  if (!(beta1 > 0.0 && beta1 <= 1.0)) throw std::invalid_argument("beta1 must be in (0, 1]");
  if (!(beta2 > 0.0 && beta2 <= 1.0)) throw std::invalid_argument("beta2 must be in (0, 1]");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (kind == SelectorKind::MKL && k < 1) throw std::invalid_argument("invalid k");
}

BatchSelection select_vanilla(std::span<const double> losses) {
  check_losses(losses);
  BatchSelection out;
  out.selected.assign(losses.size(), 1);
  out.n_selected = static_cast<int>(losses.size());
  return out;
}

BatchSelection select_mkl(std::span<const double> losses, int k) {
  if (k <= 0) throw std::invalid_argument("invalid k");
  check_losses(losses);

  const std::size_t n = losses.size();
  const std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(k), n);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // (loss, index) lexicographic: equal losses keep the lower index first.
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (losses[a] != losses[b]) return losses[a] < losses[b];
    return a < b;
  });

  BatchSelection out;
  out.selected.assign(n, 0);
  for (std::size_t i = 0; i < keep; ++i) out.selected[order[i]] = 1;
  out.n_selected = static_cast<int>(keep);
  return out;
}

BatchSelection select_oracle(std::span<const std::uint8_t> noise_flags) {
  if (noise_flags.empty()) throw std::invalid_argument("empty mini-batch");
  BatchSelection out;
  out.selected.resize(noise_flags.size());
  int count = 0;
  for (std::size_t i = 0; i < noise_flags.size(); ++i) {
    out.selected[i] = noise_flags[i] ? 0 : 1;
    count += out.selected[i];
  }
  out.n_selected = count;
  return out;
}

ThresholdUpdate update_threshold(const ThresholdState& state, double batch_mean_loss,
                                 const SelectorConfig& config) {
  if (!std::isfinite(batch_mean_loss)) throw std::invalid_argument("non-finite loss");
  if (batch_mean_loss < 0.0) throw std::invalid_argument("negative mean loss");

  ThresholdUpdate out;
  out.state.m = config.beta1 * state.m + (1.0 - config.beta1) * batch_mean_loss;
  out.state.v = config.beta2 * state.v + (1.0 - config.beta2) * batch_mean_loss * batch_mean_loss;
  out.state.step = state.step + 1;

  switch (config.threshold_variant) {
    case ThresholdVariant::RmsNormalized:
      out.threshold = out.state.m / (std::sqrt(out.state.v) + config.epsilon);
      break;
    case ThresholdVariant::BiasCorrectedMean: {
      const double denom = 1.0 - std::pow(config.beta1, static_cast<double>(out.state.step));
      // denom == 0 only for beta1 == 1, where m never moves off zero anyway.
      out.threshold = denom > 0.0 ? out.state.m / denom : out.state.m;
      break;
    }
  }
  return out;
}

AdaptiveSelection select_adaptive(std::span<const double> losses, const ThresholdState& state,
                                  const SelectorConfig& config) {
  check_losses(losses);
  double mean = 0.0;
  for (double l : losses) mean += l;
  mean /= static_cast<double>(losses.size());

  const ThresholdUpdate upd = update_threshold(state, mean, config);

  AdaptiveSelection out;
  out.state = upd.state;
  out.selection.threshold = upd.threshold;
  out.selection.selected.resize(losses.size());
  int count = 0;
  for (std::size_t i = 0; i < losses.size(); ++i) {
    out.selection.selected[i] = losses[i] <= upd.threshold ? 1 : 0;
    count += out.selection.selected[i];
  }
  out.selection.n_selected = count;
  return out;
}

BatchSelection apply_selector(const SelectorConfig& config, ThresholdState& state,
                              std::span<const double> losses,
                              std::span<const std::uint8_t> noise_flags) {
  switch (config.kind) {
    case SelectorKind::Vanilla: return select_vanilla(losses);
    case SelectorKind::Oracle: return select_oracle(noise_flags);
    case SelectorKind::MKL: return select_mkl(losses, config.k);
    case SelectorKind::AdaptiveK: {
      AdaptiveSelection res = select_adaptive(losses, state, config);
      state = res.state;
      return std::move(res.selection);
    }
  }
  throw std::invalid_argument("unknown selector kind");
}

}  // namespace adk
