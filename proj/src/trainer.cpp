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

#include "adaptivek/trainer.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "adaptivek/metrics.hpp"
#include "adaptivek/rng.hpp"

namespace adk {

void TrainSchedule::validate() const {
  if (batch_size < 1) throw std::invalid_argument("batch_size must be at least 1");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be positive");
  if (vanilla_epochs + adaptive_epochs == 0) throw std::invalid_argument("no epochs scheduled");
}

namespace {

struct BatchLossStats {
  std::optional<double> clean_mean;
  std::optional<double> noisy_mean;
};

BatchLossStats batch_loss_stats(std::span<const double> losses,
                                std::span<const std::uint8_t> flags) {
  double clean_sum = 0.0, noisy_sum = 0.0;
  std::size_t clean_n = 0, noisy_n = 0;
  for (std::size_t i = 0; i < losses.size(); ++i) {
    if (flags[i]) {
      noisy_sum += losses[i];
      ++noisy_n;
    } else {
      clean_sum += losses[i];
      ++clean_n;
    }
  }
  BatchLossStats out;
  if (clean_n > 0) out.clean_mean = clean_sum / static_cast<double>(clean_n);
  if (noisy_n > 0) out.noisy_mean = noisy_sum / static_cast<double>(noisy_n);
  return out;
}

}  // namespace

RunTrace train(const NoisyDataset& train_set, const MlpConfig& model_config,
               const TrainSchedule& schedule, const SelectorConfig& selector,
               const NoisyDataset& test_set) {
  schedule.validate();
  selector.validate();
  if (train_set.n_samples == 0 || test_set.n_samples == 0)
    throw std::invalid_argument("empty dataset");
  if (selector.kind == SelectorKind::MKL &&
      static_cast<std::size_t>(selector.k) > schedule.batch_size)
    throw std::invalid_argument("invalid k");

  MlpModel model(train_set.n_features, model_config.hidden_width, train_set.n_classes,
                 derive_seed(schedule.seed, 0x696e6974));  // "init"

  RunTrace trace;
  trace.run_kind = "train";
  trace.selector = selector;
  trace.seed = schedule.seed;
  trace.vanilla_epochs = schedule.vanilla_epochs;
  trace.batch_size = schedule.batch_size;
  trace.learning_rate = schedule.learning_rate;
  trace.dataset_noise_ratio = train_set.realized_noise_ratio();

  ThresholdState state;
  const std::size_t total_epochs = schedule.vanilla_epochs + schedule.adaptive_epochs;
  const bool track_warm_ema = selector.kind == SelectorKind::AdaptiveK && schedule.warm_ema;

  std::vector<std::size_t> order(train_set.n_samples);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<std::uint8_t> batch_flags;

  for (std::size_t epoch = 1; epoch <= total_epochs; ++epoch) {
    const bool selection_active = epoch > schedule.vanilla_epochs;
    if (selection_active && epoch == schedule.vanilla_epochs + 1 && !track_warm_ema) {
      state = ThresholdState{};
    }

    std::mt19937_64 shuffle_rng(derive_seed(schedule.seed, 0x65706f63 + epoch));  // "epoc"+i
    fisher_yates(std::span<std::size_t>(order), shuffle_rng);

    EpochRecord record;
    double clean_loss_sum = 0.0, noisy_loss_sum = 0.0;
    std::size_t clean_count = 0, noisy_count = 0;
    double selected_fraction_sum = 0.0;

    const std::size_t n_batches =
        (train_set.n_samples + schedule.batch_size - 1) / schedule.batch_size;
    for (std::size_t b = 0; b < n_batches; ++b) {
      const std::size_t begin = b * schedule.batch_size;
      const std::size_t end = std::min(begin + schedule.batch_size, train_set.n_samples);
      const std::span<const std::size_t> batch(order.data() + begin, end - begin);

      const std::vector<double> losses = model.per_sample_losses(train_set, batch);
      for (double l : losses) {
        if (!std::isfinite(l)) {
          throw std::runtime_error("divergence: non-finite loss at epoch " +
                                   std::to_string(epoch) + " iteration " + std::to_string(b + 1));
        }
      }

      batch_flags.resize(batch.size());
      for (std::size_t i = 0; i < batch.size(); ++i)
        batch_flags[i] = train_set.noise_flags[batch[i]];

      BatchSelection sel;
      if (selection_active) {
        sel = apply_selector(selector, state, losses, batch_flags);
      } else {
        sel = select_vanilla(losses);
        if (track_warm_ema) {
          double mean = 0.0;
          for (double l : losses) mean += l;
          mean /= static_cast<double>(losses.size());
          state = update_threshold(state, mean, selector).state;
        }
      }

      if (sel.n_selected > 0) {
        model.sgd_update(train_set, batch, sel.selected, schedule.learning_rate);
      }

      const SelectionMetrics sm = selection_metrics(sel.selected, batch_flags);
      const BatchLossStats stats = batch_loss_stats(losses, batch_flags);

      IterationRecord iter;
      iter.threshold = sel.threshold;
      iter.n_selected = sel.n_selected;
      iter.batch_size = static_cast<int>(batch.size());
      iter.precision = sm.precision;
      iter.recall = sm.recall;
      iter.mean_loss_clean = stats.clean_mean;
      iter.mean_loss_noisy = stats.noisy_mean;
      record.iterations.push_back(iter);

      selected_fraction_sum += sm.selected_fraction;
      for (std::size_t i = 0; i < batch.size(); ++i) {
        if (batch_flags[i]) {
          noisy_loss_sum += losses[i];
          ++noisy_count;
        } else {
          clean_loss_sum += losses[i];
          ++clean_count;
        }
      }
    }

    record.avg_selected_fraction = selected_fraction_sum / static_cast<double>(n_batches);
    if (clean_count > 0) record.mean_loss_clean = clean_loss_sum / static_cast<double>(clean_count);
    if (noisy_count > 0) record.mean_loss_noisy = noisy_loss_sum / static_cast<double>(noisy_count);
    record.test_accuracy = model.accuracy(test_set);
    record.train_accuracy = model.accuracy(train_set);
    trace.epochs.push_back(std::move(record));
  }

  trace.final_threshold_state = state;
  return trace;
}

}  // namespace adk
