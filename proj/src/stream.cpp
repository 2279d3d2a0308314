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

#include "adaptivek/stream.hpp"

#include <random>
#include <stdexcept>

#include "adaptivek/metrics.hpp"
#include "adaptivek/rng.hpp"

namespace adk {

RunTrace simulate_stream(const GaussianMixture& gm, std::size_t n_batches, std::size_t batch_size,
                         const SelectorConfig& selector, std::uint64_t seed) {
  gm.validate();
  selector.validate();
  if (n_batches == 0) throw std::invalid_argument("n_batches must be positive");
  if (batch_size == 0) throw std::invalid_argument("batch_size must be positive");
  if (selector.kind == SelectorKind::MKL && static_cast<std::size_t>(selector.k) > batch_size)
    throw std::invalid_argument("invalid k");

  RunTrace trace;
  trace.run_kind = "stream";
  trace.selector = selector;
  trace.seed = seed;
  trace.vanilla_epochs = 0;
  trace.batch_size = batch_size;
  trace.dataset_noise_ratio = gm.tau;

  std::mt19937_64 rng(derive_seed(seed, 0x73747265616d));  // "stream"
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> clean(gm.mu1, gm.sigma1);
  std::normal_distribution<double> noisy(gm.mu2, gm.sigma2);

  EpochRecord epoch;
  epoch.iterations.reserve(n_batches);
  ThresholdState state;
  std::vector<double> losses(batch_size);
  std::vector<std::uint8_t> flags(batch_size);
  double selected_fraction_sum = 0.0;
  double clean_sum = 0.0, noisy_sum = 0.0;
  std::size_t clean_n = 0, noisy_n = 0;

  for (std::size_t b = 0; b < n_batches; ++b) {
    for (std::size_t i = 0; i < batch_size; ++i) {
      const bool from_noisy = unit(rng) < gm.tau;
      flags[i] = from_noisy ? 1 : 0;
      losses[i] = from_noisy ? noisy(rng) : clean(rng);
    }

    const BatchSelection sel = apply_selector(selector, state, losses, flags);
    const SelectionMetrics sm = selection_metrics(sel.selected, flags);

    IterationRecord iter;
    iter.threshold = sel.threshold;
    iter.n_selected = sel.n_selected;
    iter.batch_size = static_cast<int>(batch_size);
    iter.precision = sm.precision;
    iter.recall = sm.recall;
    double cs = 0.0, ns = 0.0;
    std::size_t cn = 0, nn = 0;
    for (std::size_t i = 0; i < batch_size; ++i) {
      if (flags[i]) {
        ns += losses[i];
        ++nn;
      } else {
        cs += losses[i];
        ++cn;
      }
    }
    if (cn > 0) iter.mean_loss_clean = cs / static_cast<double>(cn);
    if (nn > 0) iter.mean_loss_noisy = ns / static_cast<double>(nn);
    epoch.iterations.push_back(iter);

    selected_fraction_sum += sm.selected_fraction;
    clean_sum += cs;
    noisy_sum += ns;
    clean_n += cn;
    noisy_n += nn;
  }

  epoch.avg_selected_fraction = selected_fraction_sum / static_cast<double>(n_batches);
  if (clean_n > 0) epoch.mean_loss_clean = clean_sum / static_cast<double>(clean_n);
  if (noisy_n > 0) epoch.mean_loss_noisy = noisy_sum / static_cast<double>(noisy_n);
  trace.epochs.push_back(std::move(epoch));
  trace.final_threshold_state = state;
  return trace;
}

}  // namespace adk
