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

#include "adaptivek/metrics.hpp"

#include <stdexcept>

namespace adk {

SelectionMetrics selection_metrics(std::span<const std::uint8_t> mask,
                                   std::span<const std::uint8_t> noise_flags) {
  if (mask.size() != noise_flags.size()) throw std::invalid_argument("mask/flags length mismatch");
  if (mask.empty()) throw std::invalid_argument("empty mini-batch");

  std::size_t selected = 0, clean = 0, selected_clean = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const bool sel = mask[i] != 0;
    const bool is_clean = noise_flags[i] == 0;
    selected += sel;
    clean += is_clean;
    selected_clean += sel && is_clean;
  }

  SelectionMetrics out;
  out.selected_fraction = static_cast<double>(selected) / static_cast<double>(mask.size());
  out.clean_fraction_in_batch = static_cast<double>(clean) / static_cast<double>(mask.size());
  if (selected > 0)
    out.precision = static_cast<double>(selected_clean) / static_cast<double>(selected);
  if (clean > 0) out.recall = static_cast<double>(selected_clean) / static_cast<double>(clean);
  return out;
}

AveragedMetrics epoch_average(std::span<const SelectionMetrics> records) {
  if (records.empty()) throw std::invalid_argument("no records to average");

  AveragedMetrics out;
  double precision_sum = 0.0, recall_sum = 0.0;
  std::size_t precision_n = 0, recall_n = 0;
  double selected_sum = 0.0, clean_sum = 0.0;
  for (const SelectionMetrics& r : records) {
    if (r.precision) {
      precision_sum += *r.precision;
      ++precision_n;
    } else {
      ++out.undefined_precision;
    }
    if (r.recall) {
      recall_sum += *r.recall;
      ++recall_n;
    } else {
      ++out.undefined_recall;
    }
    selected_sum += r.selected_fraction;
    clean_sum += r.clean_fraction_in_batch;
  }
  if (precision_n > 0) out.mean.precision = precision_sum / static_cast<double>(precision_n);
  if (recall_n > 0) out.mean.recall = recall_sum / static_cast<double>(recall_n);
  out.mean.selected_fraction = selected_sum / static_cast<double>(records.size());
  out.mean.clean_fraction_in_batch = clean_sum / static_cast<double>(records.size());
  return out;
}

double estimate_noise_ratio(const RunTrace& trace, std::size_t window) {
  if (window == 0) throw std::invalid_argument("window must be positive");
  if (trace.epochs.size() < trace.vanilla_epochs)
    throw std::invalid_argument("trace shorter than its vanilla phase");
  const std::size_t selection_epochs = trace.epochs.size() - trace.vanilla_epochs;
  if (selection_epochs < window)
    throw std::invalid_argument("insufficient adaptive epochs for estimation window");

  double fraction_sum = 0.0;
  for (std::size_t i = trace.epochs.size() - window; i < trace.epochs.size(); ++i) {
    fraction_sum += trace.epochs[i].avg_selected_fraction;
  }
  return 1.0 - fraction_sum / static_cast<double>(window);
}

}  // namespace adk
