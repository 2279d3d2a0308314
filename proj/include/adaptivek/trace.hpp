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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "adaptivek/selectors.hpp"

namespace adk {

struct IterationRecord {
  std::optional<double> threshold;  // adaptive rule only
  int n_selected = 0;
  int batch_size = 0;
  std::optional<double> precision;  // absent when nothing was selected
  std::optional<double> recall;     // absent when the batch had no clean samples
  std::optional<double> mean_loss_clean;
  std::optional<double> mean_loss_noisy;
};

struct EpochRecord {
  std::optional<double> test_accuracy;   // absent for loss-stream runs
  std::optional<double> train_accuracy;  // absent for loss-stream runs
  std::optional<double> mean_loss_clean;
  std::optional<double> mean_loss_noisy;
  double avg_selected_fraction = 0.0;
  std::vector<IterationRecord> iterations;
};

/// Full record of one training run or loss-stream simulation.
struct RunTrace {
  std::string run_kind;  // "train" or "stream"
  SelectorConfig selector;
  std::uint64_t seed = 0;
  std::size_t vanilla_epochs = 0;  // epochs before the selector takes over
  std::size_t batch_size = 0;
  double learning_rate = 0.0;        // train runs only
  double dataset_noise_ratio = 0.0;  // realized tau (train) or mixture tau (stream)
  ThresholdState final_threshold_state;
  std::vector<EpochRecord> epochs;
};

/// Highest per-epoch test accuracy in the trace. Throws when none is present.
double max_test_accuracy(const RunTrace& trace);

/// Flat per-iteration CSV: epoch,iter,threshold,n_selected,batch_size,
/// precision,recall,mean_loss_clean,mean_loss_noisy. Absent values print as
/// empty fields; floats carry 9 significant digits.
void write_trace_csv(std::ostream& os, const RunTrace& trace);

/// JSON document: config echo + seeds at the top level, then one entry per
/// epoch with scalar metrics and its iteration records.
std::string trace_to_json(const RunTrace& trace);

}  // namespace adk
