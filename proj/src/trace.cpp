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

#include "adaptivek/trace.hpp"

#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "adaptivek/numfmt.hpp"

namespace adk {

double max_test_accuracy(const RunTrace& trace) {
  bool found = false;
  double best = 0.0;
  for (const EpochRecord& e : trace.epochs) {
    if (e.test_accuracy && (!found || *e.test_accuracy > best)) {
      best = *e.test_accuracy;
      found = true;
    }
  }
  if (!found) throw std::invalid_argument("trace has no test accuracies");
  return best;
}

namespace {

void put_optional(std::ostream& os, const std::optional<double>& value) {
  if (value) os << format_g9(*value);
}

nlohmann::json json_optional(const std::optional<double>& value) {
  if (value) return *value;
  return nullptr;
}

}  // namespace

void write_trace_csv(std::ostream& os, const RunTrace& trace) {
  os << "epoch,iter,threshold,n_selected,batch_size,precision,recall,"
        "mean_loss_clean,mean_loss_noisy\n";
  for (std::size_t e = 0; e < trace.epochs.size(); ++e) {
    const EpochRecord& epoch = trace.epochs[e];
    for (std::size_t i = 0; i < epoch.iterations.size(); ++i) {
      const IterationRecord& it = epoch.iterations[i];
      os << (e + 1) << ',' << (i + 1) << ',';
      put_optional(os, it.threshold);
      os << ',' << it.n_selected << ',' << it.batch_size << ',';
      put_optional(os, it.precision);
      os << ',';
      put_optional(os, it.recall);
      os << ',';
      put_optional(os, it.mean_loss_clean);
      os << ',';
      put_optional(os, it.mean_loss_noisy);
      os << '\n';
    }
  }
}

std::string trace_to_json(const RunTrace& trace) {
  nlohmann::json doc;
  doc["run_kind"] = trace.run_kind;
  doc["seed"] = trace.seed;
  doc["vanilla_epochs"] = trace.vanilla_epochs;
  doc["batch_size"] = trace.batch_size;
  doc["learning_rate"] = trace.learning_rate;
  doc["dataset_noise_ratio"] = trace.dataset_noise_ratio;
  doc["selector"] = {
      {"kind", to_string(trace.selector.kind)},
      {"k", trace.selector.k},
      {"beta1", trace.selector.beta1},
      {"beta2", trace.selector.beta2},
      {"epsilon", trace.selector.epsilon},
      {"threshold_variant", to_string(trace.selector.threshold_variant)},
  };
  doc["final_threshold_state"] = {
      {"m", trace.final_threshold_state.m},
      {"v", trace.final_threshold_state.v},
      {"step", trace.final_threshold_state.step},
  };

  nlohmann::json epochs = nlohmann::json::array();
  for (const EpochRecord& e : trace.epochs) {
    nlohmann::json epoch;
    epoch["test_accuracy"] = json_optional(e.test_accuracy);
    epoch["train_accuracy"] = json_optional(e.train_accuracy);
    epoch["mean_loss_clean"] = json_optional(e.mean_loss_clean);
    epoch["mean_loss_noisy"] = json_optional(e.mean_loss_noisy);
    epoch["avg_selected_fraction"] = e.avg_selected_fraction;
    nlohmann::json iters = nlohmann::json::array();
    for (const IterationRecord& it : e.iterations) {
      iters.push_back({
          {"threshold", json_optional(it.threshold)},
          {"n_selected", it.n_selected},
          {"batch_size", it.batch_size},
          {"precision", json_optional(it.precision)},
          {"recall", json_optional(it.recall)},
      });
    }
    epoch["iterations"] = std::move(iters);
    epochs.push_back(std::move(epoch));
  }
  doc["epochs"] = std::move(epochs);
  return doc.dump(2) + "\n";
}

}  // namespace adk
