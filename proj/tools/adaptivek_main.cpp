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

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "adaptivek/dataset.hpp"
#include "adaptivek/metrics.hpp"
#include "adaptivek/mlp.hpp"
#include "adaptivek/numfmt.hpp"
#include "adaptivek/rng.hpp"
#include "adaptivek/selectors.hpp"
#include "adaptivek/stream.hpp"
#include "adaptivek/theory.hpp"
#include "adaptivek/trace.hpp"
#include "adaptivek/trainer.hpp"

namespace fs = std::filesystem;

namespace {

// Everything the run writes is tracked so a failing command can remove its
// partial outputs before exiting nonzero.
struct OutputTracker {
  std::vector<fs::path> written;

  void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open output file: " + path.string());
    os << content;
    os.flush();
    if (!os.good()) throw std::runtime_error("failed writing output file: " + path.string());
    written.push_back(path);
  }

  void remove_all() {
    std::error_code ec;
    for (const fs::path& p : written) fs::remove(p, ec);
    written.clear();
  }
};

struct GlobalOptions {
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  std::string format = "csv";
};

struct TheoryOptions {
  adk::GaussianMixture point;
  int n = 10;
  int k = 6;
  double mu2_min = 0.0, mu2_max = 8.0, mu2_step = 0.1;
  double sigma2_min = 0.25, sigma2_max = 4.0, sigma2_step = 0.125;
  std::vector<double> taus = {0.1, 0.2, 0.3, 0.4};
  bool point_only = false;
  bool curves = false;
};

struct SimulateOptions {
  adk::GaussianMixture gm;
  std::string selector = "adaptive";
  int k = 6;
  std::size_t batches = 10000;
  std::size_t batch_size = 100;
  double beta1 = 0.9, beta2 = 0.999, epsilon = 1e-8;
  std::string variant = "bias-corrected-mean";
};

struct TrainOptions {
  std::vector<std::string> selectors = {"oracle", "vanilla", "mkl", "adaptive"};
  double tau = 0.4;
  std::string noise_mode = "directed";
  int seeds = 3;
  std::size_t train_samples = 5000;
  std::size_t test_samples = 2000;
  int classes = 4;
  std::size_t features = 2;
  double separation = 4.25;
  std::size_t hidden = 64;
  std::size_t vanilla_epochs = 10;
  std::size_t adaptive_epochs = 20;
  std::size_t batch_size = 32;
  double learning_rate = 0.5;
  bool warm_ema = false;
  int mkl_k = 0;  // 0 = derive from tau: round((1 - tau) * batch_size)
  double beta1 = 0.9, beta2 = 0.999, epsilon = 1e-8;
  std::string variant = "rms-normalized";
  std::size_t est_window = 10;
};

adk::SelectorKind parse_kind(const std::string& name) {
  if (name == "vanilla") return adk::SelectorKind::Vanilla;
  if (name == "oracle") return adk::SelectorKind::Oracle;
  if (name == "mkl") return adk::SelectorKind::MKL;
  if (name == "adaptive") return adk::SelectorKind::AdaptiveK;
  throw CLI::ValidationError("selector", "unknown selector: " + name);
}

adk::ThresholdVariant parse_variant(const std::string& name) {
  if (name == "rms-normalized") return adk::ThresholdVariant::RmsNormalized;
  if (name == "bias-corrected-mean") return adk::ThresholdVariant::BiasCorrectedMean;
  throw CLI::ValidationError("variant", "unknown threshold variant: " + name);
}

void print_report(const adk::MseReport& r) {
  std::cout << "params: mu1=" << adk::format_g9(r.params.mu1)
            << " sigma1=" << adk::format_g9(r.params.sigma1)
            << " mu2=" << adk::format_g9(r.params.mu2)
            << " sigma2=" << adk::format_g9(r.params.sigma2)
            << " tau=" << adk::format_g9(r.params.tau) << " n=" << r.n << " k=" << r.k << "\n";
  std::cout << "mse_sgd=" << adk::format_g9(r.mse_sgd) << " mse_mkl=" << adk::format_g9(r.mse_mkl)
            << " mse_adk=" << adk::format_g9(r.mse_adk) << "\n";
}

void run_theory(const GlobalOptions& global, const TheoryOptions& opt, OutputTracker& outputs) {
  print_report(adk::mse_report(opt.point, opt.n, opt.k));
  if (opt.point_only) return;

  const std::vector<adk::AxisSpec> axes = {
      {adk::SweepParam::Mu2, opt.mu2_min, opt.mu2_max, opt.mu2_step},
      {adk::SweepParam::Sigma2, opt.sigma2_min, opt.sigma2_max, opt.sigma2_step},
  };

  std::ostringstream csv;
  bool first = true;
  for (double tau : opt.taus) {
    adk::GaussianMixture base = opt.point;
    base.tau = tau;
    const adk::SurfaceGrid grid = adk::mse_surface(axes, base, opt.n, opt.k);
    std::ostringstream chunk;
    adk::write_surface_csv(chunk, grid);
    std::string text = chunk.str();
    if (!first) text.erase(0, text.find('\n') + 1);  // keep a single header
    csv << text;
    first = false;
  }
  outputs.write_file(fs::path(global.out_dir) / "surface.csv", csv.str());

  if (opt.curves) {
    const double smax = std::max(opt.point.sigma1, opt.point.sigma2);
    const double lo = std::min(opt.point.mu1, opt.point.mu2) - 4.0 * smax;
    const double hi = std::max(opt.point.mu1, opt.point.mu2) + 4.0 * smax;
    constexpr int kPoints = 601;
    std::ostringstream curves;
    curves << "x,f_D,f_MKL,f_adk\n";
    for (int i = 0; i < kPoints; ++i) {
      const double x = lo + (hi - lo) * i / (kPoints - 1);
      curves << adk::format_g9(x) << ',' << adk::format_g9(adk::mixture_pdf(opt.point, x)) << ','
             << adk::format_g9(adk::mkl_pdf(opt.point, opt.n, opt.k, x)) << ','
             << adk::format_g9(adk::adaptive_pdf(opt.point, x)) << '\n';
    }
    outputs.write_file(fs::path(global.out_dir) / "pdf_curves.csv", curves.str());
  }
}

void run_simulate(const GlobalOptions& global, const SimulateOptions& opt,
                  OutputTracker& outputs) {
  adk::SelectorConfig config;
  config.kind = parse_kind(opt.selector);
  config.k = opt.k;
  config.beta1 = opt.beta1;
  config.beta2 = opt.beta2;
  config.epsilon = opt.epsilon;
  config.threshold_variant = parse_variant(opt.variant);

  const adk::RunTrace trace =
      adk::simulate_stream(opt.gm, opt.batches, opt.batch_size, config, global.seed);

  std::ostringstream csv;
  adk::write_trace_csv(csv, trace);
  outputs.write_file(fs::path(global.out_dir) / "stream.csv", csv.str());
  if (global.format == "json" || global.format == "both") {
    outputs.write_file(fs::path(global.out_dir) / "stream.json", adk::trace_to_json(trace));
  }

  // Long-run summary over the second half of the stream.
  const auto& iters = trace.epochs.front().iterations;
  const std::size_t start = iters.size() / 2;
  std::vector<adk::SelectionMetrics> window;
  for (std::size_t i = start; i < iters.size(); ++i) {
    adk::SelectionMetrics m;
    m.precision = iters[i].precision;
    m.recall = iters[i].recall;
    m.selected_fraction =
        static_cast<double>(iters[i].n_selected) / static_cast<double>(iters[i].batch_size);
    window.push_back(m);
  }
  const adk::AveragedMetrics avg = adk::epoch_average(window);
  char line[160];
  std::snprintf(line, sizeof(line),
                "long-run (last %zu batches): precision=%.3f recall=%.3f selected_fraction=%.3f\n",
                window.size(), avg.mean.precision.value_or(std::nan("")),
                avg.mean.recall.value_or(std::nan("")), avg.mean.selected_fraction);
  std::cout << line;
}

void run_train(const GlobalOptions& global, const TrainOptions& opt, OutputTracker& outputs) {
  const adk::NoiseMode mode = [&] {
    if (opt.noise_mode == "directed") return adk::NoiseMode::Directed;
    if (opt.noise_mode == "symmetric") return adk::NoiseMode::Symmetric;
    throw CLI::ValidationError("noise-mode", "unknown noise mode: " + opt.noise_mode);
  }();
  if (opt.seeds < 1) throw std::runtime_error("seeds must be at least 1");

  std::ostringstream summary;
  summary << "selector,tau,seed,max_test_acc,est_noise_ratio\n";

  for (const std::string& selector_name : opt.selectors) {
    const adk::SelectorKind kind = parse_kind(selector_name);
    for (int s = 0; s < opt.seeds; ++s) {
      const std::uint64_t run_seed = global.seed + static_cast<std::uint64_t>(s);

      const adk::NoisyDataset clean_train = adk::make_blobs(
          opt.train_samples, opt.features, opt.classes, opt.separation,
          adk::derive_seed(run_seed, 0x7472));
      const adk::NoisyDataset train_set =
          adk::inject_noise(clean_train, opt.tau, mode, adk::derive_seed(run_seed, 0x6e6f));
      const adk::NoisyDataset test_set = adk::make_blobs(
          opt.test_samples, opt.features, opt.classes, opt.separation,
          adk::derive_seed(run_seed, 0x7465));

      adk::SelectorConfig config;
      config.kind = kind;
      config.beta1 = opt.beta1;
      config.beta2 = opt.beta2;
      config.epsilon = opt.epsilon;
      config.threshold_variant = parse_variant(opt.variant);
      config.k = opt.mkl_k > 0
                     ? opt.mkl_k
                     : std::max(1, static_cast<int>(std::llround(
                                       (1.0 - opt.tau) * static_cast<double>(opt.batch_size))));

      adk::TrainSchedule schedule;
      schedule.vanilla_epochs = opt.vanilla_epochs;
      schedule.adaptive_epochs = opt.adaptive_epochs;
      schedule.batch_size = opt.batch_size;
      schedule.learning_rate = opt.learning_rate;
      schedule.seed = run_seed;
      schedule.warm_ema = opt.warm_ema;

      adk::MlpConfig model_config;
      model_config.hidden_width = opt.hidden;

      const adk::RunTrace trace = adk::train(train_set, model_config, schedule, config, test_set);

      const std::string stem = "trace_" + selector_name + "_tau" + adk::format_g9(opt.tau) +
                               "_seed" + std::to_string(run_seed);
      if (global.format == "csv" || global.format == "both") {
        std::ostringstream csv;
        adk::write_trace_csv(csv, trace);
        outputs.write_file(fs::path(global.out_dir) / (stem + ".csv"), csv.str());
      }
      if (global.format == "json" || global.format == "both") {
        outputs.write_file(fs::path(global.out_dir) / (stem + ".json"), adk::trace_to_json(trace));
      }

      const double max_acc = adk::max_test_accuracy(trace);
      std::string est;
      if (opt.adaptive_epochs > 0) {
        const std::size_t window = std::min(opt.est_window, opt.adaptive_epochs);
        est = adk::format_g9(adk::estimate_noise_ratio(trace, window));
      }
      summary << selector_name << ',' << adk::format_g9(opt.tau) << ',' << run_seed << ','
              << adk::format_g9(max_acc) << ',' << est << '\n';
      std::cout << "run selector=" << selector_name << " tau=" << adk::format_g9(opt.tau)
                << " seed=" << run_seed << " max_test_acc=" << adk::format_g9(max_acc)
                << (est.empty() ? "" : " est_noise_ratio=" + est) << "\n";
    }
  }

  outputs.write_file(fs::path(global.out_dir) / "summary.csv", summary.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sample-selection toolkit for training on label-noisy data"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from an INI/TOML config file");
  app.allow_config_extras(false);

  GlobalOptions global;
  app.add_option("--out", global.out_dir, "Output directory")->capture_default_str();
  app.add_option("--seed", global.seed, "Base seed")->capture_default_str();
  app.add_option("--format", global.format, "Trace file format")
      ->check(CLI::IsMember({"csv", "json", "both"}))
      ->capture_default_str();

  TheoryOptions theory;
  CLI::App* theory_cmd =
      app.add_subcommand("theory", "Evaluate selection-rule MSEs over mixture parameter grids");
  theory_cmd->fallthrough();
  theory_cmd->add_option("--mu1", theory.point.mu1, "Clean-loss mean")->capture_default_str();
  theory_cmd->add_option("--sigma1", theory.point.sigma1, "Clean-loss sigma")->capture_default_str();
  theory_cmd->add_option("--mu2", theory.point.mu2, "Noisy-loss mean")->capture_default_str();
  theory_cmd->add_option("--sigma2", theory.point.sigma2, "Noisy-loss sigma")->capture_default_str();
  theory_cmd->add_option("--tau", theory.point.tau, "Noise ratio at the report point")
      ->capture_default_str();
  theory_cmd->add_option("--n", theory.n, "Mini-batch size")->capture_default_str();
  theory_cmd->add_option("--k", theory.k, "Smallest-loss samples kept")->capture_default_str();
  theory_cmd->add_option("--mu2-min", theory.mu2_min)->capture_default_str();
  theory_cmd->add_option("--mu2-max", theory.mu2_max)->capture_default_str();
  theory_cmd->add_option("--mu2-step", theory.mu2_step)->capture_default_str();
  theory_cmd->add_option("--sigma2-min", theory.sigma2_min)->capture_default_str();
  theory_cmd->add_option("--sigma2-max", theory.sigma2_max)->capture_default_str();
  theory_cmd->add_option("--sigma2-step", theory.sigma2_step)->capture_default_str();
  theory_cmd->add_option("--taus", theory.taus, "Noise ratios to sweep")
      ->delimiter(',')
      ->capture_default_str();
  theory_cmd->add_flag("--point-only", theory.point_only, "Only print the report point");
  theory_cmd->add_flag("--curves", theory.curves, "Also write pdf_curves.csv");

  SimulateOptions simulate;
  CLI::App* sim_cmd =
      app.add_subcommand("simulate", "Run a selector on synthetic mixture loss streams");
  sim_cmd->fallthrough();
  sim_cmd->add_option("--mu1", simulate.gm.mu1)->capture_default_str();
  sim_cmd->add_option("--sigma1", simulate.gm.sigma1)->capture_default_str();
  sim_cmd->add_option("--mu2", simulate.gm.mu2)->capture_default_str();
  sim_cmd->add_option("--sigma2", simulate.gm.sigma2)->capture_default_str();
  sim_cmd->add_option("--tau", simulate.gm.tau)->capture_default_str();
  sim_cmd->add_option("--selector", simulate.selector, "vanilla|oracle|mkl|adaptive")
      ->check(CLI::IsMember({"vanilla", "oracle", "mkl", "adaptive"}))
      ->capture_default_str();
  sim_cmd->add_option("--k", simulate.k, "MKL keep count")->capture_default_str();
  sim_cmd->add_option("--batches", simulate.batches)->capture_default_str();
  sim_cmd->add_option("--batch-size", simulate.batch_size)->capture_default_str();
  sim_cmd->add_option("--beta1", simulate.beta1)->capture_default_str();
  sim_cmd->add_option("--beta2", simulate.beta2)->capture_default_str();
  sim_cmd->add_option("--epsilon", simulate.epsilon)->capture_default_str();
  sim_cmd->add_option("--variant", simulate.variant, "Adaptive threshold variant")
      ->check(CLI::IsMember({"rms-normalized", "bias-corrected-mean"}))
      ->capture_default_str();

  TrainOptions train;
  CLI::App* train_cmd =
      app.add_subcommand("train", "Train classifiers on noisy blobs with each selector");
  train_cmd->fallthrough();
  train_cmd->add_option("--selectors", train.selectors, "Selectors to run")
      ->delimiter(',')
      ->check(CLI::IsMember({"vanilla", "oracle", "mkl", "adaptive"}))
      ->capture_default_str();
  train_cmd->add_option("--tau", train.tau, "Injected noise ratio")->capture_default_str();
  train_cmd->add_option("--noise-mode", train.noise_mode, "directed|symmetric")
      ->check(CLI::IsMember({"directed", "symmetric"}))
      ->capture_default_str();
  train_cmd->add_option("--seeds", train.seeds, "Number of runs per selector")
      ->capture_default_str();
  train_cmd->add_option("--train-samples", train.train_samples)->capture_default_str();
  train_cmd->add_option("--test-samples", train.test_samples)->capture_default_str();
  train_cmd->add_option("--classes", train.classes)->capture_default_str();
  train_cmd->add_option("--features", train.features)->capture_default_str();
  train_cmd->add_option("--separation", train.separation, "Distance between class centers")
      ->capture_default_str();
  train_cmd->add_option("--hidden", train.hidden, "Hidden layer width")->capture_default_str();
  train_cmd->add_option("--vanilla-epochs", train.vanilla_epochs)->capture_default_str();
  train_cmd->add_option("--adaptive-epochs", train.adaptive_epochs)->capture_default_str();
  train_cmd->add_option("--batch-size", train.batch_size)->capture_default_str();
  train_cmd->add_option("--lr", train.learning_rate)->capture_default_str();
  train_cmd->add_flag("--warm-ema", train.warm_ema,
                      "Feed the threshold averages during the vanilla phase");
  train_cmd->add_option("--mkl-k", train.mkl_k, "MKL keep count (0 = from tau)")
      ->capture_default_str();
  train_cmd->add_option("--beta1", train.beta1)->capture_default_str();
  train_cmd->add_option("--beta2", train.beta2)->capture_default_str();
  train_cmd->add_option("--epsilon", train.epsilon)->capture_default_str();
  train_cmd->add_option("--variant", train.variant, "Adaptive threshold variant")
      ->check(CLI::IsMember({"rms-normalized", "bias-corrected-mean"}))
      ->capture_default_str();
  train_cmd->add_option("--est-window", train.est_window,
                        "Epochs in the noise-ratio estimation window")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  OutputTracker outputs;
  try {
    if (theory_cmd->parsed()) run_theory(global, theory, outputs);
    if (sim_cmd->parsed()) run_simulate(global, simulate, outputs);
    if (train_cmd->parsed()) run_train(global, train, outputs);
  } catch (const std::exception& e) {
    outputs.remove_all();
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
