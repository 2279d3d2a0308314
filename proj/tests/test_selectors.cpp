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
#include <cstring>
#include <limits>
#include <random>
#include <vector>

#include <stdexcept>

#include <doctest.h>

#include "adaptivek/rng.hpp"

using namespace adk;

namespace {

SelectorConfig adaptive_config(ThresholdVariant variant = ThresholdVariant::RmsNormalized) {
  SelectorConfig c;
  c.kind = SelectorKind::AdaptiveK;
  c.threshold_variant = variant;
  return c;
}

std::vector<double> random_losses(std::mt19937_64& rng, std::size_t n, double lo = 0.0,
                                  double hi = 10.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> out(n);
  for (double& x : out) x = dist(rng);
  return out;
}

}  // namespace

TEST_SUITE_BEGIN("selectors");

TEST_CASE("vanilla selects everything") {
  const std::vector<double> losses{0.3, 9.1, 0.2};
  const BatchSelection sel = select_vanilla(losses);
  CHECK(sel.selected == Mask{1, 1, 1});
  CHECK(sel.n_selected == 3);
  CHECK_FALSE(sel.threshold.has_value());

  const BatchSelection single = select_vanilla(std::vector<double>{5.0});
  CHECK(single.selected == Mask{1});
  CHECK(single.n_selected == 1);
}

TEST_CASE("vanilla rejects bad input") {
  CHECK_THROWS_WITH_AS(select_vanilla({}), "empty mini-batch", std::invalid_argument);
  const std::vector<double> bad{1.0, std::numeric_limits<double>::quiet_NaN()};
  CHECK_THROWS_WITH_AS(select_vanilla(bad), "non-finite loss", std::invalid_argument);
  const std::vector<double> inf{std::numeric_limits<double>::infinity()};
  CHECK_THROWS_AS(select_vanilla(inf), std::invalid_argument);
}

TEST_CASE("mkl keeps the k smallest") {
  const std::vector<double> losses{0.1, 5.0, 0.2};
  const BatchSelection sel = select_mkl(losses, 2);
  CHECK(sel.selected == Mask{1, 0, 1});
  CHECK(sel.n_selected == 2);
  CHECK_FALSE(sel.threshold.has_value());
}

TEST_CASE("mkl breaks ties by lower index") {
  const std::vector<double> losses{1.0, 1.0, 2.0};
  const BatchSelection sel = select_mkl(losses, 1);
  CHECK(sel.selected == Mask{1, 0, 0});
}

TEST_CASE("mkl caps k at the batch size and rejects k <= 0") {
  const std::vector<double> losses{3.0, 1.0};
  CHECK(select_mkl(losses, 7).n_selected == 2);
  CHECK_THROWS_WITH_AS(select_mkl(losses, 0), "invalid k", std::invalid_argument);
  CHECK_THROWS_AS(select_mkl(losses, -2), std::invalid_argument);
}

TEST_CASE("oracle selects the complement of the noise flags") {
  const std::vector<std::uint8_t> flags{0, 1, 0};
  CHECK(select_oracle(flags).selected == Mask{1, 0, 1});

  const std::vector<std::uint8_t> all_noisy{1, 1};
  const BatchSelection none = select_oracle(all_noisy);
  CHECK(none.selected == Mask{0, 0});
  CHECK(none.n_selected == 0);

  const std::vector<std::uint8_t> all_clean(17, 0);
  CHECK(select_oracle(all_clean).n_selected == 17);
}

TEST_CASE("threshold update matches hand arithmetic on a fresh state") {
  SelectorConfig cfg = adaptive_config();
  const ThresholdUpdate upd = update_threshold(ThresholdState{}, 1.0, cfg);
  CHECK(upd.state.m == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(upd.state.v == doctest::Approx(0.001).epsilon(1e-15));
  CHECK(upd.state.step == 1);
  CHECK(upd.threshold == doctest::Approx(0.1 / (std::sqrt(0.001) + 1e-8)).epsilon(1e-15));
  CHECK(upd.threshold == doctest::Approx(3.16228).epsilon(1e-5));
}

TEST_CASE("threshold converges to ~1 on a constant stream") {
  SelectorConfig cfg = adaptive_config();
  ThresholdState state;
  double threshold = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const ThresholdUpdate upd = update_threshold(state, 2.0, cfg);
    state = upd.state;
    threshold = upd.threshold;
  }
  CHECK(state.step == 10000);
  CHECK(std::abs(threshold - 1.0) < 1e-3);
  CHECK(state.m == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(state.v == doctest::Approx(4.0).epsilon(1e-3));
}

TEST_CASE("bias-corrected variant recovers the sample value at step one") {
  SelectorConfig cfg = adaptive_config(ThresholdVariant::BiasCorrectedMean);
  const ThresholdUpdate upd = update_threshold(ThresholdState{}, 1.0, cfg);
  CHECK(upd.threshold == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("threshold update rejects negative means") {
  CHECK_THROWS_WITH_AS(update_threshold(ThresholdState{}, -0.5, adaptive_config()),
                       "negative mean loss", std::invalid_argument);
  CHECK_THROWS_AS(
      update_threshold(ThresholdState{}, std::numeric_limits<double>::quiet_NaN(),
                       adaptive_config()),
      std::invalid_argument);
}

TEST_CASE("adaptive selection on the first batch keeps small losses") {
  const std::vector<double> losses{0.5, 0.5};
  const AdaptiveSelection res = select_adaptive(losses, ThresholdState{}, adaptive_config());
  CHECK(res.state.m == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(res.state.v == doctest::Approx(0.00025).epsilon(1e-15));
  CHECK(*res.selection.threshold == doctest::Approx(3.16226).epsilon(1e-5));
  CHECK(res.selection.selected == Mask{1, 1});
}

TEST_CASE("adaptive selection rejects everything once the threshold settles below the losses") {
  // Constant losses of 2.0: the normalized threshold tends to ~1, so after
  // convergence every sample sits above it.
  SelectorConfig cfg = adaptive_config();
  ThresholdState state;
  const std::vector<double> losses(8, 2.0);
  BatchSelection last;
  for (int i = 0; i < 2000; ++i) {
    AdaptiveSelection res = select_adaptive(losses, state, cfg);
    state = res.state;
    last = std::move(res.selection);
  }
  CHECK(last.n_selected == 0);
  CHECK(std::all_of(last.selected.begin(), last.selected.end(),
                    [](std::uint8_t s) { return s == 0; }));
}

TEST_CASE("config validation") {
  SelectorConfig cfg;
  cfg.beta1 = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = SelectorConfig{};
  cfg.beta2 = 1.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = SelectorConfig{};
  cfg.epsilon = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = SelectorConfig{};
  cfg.kind = SelectorKind::MKL;
  cfg.k = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("property: permutation equivariance of every selector") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + uniform_below(rng, 24);
    const std::vector<double> losses = random_losses(rng, n);
    std::vector<std::uint8_t> flags(n);
    for (auto& f : flags) f = uniform_below(rng, 2) ? 1 : 0;
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    fisher_yates(std::span<std::size_t>(perm), rng);

    std::vector<double> permuted_losses(n);
    std::vector<std::uint8_t> permuted_flags(n);
    for (std::size_t i = 0; i < n; ++i) {
      permuted_losses[i] = losses[perm[i]];
      permuted_flags[i] = flags[perm[i]];
    }

    const int k = 1 + static_cast<int>(uniform_below(rng, n));
    const ThresholdState state{0.4, 0.3, 7};
    const SelectorConfig cfg = adaptive_config();

    const BatchSelection v = select_vanilla(losses);
    const BatchSelection vp = select_vanilla(permuted_losses);
    const BatchSelection m = select_mkl(losses, k);
    const BatchSelection mp = select_mkl(permuted_losses, k);
    const BatchSelection o = select_oracle(flags);
    const BatchSelection op = select_oracle(permuted_flags);
    const AdaptiveSelection a = select_adaptive(losses, state, cfg);
    const AdaptiveSelection ap = select_adaptive(permuted_losses, state, cfg);

    for (std::size_t i = 0; i < n; ++i) {
      REQUIRE(vp.selected[i] == v.selected[perm[i]]);
      REQUIRE(op.selected[i] == o.selected[perm[i]]);
      REQUIRE(ap.selection.selected[i] == a.selection.selected[perm[i]]);
      // Continuous draws are tie-free, so the MKL mask permutes exactly too.
      REQUIRE(mp.selected[i] == m.selected[perm[i]]);
    }
    REQUIRE(m.n_selected == mp.n_selected);
    // The threshold state update only sees the batch mean, so it is
    // order-independent up to summation order; same inputs in a different
    // order may differ in the last ulp, not more.
    REQUIRE(ap.state.step == a.state.step);
    REQUIRE(std::abs(ap.state.m - a.state.m) <= 1e-12 * (1.0 + std::abs(a.state.m)));
  }
}

TEST_CASE("property: mkl cardinality is min(k, n)") {
  std::mt19937_64 rng(102);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + uniform_below(rng, 40);
    const int k = 1 + static_cast<int>(uniform_below(rng, 50));
    const std::vector<double> losses = random_losses(rng, n);
    const BatchSelection sel = select_mkl(losses, k);
    REQUIRE(sel.n_selected == static_cast<int>(std::min<std::size_t>(k, n)));
    int count = 0;
    for (auto s : sel.selected) count += s;
    REQUIRE(count == sel.n_selected);
  }
}

TEST_CASE("property: adaptive selection is monotone in the loss") {
  std::mt19937_64 rng(103);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + uniform_below(rng, 30);
    const std::vector<double> losses = random_losses(rng, n);
    ThresholdState state{0.1 * static_cast<double>(uniform_below(rng, 30)),
                         0.01 * static_cast<double>(uniform_below(rng, 100)),
                         uniform_below(rng, 1000)};
    const AdaptiveSelection res = select_adaptive(losses, state, adaptive_config());
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        if (losses[a] <= losses[b] && res.selection.selected[b]) {
          REQUIRE(res.selection.selected[a]);
        }
      }
    }
  }
}

TEST_CASE("property: threshold update is deterministic bit-for-bit") {
  std::mt19937_64 rng(104);
  std::uniform_real_distribution<double> mean_dist(0.0, 50.0);
  for (int trial = 0; trial < 1000; ++trial) {
    ThresholdState state{mean_dist(rng), mean_dist(rng), uniform_below(rng, 100000)};
    const double mu = mean_dist(rng);
    SelectorConfig cfg = adaptive_config(uniform_below(rng, 2) ? ThresholdVariant::RmsNormalized
                                                               : ThresholdVariant::BiasCorrectedMean);
    const ThresholdUpdate a = update_threshold(state, mu, cfg);
    const ThresholdUpdate b = update_threshold(state, mu, cfg);
    REQUIRE(std::memcmp(&a.state, &b.state, sizeof a.state) == 0);
    REQUIRE(std::memcmp(&a.threshold, &b.threshold, sizeof a.threshold) == 0);
  }
}

TEST_CASE("property: moving averages stay inside the input envelope") {
  std::mt19937_64 rng(105);
  for (int trial = 0; trial < 200; ++trial) {
    const double lo = 0.5 + 0.01 * static_cast<double>(uniform_below(rng, 100));
    const double hi = lo + 0.01 + 0.01 * static_cast<double>(uniform_below(rng, 400));
    std::uniform_real_distribution<double> dist(lo, hi);
    SelectorConfig cfg = adaptive_config();
    ThresholdState state;
    const int steps = 1 + static_cast<int>(uniform_below(rng, 400));
    for (int t = 0; t < steps; ++t) state = update_threshold(state, dist(rng), cfg).state;

    const double t = static_cast<double>(steps);
    const double m_lower = lo * (1.0 - std::pow(cfg.beta1, t));
    const double v_lower = lo * lo * (1.0 - std::pow(cfg.beta2, t));
    REQUIRE(state.m >= m_lower - 1e-12);
    REQUIRE(state.m <= hi + 1e-12);
    REQUIRE(state.v >= v_lower - 1e-12);
    REQUIRE(state.v <= hi * hi * (1.0 + 1e-12));
  }
}

TEST_CASE("apply_selector dispatches and advances state only for the adaptive rule") {
  const std::vector<double> losses{0.2, 3.0, 0.4};
  const std::vector<std::uint8_t> flags{0, 1, 0};
  ThresholdState state;

  SelectorConfig cfg;
  cfg.kind = SelectorKind::Oracle;
  CHECK(apply_selector(cfg, state, losses, flags).selected == Mask{1, 0, 1});
  CHECK(state.step == 0);

  cfg.kind = SelectorKind::MKL;
  cfg.k = 2;
  CHECK(apply_selector(cfg, state, losses, flags).selected == Mask{1, 0, 1});
  CHECK(state.step == 0);

  cfg.kind = SelectorKind::AdaptiveK;
  const BatchSelection sel = apply_selector(cfg, state, losses, flags);
  CHECK(state.step == 1);
  CHECK(sel.threshold.has_value());
}

TEST_SUITE_END();
