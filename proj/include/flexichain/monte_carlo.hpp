/*
 * Copyright 2026 The FlexiChain Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

#include "flexichain/error.hpp"
#include "flexichain/secmodel.hpp"

namespace flexi::netsim {

/// Trials are grouped into fixed-size chunks; chunk k draws from an engine
/// seeded by (seed, k), so the estimate does not depend on thread count.
inline constexpr std::uint64_t kMonteCarloChunk = 4096;

struct MonteCarloResult {
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;

  double probability() const { return trials == 0 ? 0.0 : static_cast<double>(successes) / trials; }
};

/// Samples the staged attack: one Bernoulli(A) gate followed by n
/// independent Bernoulli(x) per-node stages, all of which must succeed.
inline MonteCarloResult monte_carlo_attack(const secmodel::AttackFactors& factors, int n, std::uint64_t trials,
                                           std::uint64_t seed, unsigned threads = 0) {
  if (!(factors.amplitude >= 0.0 && factors.amplitude <= 1.0) ||
      !(factors.per_node >= 0.0 && factors.per_node <= 1.0)) {
    fail(ErrorCode::DomainError, "probabilities must lie in [0, 1]");
  }
  if (n < 1) fail(ErrorCode::DomainError, "node count must be >= 1");
  if (trials < 1) fail(ErrorCode::DomainError, "need at least one trial");

  const std::uint64_t chunks = (trials + kMonteCarloChunk - 1) / kMonteCarloChunk;
  std::vector<std::uint64_t> per_chunk(chunks, 0);

  auto run_chunk = [&](std::uint64_t k) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
    std::mt19937_64 rng(seq);
    std::bernoulli_distribution gate(factors.amplitude);
    std::bernoulli_distribution stage(factors.per_node);
    const std::uint64_t begin = k * kMonteCarloChunk;
    const std::uint64_t end = std::min(trials, begin + kMonteCarloChunk);
    std::uint64_t hits = 0;
    for (std::uint64_t t = begin; t < end; ++t) {
      if (!gate(rng)) continue;
      bool all = true;
      for (int i = 0; i < n && all; ++i) all = stage(rng);
      hits += all ? 1 : 0;
    }
    per_chunk[k] = hits;
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, chunks));
  if (threads <= 1) {
    for (std::uint64_t k = 0; k < chunks; ++k) run_chunk(k);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        for (std::uint64_t k = w; k < chunks; k += threads) run_chunk(k);
      });
    }
    for (auto& t : pool) t.join();
  }

  MonteCarloResult r;
  r.trials = trials;
  for (auto h : per_chunk) r.successes += h;
  return r;
}

/// Three binomial standard deviations around p for T trials.
inline double three_sigma(double p, std::uint64_t trials) {
  return 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

}  // namespace flexi::netsim
