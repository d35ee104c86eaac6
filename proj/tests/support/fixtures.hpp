#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include "asdal/synth.hpp"
#include "asdal/types.hpp"
#include "oracles.hpp"

namespace fixture {

inline oracle::Vec to_vec(const asdal::Embedding& e) {
  return {e.values().begin(), e.values().end()};
}

inline std::vector<oracle::Vec> to_vecs(const std::vector<asdal::Embedding>& es) {
  std::vector<oracle::Vec> out;
  for (const auto& e : es) out.push_back(to_vec(e));
  return out;
}

inline std::vector<asdal::Embedding> random_embeddings(std::mt19937_64& gen, std::size_t n,
                                                       std::size_t dim) {
  std::vector<asdal::Embedding> out;
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(oracle::random_vector(gen, dim));
  return out;
}

// Two machines with a small training pool: quick enough for per-test runs.
inline asdal::SynthConfig small_synth(std::uint64_t seed = 7) {
  asdal::SynthConfig cfg;
  cfg.dim = 16;
  cfg.machines = 2;
  cfg.source_train = 60;
  cfg.target_train = 5;
  cfg.test_normal_source = 20;
  cfg.test_normal_target = 20;
  cfg.test_anomalous = 20;
  cfg.seed = seed;
  return cfg;
}

}  // namespace fixture
