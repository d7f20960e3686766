#pragma once

// Deterministic toy detector and event generator for desk-scale testing.

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "evd/model.hpp"

namespace evd {

/// SplitMix64. The state advances by the golden-ratio increment before each
/// output, so identical seeds give identical streams on every platform.
struct Prng {
  std::uint64_t state = 0;

  std::uint64_t next();
  /// (next() >> 11) * 2^-53, in [0, 1).
  double uniform();
};

std::uint64_t prng_next(std::uint64_t& state);

struct ToyConfig {
  int n_tracks = 5;
  std::uint64_t seed = 42;
  double b_field = 0.5;  // tesla
  std::vector<double> layers{10, 20, 30, 40};
  double half_length_z = 100;
  std::array<double, 2> pt_range{0.2, 2.0};
  std::array<double, 2> eta_range{-1.0, 1.0};
  double smear_sigma = 0.02;
};

/// Throws evd::Error naming the offending field.
void validate_toy_config(const ToyConfig& cfg);

/// Detector "detector/barrel/layerK" tubes and one event (index 0).
///
/// Track k (id k + 1) draws from its own stream seeded with seed ^ (k + 1),
/// in the order pt, phi, eta, charge, then three Gaussian smears per hit.
/// Tracks therefore do not depend on n_tracks.
std::pair<DetectorModel, EventSet> generate_toy(const ToyConfig& cfg);

}  // namespace evd
