#pragma once

#include "lrspgd/factored.hpp"

#include <cstdint>
#include <string>

namespace lrspgd {

/// The three probing families: Y = Z / sqrt(k) with E[Y Y^T] = I.
enum class Distribution { Rademacher, Gaussian, ScaledIdentityColumns };

const char* distribution_name(Distribution d);
Distribution parse_distribution(const std::string& name);

/// Deterministically mixes a base seed with a stream index (splitmix64).
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream);

struct ProbingMatrix {
  Matrix y;  // n x k
  Distribution distribution;
  int k;
  std::uint64_t seed;
};

/// Fresh n x k probing matrix; identical arguments give identical output.
ProbingMatrix generate_probing(Distribution distribution, Index n, int k,
                               std::uint64_t seed);

/// Monte Carlo isotropy check: max-entry | mean_s Y_s Y_s^T - I | over
/// num_samples independent draws. Decreases as O(1/sqrt(num_samples)).
double check_isotropy(Distribution distribution, Index n, int k,
                      int num_samples, std::uint64_t seed);

/// 5-sigma CLT tolerance for check_isotropy at the given parameters.
double isotropy_tolerance(Distribution distribution, Index n, int k,
                          int num_samples);

}  // namespace lrspgd
