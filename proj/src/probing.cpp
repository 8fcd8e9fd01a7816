#include "lrspgd/probing.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace lrspgd {

const char* distribution_name(Distribution d) {
  switch (d) {
    case Distribution::Rademacher: return "rademacher";
    case Distribution::Gaussian: return "gaussian";
    case Distribution::ScaledIdentityColumns: return "scaled_identity";
  }
  return "?";
}

Distribution parse_distribution(const std::string& name) {
  if (name == "rademacher") return Distribution::Rademacher;
  if (name == "gaussian") return Distribution::Gaussian;
  if (name == "scaled_identity") return Distribution::ScaledIdentityColumns;
  throw std::invalid_argument("unknown probing distribution: " + name);
}

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

ProbingMatrix generate_probing(Distribution distribution, Index n, int k,
                               std::uint64_t seed) {
  if (n < 1 || k < 1) {
    throw std::invalid_argument("generate_probing: need n >= 1 and k >= 1");
  }
  std::mt19937_64 rng(seed);
  Matrix y(n, k);
  const double inv_sqrt_k = 1.0 / std::sqrt(static_cast<double>(k));
  switch (distribution) {
    case Distribution::Rademacher: {
      std::bernoulli_distribution coin(0.5);
      for (Index j = 0; j < k; ++j) {
        for (Index i = 0; i < n; ++i) {
          y(i, j) = coin(rng) ? inv_sqrt_k : -inv_sqrt_k;
        }
      }
      break;
    }
    case Distribution::Gaussian: {
      std::normal_distribution<double> gauss(0.0, 1.0);
      for (Index j = 0; j < k; ++j) {
        for (Index i = 0; i < n; ++i) {
          y(i, j) = gauss(rng) * inv_sqrt_k;
        }
      }
      break;
    }
    case Distribution::ScaledIdentityColumns: {
      // Columns sampled with replacement from sqrt(n) * e_i.
      std::uniform_int_distribution<Index> pick(0, n - 1);
      const double value = std::sqrt(static_cast<double>(n)) * inv_sqrt_k;
      y.setZero();
      for (Index j = 0; j < k; ++j) {
        y(pick(rng), j) = value;
      }
      break;
    }
  }
  return ProbingMatrix{std::move(y), distribution, k, seed};
}

double check_isotropy(Distribution distribution, Index n, int k,
                      int num_samples, std::uint64_t seed) {
  if (num_samples < 1) {
    throw std::invalid_argument("check_isotropy: need num_samples >= 1");
  }
  Matrix mean = Matrix::Zero(n, n);
  for (int s = 0; s < num_samples; ++s) {
    ProbingMatrix y = generate_probing(distribution, n, k, split_seed(seed, s));
    mean.noalias() += y.y * y.y.transpose();
  }
  mean /= static_cast<double>(num_samples);
  return (mean - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
}

double isotropy_tolerance(Distribution distribution, Index n, int k,
                          int num_samples) {
  // Worst per-entry variance of a single Y Y^T draw is v/k with
  // v = 1 (Rademacher off-diagonal), 2 (Gaussian diagonal),
  // n-1 (scaled-identity diagonal).
  double v = 1.0;
  if (distribution == Distribution::Gaussian) v = 2.0;
  if (distribution == Distribution::ScaledIdentityColumns) {
    v = static_cast<double>(n - 1);
  }
  return 5.0 * std::sqrt(v / (static_cast<double>(k) * num_samples));
}

}  // namespace lrspgd
