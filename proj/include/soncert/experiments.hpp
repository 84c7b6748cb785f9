#pragma once

// Synthetic weighted datasets and the modified Rand index used to score
// certified clusterings against a generative ground truth.

#include "soncert/certify.hpp"
#include "soncert/core.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace soncert {

struct GroundTruth {
  std::vector<int> labels;  ///< generative component of each point, 1..K
  Points centers;           ///< component means (empty when not applicable)
  double component_sd = 1.0;
};

/// Points and weights before a lambda is attached.
struct Sample {
  Points a;
  Weights r;
  GroundTruth truth;

  Dataset dataset(double lambda) const { return Dataset(a, r, lambda); }
};

enum class MixtureWeights { Mixture, Component };

std::string to_string(MixtureWeights w);
MixtureWeights parse_mixture_weights(const std::string& s);

/// Standard deviation of the angle weight law for half moons.
inline constexpr double kMoonAngleSd = 3.14159265358979323846 / 5.0;

/// Normal density with mean 0 and standard deviation sd.
double normal_pdf(double x, double sd);

/// Two interlocking unit half circles, n/2 points each. Moon 1 is the upper
/// arc about (0,0); moon 2 is the lower arc about (1, 1/2). Angles are
/// uniform on [-pi/2, pi/2] and each weight is the normal(0, pi/5) density at
/// the point's angle. Throws std::invalid_argument for odd n.
Sample gen_half_moons(int n, double noise_sd, std::uint64_t seed);

/// Equal-probability mixture of two unit-variance isotropic Gaussians in R^2
/// whose means sit sep_sds apart on the first axis. Weights are the mixture
/// density (or the own-component density) at each sample.
Sample gen_gauss_mixture(int n, double sep_sds, std::uint64_t seed,
                         MixtureWeights weights = MixtureWeights::Mixture);

/// Indices within radius_sds component standard deviations of their own mean.
std::vector<int> inner_subset(const Sample& sample, double radius_sds);

/// Pairwise agreement score. Pairs touching an inconclusive cluster score 0.
/// Returns 1 for fewer than two points.
double modified_rand_index(const CandidateClustering& pred, const std::vector<int>& truth);

/// Restriction of a clustering (with its inconclusive marks) to a subset of points.
CandidateClustering restrict_clustering(const CandidateClustering& c,
                                        const std::vector<int>& subset);

}  // namespace soncert
