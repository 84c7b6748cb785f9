#include "soncert/experiments.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace soncert {

std::string to_string(MixtureWeights w) {
  return w == MixtureWeights::Mixture ? "mixture" : "component";
}

MixtureWeights parse_mixture_weights(const std::string& s) {
  if (s == "mixture") return MixtureWeights::Mixture;
  if (s == "component") return MixtureWeights::Component;
  throw std::invalid_argument("unknown weight mode '" + s + "' (expected mixture|component)");
}

double normal_pdf(double x, double sd) {
  const double z = x / sd;
  return std::exp(-0.5 * z * z) / (std::sqrt(2.0 * std::numbers::pi) * sd);
}

Sample gen_half_moons(int n, double noise_sd, std::uint64_t seed) {
  if (n <= 0 || n % 2 != 0) throw std::invalid_argument("half moons need a positive even n");
  if (!(noise_sd >= 0.0)) throw std::invalid_argument("noise sd must be non-negative");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(-std::numbers::pi / 2, std::numbers::pi / 2);
  std::normal_distribution<double> noise(0.0, 1.0);

  Sample s;
  s.a.resize(n, 2);
  s.r.resize(n);
  s.truth.labels.resize(n);
  s.truth.centers = Points{{0.0, 0.0}, {1.0, 0.5}};
  const int half = n / 2;
  for (int i = 0; i < n; ++i) {
    const int moon = i < half ? 1 : 2;
    const double theta = angle(rng);
    const double phi = theta + std::numbers::pi / 2;
    double px = std::cos(phi);
    double py = std::sin(phi);
    if (moon == 2) {
      px = 1.0 - px;
      py = 0.5 - py;
    }
    const double ex = noise(rng);
    const double ey = noise(rng);
    s.a(i, 0) = px + noise_sd * ex;
    s.a(i, 1) = py + noise_sd * ey;
    s.r[i] = normal_pdf(theta, kMoonAngleSd);
    s.truth.labels[i] = moon;
  }
  return s;
}

namespace {

double bivariate_pdf(const Eigen::Ref<const Point>& v) {
  return std::exp(-0.5 * v.squaredNorm()) / (2.0 * std::numbers::pi);
}

}  // namespace

Sample gen_gauss_mixture(int n, double sep_sds, std::uint64_t seed, MixtureWeights weights) {
  if (n <= 0) throw std::invalid_argument("mixture needs n >= 1");
  if (!(sep_sds > 0.0)) throw std::invalid_argument("mean separation must be positive");

  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Sample s;
  s.truth.centers = Points{{-sep_sds / 2, 0.0}, {sep_sds / 2, 0.0}};
  s.truth.component_sd = 1.0;
  s.a.resize(n, 2);
  s.r.resize(n);
  s.truth.labels.resize(n);
  for (int i = 0; i < n; ++i) {
    const int label = coin(rng) ? 2 : 1;
    const double gx = gauss(rng);
    const double gy = gauss(rng);
    s.a(i, 0) = s.truth.centers(label - 1, 0) + gx;
    s.a(i, 1) = s.truth.centers(label - 1, 1) + gy;
    s.truth.labels[i] = label;
    const Point p = s.a.row(i);
    if (weights == MixtureWeights::Mixture) {
      s.r[i] = 0.5 * bivariate_pdf(p - s.truth.centers.row(0)) +
               0.5 * bivariate_pdf(p - s.truth.centers.row(1));
    } else {
      s.r[i] = bivariate_pdf(p - s.truth.centers.row(label - 1));
    }
  }
  return s;
}

std::vector<int> inner_subset(const Sample& sample, double radius_sds) {
  if (sample.truth.centers.rows() == 0) {
    throw std::invalid_argument("sample has no component means");
  }
  const double radius = radius_sds * sample.truth.component_sd;
  std::vector<int> out;
  for (Eigen::Index i = 0; i < sample.a.rows(); ++i) {
    const int label = sample.truth.labels[i];
    if ((sample.a.row(i) - sample.truth.centers.row(label - 1)).norm() <= radius) {
      out.push_back(static_cast<int>(i));
    }
  }
  return out;
}

double modified_rand_index(const CandidateClustering& pred, const std::vector<int>& truth) {
  const std::size_t n = truth.size();
  if (pred.assignment.size() != n) {
    throw DimensionError("predicted and true clusterings differ in length");
  }
  if (n < 2) return 1.0;
  std::vector<char> excluded(n, 0);
  for (std::size_t i = 0; i < n; ++i) excluded[i] = pred.inconclusive.count(pred.assignment[i]) > 0;

  std::int64_t agree = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (excluded[i]) continue;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (excluded[j]) continue;
      const bool same_pred = pred.assignment[i] == pred.assignment[j];
      const bool same_truth = truth[i] == truth[j];
      if (same_pred == same_truth) ++agree;
    }
  }
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  return static_cast<double>(agree) / pairs;
}

CandidateClustering restrict_clustering(const CandidateClustering& c,
                                        const std::vector<int>& subset) {
  // Original ids are kept so inconclusive marks carry over; clusters with no
  // member in the subset stay empty.
  CandidateClustering out;
  out.clusters.resize(c.clusters.size());
  out.inconclusive = c.inconclusive;
  out.assignment.reserve(subset.size());
  for (int i : subset) {
    const int id = c.assignment.at(i);
    out.clusters[id].push_back(static_cast<int>(out.assignment.size()));
    out.assignment.push_back(id);
  }
  return out;
}

}  // namespace soncert
