#pragma once

// Clustering test. From a feasible conic point with duality gap mu:
//
//   * candidate clusters come from either a mu^{3/4} ball sweep or the
//     connected components of the solver's prox graph;
//   * each candidate C gets the family q_ij (i<j in C), which always solves
//       a_i - (1/r'_C) sum_{l in C} r_l a_l = sum_{j in C} r_j q_<ij>;
//     ||q_ij|| <= lambda then proves C lies inside one optimal cluster;
//   * each pair of candidates with weighted scatter D > 2 mu cannot share
//     an optimal cluster.
//
// Passing both conditions everywhere proves the candidate partition equals
// the partition of the exact minimizer.

#include "soncert/admm.hpp"
#include "soncert/core.hpp"
#include "soncert/socp.hpp"

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace soncert {

enum class ClusterMethod { Ball, Graph };

std::string to_string(ClusterMethod m);
ClusterMethod parse_cluster_method(const std::string& s);

/// A partition of {0..n-1}. Cluster ids are ordered by smallest member.
struct CandidateClustering {
  std::vector<int> assignment;            ///< point -> cluster id
  std::vector<std::vector<int>> clusters; ///< ascending members per cluster
  std::set<int> inconclusive;             ///< ids of clusters that failed a check

  int size() const { return static_cast<int>(clusters.size()); }

  /// Canonical clustering from arbitrary labels (relabelled by first occurrence).
  static CandidateClustering from_labels(const std::vector<int>& labels);
  /// Builds from member lists; throws std::invalid_argument unless they partition [n].
  static CandidateClustering from_clusters(int n, std::vector<std::vector<int>> clusters);
};

/// True when every cluster of `fine` lies inside one cluster of `coarse`.
bool refines(const CandidateClustering& fine, const CandidateClustering& coarse);
bool same_partition(const CandidateClustering& a, const CandidateClustering& b);

/// q_ij for i<j inside one candidate cluster; local indices follow `members`.
struct CgrTable {
  std::vector<int> members;
  EdgeTable q;
};

struct CgrResult {
  bool pass = true;
  double max_norm = 0.0;
};

struct PairSeparation {
  int first = 0;
  int second = 0;
  double scatter = 0.0;  ///< D_{k,k'}
  bool pass = true;
};

struct ClusterCheck {
  std::vector<int> members;
  double max_q_norm = 0.0;
  bool cgr_pass = true;
  double identity_residual = 0.0;  ///< max_i ||a_i - abar_C - sum_j r_j q_<ij>||
  EdgeTable q;
};

struct Certificate {
  enum class Verdict { Success, Failure };

  double lambda = 0.0;
  double nu = 0.0;
  std::int64_t iteration = 0;
  ClusterMethod method = ClusterMethod::Graph;

  double mu = 0.0;
  double mu_rounding = 0.0;  ///< separation compares D against 2 (mu + mu_rounding)
  CandidateClustering clustering;
  std::vector<ClusterCheck> clusters;
  std::vector<PairSeparation> pairs;
  Points omega;
  Verdict verdict = Verdict::Failure;

  // The certified primal/dual pair (delta already clamped to feasibility).
  Points x;
  EdgeTable delta;

  // Diagnostics gathered at the same lifted point.
  double gap_identity_error = 0.0;
  double max_identity_residual = 0.0;
  ResidualBoundReport bounds;

  bool success() const { return verdict == Verdict::Success; }
};

/// Greedy sweep in ascending index order with radius mu^{3/4}.
CandidateClustering find_clusters_ball(const Points& x, double mu);

/// Connected components of the graph with an edge wherever
/// prox_{lambda/nu}(x_i - x_j - delta_ij / nu) is exactly zero.
CandidateClustering find_clusters_graph(const PrimalDualIterate& state, double lambda, double nu);

/// omega_i = (sigma3_i / s_i) z_i + sigma2_i / s_i.
Points compute_omega(const SocpPoint& p, const Residuals& res);

/// q_ij = -delta_ij + (x_i - x_j - omega_i + omega_j)/r'
///        - (1/r') sum_{k not in C} r_k (delta_<ik> - delta_<jk>)
CgrTable compute_cgr(const Dataset& ds, const SocpPoint& p, const Points& omega,
                     const std::vector<int>& members);

/// max_{i in C} ||a_i - (1/r') sum_{l in C} r_l a_l - sum_{j in C} r_j q_<ij>||.
double cgr_identity_residual(const Dataset& ds, const CgrTable& table);

/// Passes iff every ||q_ij|| <= lambda (no slack).
CgrResult cgr_condition(const CgrTable& table, double lambda);

/// Weighted scatter of the union of two candidate clusters about its weighted centroid.
double pair_scatter(const Dataset& ds, const Points& x, const std::vector<int>& first,
                    const std::vector<int>& second);

/// D_{k,k'} for every pair k<k', passing iff D > 2 mu.
std::vector<PairSeparation> separation_condition(const Dataset& ds, const Points& x,
                                                 const CandidateClustering& clusters, double mu);

/// Checks a given partition at a given primal/dual pair. delta must be feasible.
Certificate check_partition(const Dataset& ds, const Points& x, const EdgeTable& delta,
                            const CandidateClustering& clustering);

/// Full clustering test at an ADMM iterate.
Certificate certify(const Dataset& ds, const PrimalDualIterate& state, const AdmmConfig& cfg,
                    ClusterMethod method, std::int64_t iteration = 0);

}  // namespace soncert
