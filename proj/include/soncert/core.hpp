#pragma once

// Shared domain types for sum-of-norms clustering with multiplicative weights:
//
//   minimize  1/2 sum_i r_i ||x_i - a_i||^2 + lambda sum_{i<j} r_i r_j ||x_i - x_j||
//
// Points are stored row-wise (row i is point i). Pairwise quantities live in an
// EdgeTable holding one row per unordered pair i<j.

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace soncert {

using Points = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Point = Eigen::RowVectorXd;
using Weights = Eigen::VectorXd;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvalidDataError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Data points a_1..a_n in R^d with strictly positive weights r_i and a
/// regularization parameter lambda > 0. The weighted centroid and total
/// weight are computed once on construction.
class Dataset {
 public:
  Dataset() = default;
  Dataset(Points a, Weights r, double lambda);

  int n() const { return static_cast<int>(a_.rows()); }
  int d() const { return static_cast<int>(a_.cols()); }
  const Points& a() const { return a_; }
  const Weights& r() const { return r_; }
  double lambda() const { return lambda_; }

  /// Sum of all weights (r').
  double total_weight() const { return total_weight_; }
  /// Weighted centroid of the data.
  const Point& centroid() const { return centroid_; }

  /// Same points and weights, different regularization parameter.
  Dataset with_lambda(double lambda) const;

 private:
  Points a_;
  Weights r_;
  double lambda_ = 0.0;
  double total_weight_ = 0.0;
  Point centroid_;
};

/// One d-vector per unordered pair i<j in a flat upper-triangular layout.
/// Lookup of the antisymmetric extension <ij> negates on the fly.
class EdgeTable {
 public:
  EdgeTable() = default;
  EdgeTable(int n, int d);

  int n() const { return n_; }
  int d() const { return static_cast<int>(data_.cols()); }
  std::ptrdiff_t edges() const { return data_.rows(); }

  static std::ptrdiff_t edge_count(int n) {
    return static_cast<std::ptrdiff_t>(n) * (n - 1) / 2;
  }

  /// Flat index of pair (i, j), requires i < j.
  std::ptrdiff_t index(int i, int j) const {
    return static_cast<std::ptrdiff_t>(i) * (2 * n_ - i - 1) / 2 + (j - i - 1);
  }

  /// Stored vector for i < j.
  auto edge(int i, int j) { return data_.row(index(i, j)); }
  auto edge(int i, int j) const { return data_.row(index(i, j)); }
  auto row(std::ptrdiff_t e) { return data_.row(e); }
  auto row(std::ptrdiff_t e) const { return data_.row(e); }

  /// <ij>: stored vector for i<j, its negation for i>j, zero for i==j.
  Point at(int i, int j) const;

  Points& data() { return data_; }
  const Points& data() const { return data_; }

  bool all_finite() const { return data_.allFinite(); }

 private:
  int n_ = 0;
  Points data_;
};

/// Iterate of a primal-dual method: primal x, split variables y_ij = x_i - x_j
/// (approximately), and multipliers delta_ij.
struct PrimalDualIterate {
  Points x;
  EdgeTable y;
  EdgeTable delta;
};

/// Visits every pair i<j in storage order.
template <typename F>
void for_each_edge(int n, F&& f) {
  std::ptrdiff_t e = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++e) f(i, j, e);
  }
}

/// Row i holds sum_j w_j table<ij>.
Points weighted_edge_sums(const EdgeTable& table, const Weights& w);

/// f'(x) = 1/2 sum r_i ||x_i - a_i||^2 + lambda sum_{i<j} r_i r_j ||x_i - x_j||
double primal_objective(const Dataset& ds, const Points& x);

/// h'(delta) = -1/2 sum_j r_j ||sum_i r_i delta_<ij>||^2 + sum_{i,j} r_i r_j delta_<ij>^T a_j
double dual_objective(const Dataset& ds, const EdgeTable& delta);

/// argmin_u 1/2||u - v||^2 + tau ||u||; exactly zero when ||v|| <= tau.
Point prox_norm(const Eigen::Ref<const Point>& v, double tau);

void require_shape(const Dataset& ds, const Points& x, const char* what);
void require_shape(const Dataset& ds, const EdgeTable& t, const char* what);

}  // namespace soncert
