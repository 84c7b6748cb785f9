#include "soncert/core.hpp"

#include <cmath>
#include <sstream>

namespace soncert {

Dataset::Dataset(Points a, Weights r, double lambda)
    : a_(std::move(a)), r_(std::move(r)), lambda_(lambda) {
  if (a_.rows() < 1 || a_.cols() < 1) {
    throw InvalidDataError("dataset needs n >= 1 points of dimension d >= 1");
  }
  if (r_.size() != a_.rows()) {
    std::ostringstream msg;
    msg << "weight count " << r_.size() << " does not match point count " << a_.rows();
    throw DimensionError(msg.str());
  }
  if (!a_.allFinite()) throw InvalidDataError("data points must be finite");
  for (Eigen::Index i = 0; i < r_.size(); ++i) {
    if (!(r_[i] > 0.0) || !std::isfinite(r_[i])) {
      std::ostringstream msg;
      msg << "weight r_" << i << " = " << r_[i] << " is not strictly positive";
      throw InvalidDataError(msg.str());
    }
  }
  if (!(lambda_ > 0.0) || !std::isfinite(lambda_)) {
    throw InvalidDataError("lambda must be strictly positive");
  }
  total_weight_ = 0.0;
  centroid_ = Point::Zero(a_.cols());
  for (Eigen::Index i = 0; i < a_.rows(); ++i) {
    total_weight_ += r_[i];
    centroid_ += r_[i] * a_.row(i);
  }
  centroid_ /= total_weight_;
}

Dataset Dataset::with_lambda(double lambda) const { return Dataset(a_, r_, lambda); }

EdgeTable::EdgeTable(int n, int d) : n_(n), data_(Points::Zero(edge_count(n), d)) {}

Point EdgeTable::at(int i, int j) const {
  if (i < j) return data_.row(index(i, j));
  if (i > j) return -data_.row(index(j, i));
  return Point::Zero(data_.cols());
}

Points weighted_edge_sums(const EdgeTable& table, const Weights& w) {
  Points out = Points::Zero(table.n(), table.d());
  for_each_edge(table.n(), [&](int i, int j, std::ptrdiff_t e) {
    out.row(i) += w[j] * table.row(e);
    out.row(j) -= w[i] * table.row(e);
  });
  return out;
}

void require_shape(const Dataset& ds, const Points& x, const char* what) {
  if (x.rows() != ds.n() || x.cols() != ds.d()) {
    std::ostringstream msg;
    msg << what << " has shape " << x.rows() << "x" << x.cols() << ", expected " << ds.n()
        << "x" << ds.d();
    throw DimensionError(msg.str());
  }
}

void require_shape(const Dataset& ds, const EdgeTable& t, const char* what) {
  if (t.n() != ds.n() || t.d() != ds.d() || t.edges() != EdgeTable::edge_count(ds.n())) {
    std::ostringstream msg;
    msg << what << " is an edge table for n=" << t.n() << ", d=" << t.d() << ", expected n="
        << ds.n() << ", d=" << ds.d();
    throw DimensionError(msg.str());
  }
}

double primal_objective(const Dataset& ds, const Points& x) {
  require_shape(ds, x, "x");
  const auto& r = ds.r();
  double fidelity = 0.0;
  for (int i = 0; i < ds.n(); ++i) fidelity += r[i] * (x.row(i) - ds.a().row(i)).squaredNorm();
  double penalty = 0.0;
  for_each_edge(ds.n(), [&](int i, int j, std::ptrdiff_t) {
    penalty += r[i] * r[j] * (x.row(i) - x.row(j)).norm();
  });
  return 0.5 * fidelity + ds.lambda() * penalty;
}

double dual_objective(const Dataset& ds, const EdgeTable& delta) {
  require_shape(ds, delta, "delta");
  // Column sums sum_i r_i delta_<ij> are the negated row sums sum_i r_i delta_<ji>.
  const Points row_sums = weighted_edge_sums(delta, ds.r());
  double value = 0.0;
  for (int j = 0; j < ds.n(); ++j) {
    const auto col_sum = -row_sums.row(j);
    value += ds.r()[j] * (-0.5 * col_sum.squaredNorm() + col_sum.dot(ds.a().row(j)));
  }
  return value;
}

Point prox_norm(const Eigen::Ref<const Point>& v, double tau) {
  const double norm = v.norm();
  if (norm <= tau) return Point::Zero(v.size());
  return (1.0 - tau / norm) * v;
}

}  // namespace soncert
