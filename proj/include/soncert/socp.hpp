#pragma once

// Second-order cone lifting of the clustering problem. Any primal x and any
// dual delta with ||delta_ij|| <= lambda extend to a feasible primal/dual
// pair of the conic program
//
//   min  sum r_i s_i + lambda sum r_i r_j t_ij
//   s.t. x_i - x_j - y_ij = 0, x_i - z_i - a_i = 0, s_i - u_i - 1 = 0,
//        t_ij >= ||y_ij||, s_i >= ||(z_i; u_i)||
//
//   max  sum r_i a_i^T beta_i + sum r_i gamma_i
//   s.t. sum_j r_j delta_<ij> + beta_i = 0, lambda >= ||delta_ij||,
//        1 - gamma_i >= ||(beta_i; gamma_i)||
//
// whose objectives exceed f'(x) and h'(delta) by the same constant sum r_i / 2.

#include "soncert/core.hpp"

#include <string>
#include <vector>

namespace soncert {

class InfeasibleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SocpPoint {
  Points x;
  EdgeTable y;
  Points z;
  Eigen::VectorXd s;
  Eigen::VectorXd u;
  Eigen::VectorXd t;  ///< one entry per edge
  EdgeTable delta;
  Points beta;
  Eigen::VectorXd gamma;
};

/// Worst violation of each constraint family; all entries are >= 0.
struct FeasibilityReport {
  double edge_split = 0.0;     ///< ||x_i - x_j - y_ij||
  double node_shift = 0.0;     ///< ||x_i - z_i - a_i||
  double node_offset = 0.0;    ///< |s_i - u_i - 1|
  double edge_cone = 0.0;      ///< ||y_ij|| - t_ij
  double node_cone = 0.0;      ///< ||(z_i; u_i)|| - s_i
  double dual_balance = 0.0;   ///< ||sum_j r_j delta_<ij> + beta_i||
  double dual_ball = 0.0;      ///< ||delta_ij|| - lambda (exact, no tolerance)
  double dual_cone = 0.0;      ///< ||(beta_i; gamma_i)|| - (1 - gamma_i)

  /// Largest scaled violation; dual_ball must be exactly non-positive.
  bool feasible(double tol = 1e-9) const;
  /// Name of the first violated family, empty when feasible.
  std::string first_violation(double tol = 1e-9) const;
};

struct Residuals {
  Eigen::VectorXd eps1;  ///< t_ij lambda + y_ij^T delta_ij
  EdgeTable eps2;        ///< t_ij delta_ij + lambda y_ij
  Eigen::VectorXd sigma1;
  Points sigma2;
  Eigen::VectorXd sigma3;
  double mu = 0.0;
  double mu_rounding = 0.0;  ///< bound on the floating-point error of mu
};

/// Right-hand sides of the O(sqrt(mu)) bounds on the complementarity
/// residual norms, together with the observed norms.
struct ResidualBoundReport {
  Eigen::VectorXd eps2_norm;
  Eigen::VectorXd eps2_bound;
  Eigen::VectorXd sigma_norm;   ///< ||(sigma2_i; sigma3_i)||
  Eigen::VectorXd sigma_bound;
  int edge_violations = 0;
  int node_violations = 0;
  double worst_ratio = 0.0;     ///< max observed/bound over all entries

  bool ok() const { return edge_violations == 0 && node_violations == 0; }
};

/// Radial projection of every delta_ij onto the ball ||.|| <= lambda. The
/// result satisfies the bound exactly in floating point.
EdgeTable clamp_dual(const EdgeTable& delta, double lambda);

/// Builds the full conic point from x and a feasible delta.
/// Throws InfeasibleError when some ||delta_ij|| > lambda.
SocpPoint lift(const Dataset& ds, const Points& x, const EdgeTable& delta);

FeasibilityReport check_feasibility(const Dataset& ds, const SocpPoint& p);

/// Conic primal objective sum r_i s_i + lambda sum r_i r_j t_ij.
double socp_primal_objective(const Dataset& ds, const SocpPoint& p);
/// Conic dual objective sum r_i a_i^T beta_i + sum r_i gamma_i.
double socp_dual_objective(const Dataset& ds, const SocpPoint& p);

/// Tolerance window below zero inside which a negative gap is treated as roundoff.
double gap_roundoff_window(double primal_value);

/// mu = f'(x) - h'(delta), clamped at zero inside the roundoff window.
double duality_gap(const Dataset& ds, const Points& x, const EdgeTable& delta);

/// A priori bound on |fl(f'(x) - h'(delta)) - (f'(x) - h'(delta))|: the
/// number of rounded operations times unit roundoff times the sum of the
/// absolute values of every term. mu + this bound is an upper bound on the
/// exact gap.
double gap_rounding_error(const Dataset& ds, const Points& x, const EdgeTable& delta);

/// Complementarity residuals of a feasible point. Throws InfeasibleError otherwise.
Residuals residuals(const Dataset& ds, const SocpPoint& p);

/// |sum r_i sigma1_i + sum r_i r_j eps1_ij - mu|.
double gap_identity_error(const Dataset& ds, const Residuals& res);

/// Evaluates the residual-norm bounds edge by edge and node by node, at the
/// gap mu + mu_rounding.
ResidualBoundReport residual_bounds(const Dataset& ds, const SocpPoint& p, const Residuals& res);

}  // namespace soncert
