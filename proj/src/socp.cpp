#include "soncert/socp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace soncert {

namespace {

// Violations are measured relative to the magnitude of the quantities
// involved so that the tolerance is independent of data scale.
double scaled(double violation, double magnitude) {
  return std::max(0.0, violation) / (1.0 + magnitude);
}

}  // namespace

bool FeasibilityReport::feasible(double tol) const { return first_violation(tol).empty(); }

std::string FeasibilityReport::first_violation(double tol) const {
  if (dual_ball > 0.0) return "dual_ball";
  const std::pair<const char*, double> families[] = {
      {"edge_split", edge_split}, {"node_shift", node_shift},     {"node_offset", node_offset},
      {"edge_cone", edge_cone},   {"node_cone", node_cone},       {"dual_balance", dual_balance},
      {"dual_cone", dual_cone},
  };
  for (const auto& [name, value] : families) {
    if (!(value <= tol)) return name;
  }
  return {};
}

EdgeTable clamp_dual(const EdgeTable& delta, double lambda) {
  EdgeTable out = delta;
  for (std::ptrdiff_t e = 0; e < out.edges(); ++e) {
    auto row = out.row(e);
    const double norm = row.norm();
    if (norm <= lambda) continue;
    row *= lambda / norm;
    // Rounding can leave the norm one ulp above lambda; shrink until it is not.
    while (row.norm() > lambda) row *= 1.0 - std::numeric_limits<double>::epsilon();
  }
  return out;
}

SocpPoint lift(const Dataset& ds, const Points& x, const EdgeTable& delta) {
  require_shape(ds, x, "x");
  require_shape(ds, delta, "delta");
  const double lambda = ds.lambda();
  for (std::ptrdiff_t e = 0; e < delta.edges(); ++e) {
    if (delta.row(e).norm() > lambda) {
      std::ostringstream msg;
      msg << "dual edge " << e << " has norm " << delta.row(e).norm() << " > lambda = " << lambda
          << "; clamp before lifting";
      throw InfeasibleError(msg.str());
    }
  }

  const int n = ds.n();
  SocpPoint p;
  p.x = x;
  p.y = EdgeTable(n, ds.d());
  p.t.resize(p.y.edges());
  for_each_edge(n, [&](int i, int j, std::ptrdiff_t e) {
    p.y.row(e) = x.row(i) - x.row(j);
    p.t[e] = p.y.row(e).norm();
  });
  p.z = x - ds.a();
  p.s.resize(n);
  p.u.resize(n);
  for (int i = 0; i < n; ++i) {
    const double zz = p.z.row(i).squaredNorm();
    p.s[i] = 0.5 * (1.0 + zz);
    p.u[i] = 0.5 * (-1.0 + zz);
  }
  p.delta = delta;
  p.beta = -weighted_edge_sums(delta, ds.r());
  p.gamma.resize(n);
  for (int i = 0; i < n; ++i) p.gamma[i] = 0.5 * (1.0 - p.beta.row(i).squaredNorm());
  return p;
}

FeasibilityReport check_feasibility(const Dataset& ds, const SocpPoint& p) {
  require_shape(ds, p.x, "x");
  require_shape(ds, p.y, "y");
  require_shape(ds, p.delta, "delta");
  require_shape(ds, p.z, "z");
  require_shape(ds, p.beta, "beta");
  const int n = ds.n();
  if (p.s.size() != n || p.u.size() != n || p.gamma.size() != n ||
      p.t.size() != p.y.edges()) {
    throw DimensionError("conic point scalar blocks have the wrong length");
  }

  FeasibilityReport rep;
  for_each_edge(n, [&](int i, int j, std::ptrdiff_t e) {
    const double mag = p.x.row(i).norm() + p.x.row(j).norm();
    rep.edge_split =
        std::max(rep.edge_split, scaled((p.x.row(i) - p.x.row(j) - p.y.row(e)).norm(), mag));
    const double ynorm = p.y.row(e).norm();
    rep.edge_cone = std::max(rep.edge_cone, scaled(ynorm - p.t[e], ynorm));
    rep.dual_ball = std::max(rep.dual_ball, p.delta.row(e).norm() - ds.lambda());
  });

  const Points balance = weighted_edge_sums(p.delta, ds.r()) + p.beta;
  for (int i = 0; i < n; ++i) {
    rep.node_shift = std::max(
        rep.node_shift, scaled((p.x.row(i) - p.z.row(i) - ds.a().row(i)).norm(),
                               p.x.row(i).norm() + ds.a().row(i).norm()));
    rep.node_offset =
        std::max(rep.node_offset, scaled(std::abs(p.s[i] - p.u[i] - 1.0), std::abs(p.s[i])));
    const double zu = std::sqrt(p.z.row(i).squaredNorm() + p.u[i] * p.u[i]);
    rep.node_cone = std::max(rep.node_cone, scaled(zu - p.s[i], std::abs(p.s[i])));
    rep.dual_balance = std::max(
        rep.dual_balance, scaled(balance.row(i).norm(), p.beta.row(i).norm()));
    const double bg = std::sqrt(p.beta.row(i).squaredNorm() + p.gamma[i] * p.gamma[i]);
    rep.dual_cone =
        std::max(rep.dual_cone, scaled(bg - (1.0 - p.gamma[i]), std::abs(1.0 - p.gamma[i])));
  }
  rep.dual_ball = std::max(rep.dual_ball, 0.0);
  return rep;
}

double socp_primal_objective(const Dataset& ds, const SocpPoint& p) {
  const auto& r = ds.r();
  double value = r.dot(p.s);
  double penalty = 0.0;
  for_each_edge(ds.n(), [&](int i, int j, std::ptrdiff_t e) { penalty += r[i] * r[j] * p.t[e]; });
  return value + ds.lambda() * penalty;
}

double socp_dual_objective(const Dataset& ds, const SocpPoint& p) {
  const auto& r = ds.r();
  double value = 0.0;
  for (int i = 0; i < ds.n(); ++i) {
    value += r[i] * (ds.a().row(i).dot(p.beta.row(i)) + p.gamma[i]);
  }
  return value;
}

double gap_roundoff_window(double primal_value) {
  return 1e-9 * std::max(1.0, std::abs(primal_value));
}

double duality_gap(const Dataset& ds, const Points& x, const EdgeTable& delta) {
  const double primal = primal_objective(ds, x);
  const double gap = primal - dual_objective(ds, delta);
  if (gap >= 0.0) return gap;
  if (gap >= -gap_roundoff_window(primal)) return 0.0;
  std::ostringstream msg;
  msg << "negative duality gap " << gap << " beyond roundoff; delta is not dual feasible";
  throw InfeasibleError(msg.str());
}

double gap_rounding_error(const Dataset& ds, const Points& x, const EdgeTable& delta) {
  const auto& r = ds.r();
  const int n = ds.n();
  double magnitude = 0.0;
  for (int i = 0; i < n; ++i) magnitude += 0.5 * r[i] * (x.row(i) - ds.a().row(i)).squaredNorm();
  for_each_edge(n, [&](int i, int j, std::ptrdiff_t e) {
    magnitude += ds.lambda() * r[i] * r[j] * (x.row(i) - x.row(j)).norm();
    (void)e;
  });
  // Dual terms with every inner sum taken in absolute value.
  Eigen::VectorXd abs_sums = Eigen::VectorXd::Zero(n);
  for_each_edge(n, [&](int i, int j, std::ptrdiff_t e) {
    const double nd = delta.row(e).norm();
    abs_sums[i] += r[j] * nd;
    abs_sums[j] += r[i] * nd;
  });
  for (int j = 0; j < n; ++j) {
    magnitude += r[j] * (0.5 * abs_sums[j] * abs_sums[j] + abs_sums[j] * ds.a().row(j).norm());
  }
  const double ops = static_cast<double>(n) * n + 4.0 * ds.d() + 16.0;
  const double unit = std::numeric_limits<double>::epsilon() / 2;
  return ops * unit * magnitude / (1.0 - ops * unit);
}

Residuals residuals(const Dataset& ds, const SocpPoint& p) {
  const FeasibilityReport rep = check_feasibility(ds, p);
  if (const auto bad = rep.first_violation(); !bad.empty()) {
    throw InfeasibleError("conic point violates " + bad);
  }
  const double lambda = ds.lambda();
  const int n = ds.n();
  Residuals res;
  res.eps1.resize(p.y.edges());
  res.eps2 = EdgeTable(n, ds.d());
  for (std::ptrdiff_t e = 0; e < p.y.edges(); ++e) {
    res.eps1[e] = p.t[e] * lambda + p.y.row(e).dot(p.delta.row(e));
    res.eps2.row(e) = p.t[e] * p.delta.row(e) + lambda * p.y.row(e);
  }
  res.sigma1.resize(n);
  res.sigma2.resize(n, ds.d());
  res.sigma3.resize(n);
  for (int i = 0; i < n; ++i) {
    const double one_minus_gamma = 1.0 - p.gamma[i];
    res.sigma1[i] = p.s[i] * one_minus_gamma + p.z.row(i).dot(p.beta.row(i)) + p.u[i] * p.gamma[i];
    res.sigma2.row(i) = p.s[i] * p.beta.row(i) + one_minus_gamma * p.z.row(i);
    res.sigma3[i] = p.s[i] * p.gamma[i] + one_minus_gamma * p.u[i];
  }
  res.mu = duality_gap(ds, p.x, p.delta);
  res.mu_rounding = gap_rounding_error(ds, p.x, p.delta);
  return res;
}

double gap_identity_error(const Dataset& ds, const Residuals& res) {
  const auto& r = ds.r();
  double total = r.dot(res.sigma1);
  for_each_edge(ds.n(), [&](int i, int j, std::ptrdiff_t e) { total += r[i] * r[j] * res.eps1[e]; });
  return std::abs(total - res.mu);
}

ResidualBoundReport residual_bounds(const Dataset& ds, const SocpPoint& p, const Residuals& res) {
  const auto& r = ds.r();
  const int n = ds.n();
  // The bounds hold for the exact gap, which the computed one may understate.
  const double mu = res.mu + res.mu_rounding;
  const double lambda = ds.lambda();
  const double total = ds.total_weight();

  double spread = 0.0;     // sum_l r_l ||abar - a_l||^2
  double abs_moment = 0.0; // sum_l r_l ||a_l||
  for (int l = 0; l < n; ++l) {
    spread += r[l] * (ds.centroid() - ds.a().row(l)).squaredNorm();
    abs_moment += r[l] * ds.a().row(l).norm();
  }

  // Observed norms may exceed an exactly-zero bound by roundoff only.
  auto exceeds = [](double observed, double bound) {
    return observed > bound * (1.0 + 1e-12) + 1e-14;
  };

  ResidualBoundReport rep;
  rep.eps2_norm.resize(p.y.edges());
  rep.eps2_bound.resize(p.y.edges());
  for_each_edge(n, [&](int i, int j, std::ptrdiff_t e) {
    rep.eps2_norm[e] = res.eps2.row(e).norm();
    rep.eps2_bound[e] = std::sqrt((spread * mu + 2.0 * mu * mu) / (r[i] * r[j]));
    if (exceeds(rep.eps2_norm[e], rep.eps2_bound[e])) ++rep.edge_violations;
    if (rep.eps2_bound[e] > 0.0) {
      rep.worst_ratio = std::max(rep.worst_ratio, rep.eps2_norm[e] / rep.eps2_bound[e]);
    }
  });

  rep.sigma_norm.resize(n);
  rep.sigma_bound.resize(n);
  for (int i = 0; i < n; ++i) {
    rep.sigma_norm[i] =
        std::sqrt(res.sigma2.row(i).squaredNorm() + res.sigma3[i] * res.sigma3[i]);
    const double primal_factor = spread / r[i] + 2.0 * mu / r[i] + 1.0;
    const double dual_factor = 0.5 + ((total - r[i]) * lambda * abs_moment + mu) / r[i];
    rep.sigma_bound[i] = std::sqrt(primal_factor * dual_factor * mu);
    if (exceeds(rep.sigma_norm[i], rep.sigma_bound[i])) ++rep.node_violations;
    if (rep.sigma_bound[i] > 0.0) {
      rep.worst_ratio = std::max(rep.worst_ratio, rep.sigma_norm[i] / rep.sigma_bound[i]);
    }
  }
  return rep;
}

}  // namespace soncert
