#include "soncert/admm.hpp"

#include <cmath>
#include <sstream>

namespace soncert {

void AdmmConfig::validate() const {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw ConfigError("nu must be positive");
  if (certify_every < 1) throw ConfigError("certification interval must be >= 1");
  if (max_iters < certify_every) {
    throw ConfigError("max_iters must be at least the certification interval");
  }
  if (!(stop_gap >= 0.0)) throw ConfigError("stop gap must be non-negative");
}

namespace {

std::string numerical_message(const std::string& block, std::int64_t iteration) {
  std::ostringstream msg;
  msg << "non-finite value in ADMM " << block << "-update";
  if (iteration >= 0) msg << " at iteration " << iteration;
  return msg.str();
}

}  // namespace

NumericalError::NumericalError(std::string block, std::int64_t iteration)
    : std::runtime_error(numerical_message(block, iteration)),
      block_(std::move(block)),
      iteration_(iteration) {}

PrimalDualIterate init_state(const Dataset& ds) {
  PrimalDualIterate state{ds.a(), EdgeTable(ds.n(), ds.d()), EdgeTable(ds.n(), ds.d())};
  for_each_edge(ds.n(), [&](int i, int j, std::ptrdiff_t e) {
    state.y.row(e) = ds.a().row(i) - ds.a().row(j);
  });
  return state;
}

Points solve_x_system(const Points& rhs, const Weights& r, double nu) {
  // Sherman-Morrison: M^{-1} = (I + nu 1 r^T) / (1 + nu r').
  const double total = r.sum();
  Point weighted = Point::Zero(rhs.cols());
  for (Eigen::Index j = 0; j < rhs.rows(); ++j) weighted += r[j] * rhs.row(j);
  Points x = rhs;
  x.rowwise() += nu * weighted;
  x /= 1.0 + nu * total;
  return x;
}

void advance(const Dataset& ds, PrimalDualIterate& state, const AdmmConfig& cfg,
             std::int64_t iteration) {
  const double nu = cfg.nu;
  const auto& r = ds.r();

  // (1) x-update: rhs_i = a_i + sum_j r_j (delta_<ij> + nu y_<ij>).
  EdgeTable combined = state.delta;
  combined.data() += nu * state.y.data();
  Points rhs = weighted_edge_sums(combined, r);
  rhs += ds.a();
  state.x = solve_x_system(rhs, r, nu);
  if (!state.x.allFinite()) throw NumericalError("x", iteration);

  // (2) y-update and (3) delta-update, edge by edge.
  const double tau = ds.lambda() / nu;
  for_each_edge(ds.n(), [&](int i, int j, std::ptrdiff_t e) {
    const Point diff = state.x.row(i) - state.x.row(j);
    state.y.row(e) = prox_norm(diff - state.delta.row(e) / nu, tau);
    state.delta.row(e) -= nu * (diff - state.y.row(e));
  });
  if (!state.y.all_finite()) throw NumericalError("y", iteration);
  if (!state.delta.all_finite()) throw NumericalError("delta", iteration);
}

PrimalDualIterate admm_step(const Dataset& ds, const PrimalDualIterate& state,
                            const AdmmConfig& cfg) {
  require_shape(ds, state.x, "x");
  require_shape(ds, state.y, "y");
  require_shape(ds, state.delta, "delta");
  PrimalDualIterate next = state;
  advance(ds, next, cfg);
  return next;
}

}  // namespace soncert
