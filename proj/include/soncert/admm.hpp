#pragma once

// Primal-dual ADMM for the multiplicative-weight objective. The augmented
// Lagrangian is
//
//   L = 1/2 sum r_i||x_i - a_i||^2
//       + sum_{i<j} r_i r_j [lambda||y_ij|| - delta_ij^T(x_i - x_j - y_ij)
//                            + nu/2 ||x_i - x_j - y_ij||^2]
//
// and one step sweeps x -> y -> delta. The x block is solved exactly: its
// normal equations are (1 + nu r')I - nu 1 r^T per coordinate, a rank-one
// perturbation of a multiple of the identity.

#include "soncert/core.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>

namespace soncert {

struct AdmmConfig {
  double nu = 1.0;                 ///< augmented Lagrangian penalty
  int certify_every = 8;           ///< iterations between certification attempts
  std::int64_t max_iters = 50000;  ///< iteration cap
  /// Keep iterating after success until mu <= stop_gap; 0 stops at the first
  /// success. ||x - x*||^2 <= 2 mu / min r bounds the primal error.
  double stop_gap = 0.0;

  void validate() const;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a NaN or infinity appears in an ADMM block.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(std::string block, std::int64_t iteration);

  const std::string& block() const { return block_; }
  std::int64_t iteration() const { return iteration_; }

 private:
  std::string block_;
  std::int64_t iteration_;
};

/// x = a, y_ij = a_i - a_j, delta = 0.
PrimalDualIterate init_state(const Dataset& ds);

/// Applies the inverse of M = (1 + nu r')I - nu 1 r^T to every column of rhs.
Points solve_x_system(const Points& rhs, const Weights& r, double nu);

/// Advances state by one x -> y -> delta sweep in place. `iteration` is only
/// used to label a NumericalError.
void advance(const Dataset& ds, PrimalDualIterate& state, const AdmmConfig& cfg,
             std::int64_t iteration = -1);

/// Pure form of advance().
PrimalDualIterate admm_step(const Dataset& ds, const PrimalDualIterate& state,
                            const AdmmConfig& cfg);

}  // namespace soncert
