#include "doctest.h"
#include "helpers.hpp"

#include "soncert/admm.hpp"
#include "soncert/socp.hpp"

using namespace soncert;
using namespace testing_support;

namespace {

struct Instance {
  Dataset ds;
  SocpPoint p;
  Residuals res;
};

Instance random_feasible(std::mt19937_64& rng, int n, int d) {
  Instance in;
  in.ds = random_dataset(rng, n, d);
  const EdgeTable delta = clamp_dual(random_edges(rng, n, d, in.ds.lambda()), in.ds.lambda());
  in.p = lift(in.ds, random_points(rng, n, d), delta);
  in.res = residuals(in.ds, in.p);
  return in;
}

// Near-optimal point from a short ADMM run.
Instance admm_point(std::mt19937_64& rng, int n, int d, int iters) {
  Instance in;
  in.ds = random_dataset(rng, n, d);
  PrimalDualIterate s = init_state(in.ds);
  for (int k = 0; k < iters; ++k) advance(in.ds, s, AdmmConfig{});
  in.p = lift(in.ds, s.x, clamp_dual(s.delta, in.ds.lambda()));
  in.res = residuals(in.ds, in.p);
  return in;
}

}  // namespace

TEST_SUITE("socp") {

TEST_CASE("clamp examples") {
  const double lambda = 0.7;
  EdgeTable d(2, 2);
  d.edge(0, 1) << 2 * lambda, 0.0;
  const EdgeTable c = clamp_dual(d, lambda);
  CHECK(c.edge(0, 1)[0] == doctest::Approx(lambda).epsilon(1e-15));
  CHECK(c.edge(0, 1)[1] == 0.0);
  CHECK(c.edge(0, 1).norm() <= lambda);

  EdgeTable inside(3, 2);
  inside.data() << 0.1, -0.2, 0.3, 0.0, -0.69, 0.01;
  CHECK(clamp_dual(inside, lambda).data() == inside.data());
}

TEST_CASE("clamp is the nearest point of the ball") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double lambda = 0.8;
  for (int trial = 0; trial < 5; ++trial) {
    EdgeTable d = random_edges(rng, 2, 3, 2.0);
    const Point v = d.row(0);
    const Point proj = clamp_dual(d, lambda).row(0);
    const double dist = (proj - v).norm();
    int closer = 0;
    for (int s = 0; s < 10000; ++s) {
      Point w(3);
      do {
        w << u(rng), u(rng), u(rng);
      } while (w.norm() > 1.0);
      w *= lambda;
      if ((w - v).norm() < dist - 1e-12) ++closer;
    }
    CHECK(closer == 0);
  }
}

TEST_CASE("clamp is monotone and idempotent") {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 50; ++trial) {
    const EdgeTable d = random_edges(rng, 5, 2, 1.5);
    const EdgeTable c = clamp_dual(d, 0.9);
    for (std::ptrdiff_t e = 0; e < d.edges(); ++e) {
      CHECK(c.row(e).norm() <= d.row(e).norm());
      CHECK(c.row(e).norm() <= 0.9);
    }
    CHECK(clamp_dual(c, 0.9).data() == c.data());
  }
}

TEST_CASE("lift of the slater point") {
  Points a(3, 2);
  a << 0, 0, 1, 0, 0, 2;
  Weights r(3);
  r << 1.0, 2.0, 0.5;
  const Dataset ds(a, r, 0.4);
  const SocpPoint p = lift(ds, a, EdgeTable(3, 2));
  CHECK(p.z.isZero(0.0));
  CHECK((p.s.array() == 0.5).all());
  CHECK((p.u.array() == -0.5).all());
  CHECK(p.beta.isZero(0.0));
  CHECK((p.gamma.array() == 0.5).all());
  for_each_edge(3, [&](int i, int j, std::ptrdiff_t e) {
    CHECK(p.t[e] == (a.row(i) - a.row(j)).norm());
  });
  CHECK(check_feasibility(ds, p).feasible());
  CHECK(socp_primal_objective(ds, p) - primal_objective(ds, a) ==
        doctest::Approx(0.5 * r.sum()).epsilon(1e-14));

  const Residuals res = residuals(ds, p);
  for (int i = 0; i < 3; ++i) CHECK(res.sigma1[i] == 0.0);
  for_each_edge(3, [&](int i, int j, std::ptrdiff_t e) {
    CHECK(res.eps1[e] == doctest::Approx(0.4 * (a.row(i) - a.row(j)).norm()).epsilon(1e-15));
  });
  const ResidualBoundReport rep = residual_bounds(ds, p, res);
  CHECK(rep.ok());
}

TEST_CASE("lift rejects an infeasible dual") {
  const Dataset ds = two_point(0.5);
  EdgeTable d(2, 1);
  d.edge(0, 1)[0] = 0.6;
  CHECK_THROWS_AS(lift(ds, ds.a(), d), InfeasibleError);
}

TEST_CASE("feasibility closure on random inputs") {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 6;
    const int d = 1 + trial % 3;
    const Dataset ds = random_dataset(rng, n, d);
    const SocpPoint p =
        lift(ds, random_points(rng, n, d, 3.0), clamp_dual(random_edges(rng, n, d, 5.0), ds.lambda()));
    const FeasibilityReport rep = check_feasibility(ds, p);
    CHECK(rep.edge_split <= 1e-10);
    CHECK(rep.node_shift <= 1e-10);
    CHECK(rep.node_offset <= 1e-10);
    CHECK(rep.edge_cone <= 1e-10);
    CHECK(rep.node_cone <= 1e-10);
    CHECK(rep.dual_balance <= 1e-10);
    CHECK(rep.dual_ball <= 0.0);
    CHECK(rep.dual_cone <= 1e-10);
  }
}

TEST_CASE("gap examples") {
  Points a(2, 1);
  a << 0.0, 1.0;
  const Dataset ds(a, Weights::Ones(2), 0.1);
  CHECK(duality_gap(ds, a, EdgeTable(2, 1)) == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("gap through the conic objectives") {
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 100; ++trial) {
    const Instance in = random_feasible(rng, 2 + trial % 4, 2);
    const double via_socp = socp_primal_objective(in.ds, in.p) - socp_dual_objective(in.ds, in.p);
    CHECK(via_socp == doctest::Approx(in.res.mu).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("gap shrinks as admm converges on the fused pair") {
  const Dataset ds = two_point(0.6);
  PrimalDualIterate s = init_state(ds);
  double mu = 0.0;
  for (int k = 0; k < 400; ++k) advance(ds, s, AdmmConfig{});
  mu = duality_gap(ds, s.x, clamp_dual(s.delta, ds.lambda()));
  CHECK(mu <= 1e-12);
}

TEST_CASE("a gap far below zero is rejected") {
  // at x = (0.1, 0.9) both objectives are 0.09 with delta_12 = 0.1; the
  // dual along delta_12 = t is t - t^2, which peaks at 0.25 outside the ball
  const Dataset ds = two_point(0.1);
  EdgeTable d(2, 1);
  d.edge(0, 1)[0] = 0.1;
  Points x(2, 1);
  x << 0.1, 0.9;
  CHECK(duality_gap(ds, x, d) == doctest::Approx(0.0).epsilon(1e-15));
  EdgeTable wild(2, 1);
  wild.edge(0, 1)[0] = 0.5;
  CHECK_THROWS_AS(duality_gap(ds, x, wild), InfeasibleError);
}

TEST_CASE("gap identity against independent objectives") {
  std::mt19937_64 rng(35);
  for (int trial = 0; trial < 200; ++trial) {
    const Instance in = random_feasible(rng, 1 + trial % 5, 1 + trial % 3);
    const auto& r = in.ds.r();
    double total = 0.0;
    for (int i = 0; i < in.ds.n(); ++i) total += r[i] * in.res.sigma1[i];
    for_each_edge(in.ds.n(), [&](int i, int j, std::ptrdiff_t e) { total += r[i] * r[j] * in.res.eps1[e]; });
    const double f = oracle::primal(to_mat(in.ds.a()), to_vec(r), in.ds.lambda(), to_mat(in.p.x));
    const double h = oracle::dual(to_mat(in.ds.a()), to_vec(r), to_edges(in.p.delta));
    CHECK(std::abs(total - (f - h)) <= 1e-9 * std::max(1.0, std::abs(f)));
    CHECK(gap_identity_error(in.ds, in.res) <= 1e-9 * std::max(1.0, std::abs(f)));
  }
}

TEST_CASE("complementarity residual signs and weighted gap shares") {
  std::mt19937_64 rng(36);
  for (int trial = 0; trial < 200; ++trial) {
    const Instance in = random_feasible(rng, 2 + trial % 4, 2);
    const auto& r = in.ds.r();
    const double slack = 1e-12 * (1.0 + in.res.mu);
    for (int i = 0; i < in.ds.n(); ++i) {
      CHECK(in.res.sigma1[i] >= -slack);
      CHECK(r[i] * in.res.sigma1[i] <= in.res.mu + slack);
    }
    for_each_edge(in.ds.n(), [&](int i, int j, std::ptrdiff_t e) {
      CHECK(in.res.eps1[e] >= -slack);
      CHECK(r[i] * r[j] * in.res.eps1[e] <= in.res.mu + slack);
    });
  }
}

TEST_CASE("unweighted residual shares can exceed mu when weights are small") {
  // Single edge carries the entire gap: sigma = 0 at x = a, so
  // r_1 r_2 eps1 = mu and eps1 = mu / (r_1 r_2) > mu for r_1 r_2 < 1.
  Points a(2, 1);
  a << 0.0, 1.0;
  Weights r(2);
  r << 0.5, 0.5;
  const Dataset ds(a, r, 0.3);
  const SocpPoint p = lift(ds, a, EdgeTable(2, 1));
  const Residuals res = residuals(ds, p);
  CHECK(res.eps1[0] == doctest::Approx(res.mu / 0.25));
  CHECK(res.eps1[0] > res.mu);
}

TEST_CASE("residuals reject an infeasible point") {
  const Dataset ds = two_point(0.5);
  SocpPoint p = lift(ds, ds.a(), EdgeTable(2, 1));
  p.beta(0, 0) = 0.3;  // breaks the dual balance
  CHECK_THROWS_AS(residuals(ds, p), InfeasibleError);
}

TEST_CASE("zero gap forces zero residual vectors") {
  const Dataset ds = two_point(0.6);
  PrimalDualIterate s;
  s.x = Points::Constant(2, 1, 0.5);
  s.delta = EdgeTable(2, 1);
  s.delta.edge(0, 1)[0] = 0.5;
  const SocpPoint p = lift(ds, s.x, s.delta);
  const Residuals res = residuals(ds, p);
  CHECK(res.mu == 0.0);
  CHECK(res.eps2.data().norm() <= 1e-15);
  CHECK(res.sigma2.norm() <= 1e-15);
  CHECK(res.sigma3.norm() <= 1e-15);
}

TEST_CASE("boundary cone pair") {
  // x = (5; 3, 4) and z = (1; -0.6, -0.8) sit on the boundary of the cone with
  // x^T z = 0, so ||z0 xbar + x0 zbar|| = 0 <= sqrt(2 x0 z0 mu) for every mu >= 0.
  const double x0 = 5, z0 = 1;
  const Eigen::Vector2d xb(3, 4), zb(-0.6, -0.8);
  CHECK(x0 * z0 + xb.dot(zb) == doctest::Approx(0.0).scale(1.0));
  CHECK((z0 * xb + x0 * zb).norm() <= 1e-15);
  for (double mu : {0.0, 1e-8, 1.0}) CHECK((z0 * xb + x0 * zb).norm() <= std::sqrt(2 * x0 * z0 * mu) + 1e-15);
}

TEST_CASE("bound formulas match an independent re-derivation") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 100; ++trial) {
    const Instance in = random_feasible(rng, 2 + trial % 4, 1 + trial % 2);
    const ResidualBoundReport rep = residual_bounds(in.ds, in.p, in.res);
    const oracle::BoundFormulas ref{to_mat(in.ds.a()), to_vec(in.ds.r()), in.ds.lambda(),
                                     in.res.mu + in.res.mu_rounding};
    for_each_edge(in.ds.n(), [&](int i, int j, std::ptrdiff_t e) {
      CHECK(rep.eps2_bound[e] == doctest::Approx(ref.edge(i, j)).epsilon(1e-12));
      CHECK(rep.eps2_norm[e] == doctest::Approx(in.res.eps2.row(e).norm()).epsilon(1e-15));
    });
    for (int i = 0; i < in.ds.n(); ++i) {
      CHECK(rep.sigma_bound[i] == doctest::Approx(ref.node(i)).epsilon(1e-12));
    }
  }
}

TEST_CASE("bounds hold along admm runs") {
  std::mt19937_64 rng(38);
  int violations = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const Instance in = admm_point(rng, 3 + trial % 3, 2, 8 * (1 + trial));
    violations += residual_bounds(in.ds, in.p, in.res).edge_violations;
    violations += residual_bounds(in.ds, in.p, in.res).node_violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("rounding bound covers the cancellation in mu") {
  const Dataset ds = two_point(0.5);
  Points x(2, 1);
  x << 0.5, 0.5;
  EdgeTable d(2, 1);
  d.edge(0, 1)[0] = 0.5;
  const double err = gap_rounding_error(ds, x, d);
  CHECK(err > 0.0);
  CHECK(err < 1e-13);
}

}
