#pragma once

#include "oracles.hpp"

#include "soncert/core.hpp"

#include <random>

namespace testing_support {

using namespace soncert;

inline oracle::Mat to_mat(const Points& p) {
  oracle::Mat m(p.rows(), oracle::Vec(p.cols()));
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    for (Eigen::Index k = 0; k < p.cols(); ++k) m[i][k] = p(i, k);
  }
  return m;
}

inline oracle::Vec to_vec(const Weights& w) { return oracle::Vec(w.data(), w.data() + w.size()); }

inline oracle::Edges to_edges(const EdgeTable& t) {
  oracle::Edges e(t.n(), std::vector<oracle::Vec>(t.n(), oracle::Vec(t.d(), 0.0)));
  for (int i = 0; i < t.n(); ++i) {
    for (int j = i + 1; j < t.n(); ++j) {
      for (int k = 0; k < t.d(); ++k) {
        e[i][j][k] = t.edge(i, j)[k];
        e[j][i][k] = -t.edge(i, j)[k];
      }
    }
  }
  return e;
}

inline Points random_points(std::mt19937_64& rng, int n, int d, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Points p(n, d);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < d; ++k) p(i, k) = g(rng);
  }
  return p;
}

inline Weights random_weights(std::mt19937_64& rng, int n, double lo = 0.2, double hi = 3.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Weights r(n);
  for (int i = 0; i < n; ++i) r[i] = u(rng);
  return r;
}

inline EdgeTable random_edges(std::mt19937_64& rng, int n, int d, double scale = 1.0) {
  EdgeTable t(n, d);
  t.data() = random_points(rng, static_cast<int>(EdgeTable::edge_count(n)), d, scale);
  return t;
}

inline Dataset random_dataset(std::mt19937_64& rng, int n, int d) {
  std::uniform_real_distribution<double> lam(0.05, 1.5);
  return Dataset(random_points(rng, n, d), random_weights(rng, n), lam(rng));
}

inline Dataset two_point(double lambda) {
  Points a(2, 1);
  a << 0.0, 1.0;
  return Dataset(a, Weights::Ones(2), lambda);
}

}  // namespace testing_support
