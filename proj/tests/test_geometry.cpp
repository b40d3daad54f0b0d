// Copyright 2026 The nnkgraph Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <cmath>
#include <random>

#include "doctest.h"
#include "nnk/error.hpp"
#include "nnk/geometry.hpp"
#include "nnk/nnqp.hpp"
#include "nnk/verification.hpp"
#include "oracles.hpp"

using namespace nnk;

TEST_CASE("kernel ratio interval") {
  SUBCASE("right angle") {
    const auto v = kri_predict(std::exp(-0.5), std::exp(-0.5), std::exp(-1.0));
    CHECK(v.ratio == doctest::Approx(1.0));
    CHECK(v.both_connected());
  }
  SUBCASE("collinear") {
    // 0, 1, 2 with sigma^2 = 1, seen from 0
    const auto v = kri_predict(std::exp(-0.5), std::exp(-2.0), std::exp(-0.5));
    CHECK(v.ratio == doctest::Approx(std::exp(1.5)));
    CHECK(v.upper == doctest::Approx(std::exp(0.5)));
    CHECK(v.j_connected);
    CHECK(!v.k_connected);
  }
  SUBCASE("nearly coincident pair keeps the nearer one") {
    const auto v = kri_predict(0.6, 0.5, 1.0 - 1e-9);
    CHECK(v.j_connected);
    CHECK(!v.k_connected);
    const auto w = kri_predict(0.5, 0.6, 1.0 - 1e-9);
    CHECK(!w.j_connected);
    CHECK(w.k_connected);
  }
  SUBCASE("domain") {
    CHECK_THROWS_AS(kri_predict(0.0, 0.5, 0.5), InvalidKernelValue);
    CHECK_THROWS_AS(kri_predict(0.5, 1.2, 0.5), InvalidKernelValue);
    CHECK_THROWS_AS(kri_predict(0.5, 0.5, 1.0), InvalidKernelValue);
  }
  SUBCASE("interval widens as K_jk drops") {
    double lo = 1.0, hi = 1.0;
    for (double kjk = 0.99; kjk > 0.01; kjk -= 0.05) {
      const auto v = kri_predict(0.5, 0.5, kjk);
      CHECK(v.lower <= v.upper);
      CHECK(v.lower < lo);
      CHECK(v.upper > hi);
      lo = v.lower;
      hi = v.upper;
    }
  }
}

TEST_CASE("interval agrees with brute force on three points") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int checked = 0;
  for (int t = 0; t < 2000; ++t) {
    Eigen::Vector2d i(u(rng), u(rng)), j(u(rng), u(rng)), k(u(rng), u(rng));
    const double s2 = 0.5;
    const double kij = oracle::gauss(i, j, s2), kik = oracle::gauss(i, k, s2),
                 kjk = oracle::gauss(j, k, s2);
    const double r = kij / kik;
    if (std::abs(std::log(r / kjk)) < 1e-6 || std::abs(std::log(r * kjk)) < 1e-6) continue;
    Eigen::Matrix2d A;
    A << 1, kjk, kjk, 1;
    const auto x = oracle::nnqp_brute(A, Eigen::Vector2d(kij, kik));
    if ((x.array() > 0 && x.array() < 1e-7).any()) continue;
    const auto v = kri_predict(kij, kik, kjk);
    CHECK(v.j_connected == (x[0] > 0));
    CHECK(v.k_connected == (x[1] > 0));
    ++checked;
  }
  CHECK(checked > 1900);
  const auto r = verify_kri(500, 1);
  CHECK(r.n_cases == 500);
  CHECK(r.n_violations == 0);
}

TEST_CASE("plane predicate") {
  PointMatrix x(3, 2);
  x << 0, 0, 1, 0, 1, 1;
  auto ps = PointSet::from_points(x);
  SparseGraph g;
  g.n = 3;
  g.kernel = KernelSpec::gaussian(1.0);
  LocalFit f;
  f.node = 0;
  f.candidates = {1, 2};
  f.theta = {0.5, 0.2};
  f.refresh_support();
  g.fits = {f};
  // k exactly on the plane through x_j: not flagged
  auto r = check_plane_property(g, ps);
  CHECK(r.n_checks == 0);
  CHECK(r.violations.empty());

  ps.points(2, 0) = 1.5;
  r = check_plane_property(g, ps);
  CHECK(r.n_checks == 1);
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].j == 1);
  CHECK(r.violations[0].k == 2);
  CHECK(r.violations[0].excess == doctest::Approx(0.5));

  g.kernel = KernelSpec::cosine_at_node();
  CHECK_THROWS_AS(check_plane_property(g, ps), InvalidArgument);
}

TEST_CASE("plane property on chains and single pairs") {
  PointMatrix x(5, 1);
  x << 0, 1, 2, 3, 4;
  const auto ps = PointSet::from_points(x);
  const auto g = build_nnk(ps, 4, KernelSpec::gaussian(1.0));
  const auto r = check_plane_property(g, ps);
  CHECK(r.n_checks > 0);
  CHECK(r.violations.empty());
  CHECK(g.edges.size() == 4);

  // with two candidates the plane property follows from the ratio interval
  std::mt19937_64 rng(6);
  Index checks = 0;
  for (int t = 0; t < 500; ++t) {
    const auto cloud = PointSet::from_points(oracle::normal_points(3, 2, rng()));
    const auto g3 = build_nnk(cloud, 2, KernelSpec::gaussian(0.7));
    const auto r3 = check_plane_property(g3, cloud);
    checks += r3.n_checks;
    CHECK(r3.violations.empty());
  }
  CHECK(checks > 0);
}

TEST_CASE("polytope conditions") {
  SUBCASE("square with center") {
    PointMatrix x(6, 2);
    x << 0, 0, 1, 1, -1, 1, -1, -1, 1, -1, 2, 2;
    const auto ps = PointSet::from_points(x);
    const auto spec = KernelSpec::gaussian(1.0);
    const std::vector<Index> s{1, 2, 3, 4, 5};
    const auto fit = fit_nnk(ps, 0, s, spec);
    CHECK(fit.support == std::vector<Index>{1, 2, 3, 4});

    const auto full = gaussian_kernel_matrix(ps, 1.0).values;
    QPProblem p;
    p.K_SS.resize(5, 5);
    p.K_Si.resize(5);
    for (int a = 0; a < 5; ++a) {
      p.K_Si[a] = full(0, a + 1);
      for (int b = 0; b < 5; ++b) p.K_SS(a, b) = full(a + 1, b + 1);
    }
    const auto e = solve_by_enumeration(p);
    CHECK(e.theta[4] == 0.0);
    CHECK((e.theta.head(4).array() > 0).all());

    const auto r = check_polytope_conditions(fit, full);
    CHECK(r.pass);
    CHECK(r.candidates.size() == 5);
    CHECK(!r.candidates[4].retained);
    CHECK(r.min_pruned_margin > 0.0);
    const auto r2 = check_polytope_conditions(fit, ps, spec);
    CHECK(r2.pass);
    CHECK(r2.min_pruned_margin == doctest::Approx(r.min_pruned_margin));

    auto bad = fit;
    bad.weights[0] *= 1.1;
    bad.theta[0] *= 1.1;
    CHECK(!check_polytope_conditions(bad, full).pass);
  }
  SUBCASE("singleton support") {
    PointMatrix x(3, 1);
    x << 0, 1, 2;
    const auto ps = PointSet::from_points(x);
    const auto spec = KernelSpec::gaussian(1.0);
    const std::vector<Index> s{1, 2};
    const auto fit = fit_nnk(ps, 0, s, spec);
    REQUIRE(fit.support.size() == 1);
    const auto r = check_polytope_conditions(fit, ps, spec);
    CHECK(r.pass);
    // K_12 theta_1 - K_02 with theta_1 = K_01
    CHECK(r.min_pruned_margin == doctest::Approx(std::exp(-1.0) - std::exp(-2.0)));
  }
  SUBCASE("swiss roll fits") {
    SwissRollConfig cfg;
    cfg.n_points = 400;
    cfg.noise_std = 0.3;
    cfg.seed = 3;
    const auto ps = make_swiss_roll(cfg);
    const auto spec = KernelSpec::gaussian(bandwidth_from_neighbors(ps, 10));
    const auto g = build_nnk(ps, 10, spec);
    for (const auto& f : g.fits) CHECK(check_polytope_conditions(f, ps, spec).pass);
  }
  SUBCASE("several weights under zero_tol at once") {
    // node 89 of this cloud has two optimal weights near 1e-8; zeroing both
    // together used to leave a pruned margin of -1.14e-8
    const auto ps = random_cloud(100, 2, 334);
    const auto spec = KernelSpec::gaussian(bandwidth_from_neighbors(ps, 10));
    const auto g = build_nnk(ps, 10, spec);
    const auto r = check_polytope_conditions(g.fits[89], ps, spec);
    CHECK(r.pass);
    CHECK(r.min_pruned_margin >= -kZeroTol);
    for (double w : g.fits[89].weights) CHECK(w > kZeroTol);
  }
}

TEST_CASE("cosine kernel against sum-to-one reconstruction") {
  SUBCASE("regular simplex around the center") {
    PointMatrix x(4, 2);
    x << 0, 0, 1, 0, -0.5, std::sqrt(3.0) / 2, -0.5, -std::sqrt(3.0) / 2;
    const auto ps = PointSet::from_points(x);
    const std::vector<Index> s{1, 2, 3};
    const auto lle = fit_lle_positive(ps, 0, s, LleConstraint::nonneg_sum1);
    const auto nnk = fit_nnk(ps, 0, s, KernelSpec::cosine_at_node());
    for (int a = 0; a < 3; ++a) {
      CHECK(lle.weights[a] == doctest::Approx(1.0 / 3.0));
      // K_SS = (J + C) / 2 has row sums |S| / 2 against K_Si = 1
      CHECK(nnk.weights[a] == doctest::Approx(2.0 / 3.0));
    }
    const auto unit = check_lle_equivalence(ps, 3, LleComparison::unit_directions);
    CHECK(unit.nodes_failing == 0);
    CHECK(unit.max_objective_gap < 1e-12);
  }
  SUBCASE("center outside the hull of its neighbors") {
    PointMatrix x(4, 1);
    x << 0, 1, 2, 3;
    const auto ps = PointSet::from_points(x);
    const std::vector<Index> s{1, 2, 3};
    const auto lle = fit_lle_positive(ps, 0, s, LleConstraint::nonneg_sum1);
    const auto nnk = fit_nnk(ps, 0, s, KernelSpec::cosine_at_node());
    CHECK(lle.support == std::vector<Index>{1});
    CHECK(nnk.support == std::vector<Index>{1});
    CHECK(lle.weights[0] == doctest::Approx(1.0));
    CHECK(nnk.weights[0] == doctest::Approx(1.0));
  }
  SUBCASE("duplicates are rejected") {
    PointMatrix x(4, 2);
    x << 0, 0, 0, 0, 1, 0, 0, 1;
    CHECK_THROWS_AS(check_lle_equivalence(PointSet::from_points(x), 2), DegenerateInput);
  }
  SUBCASE("random sets") {
    // unit difference vectors with rescaled weights: same optimum
    const auto unit = verify_lle(10, 5, LleComparison::unit_directions);
    CHECK(unit.n_cases == 1000);
    CHECK(unit.n_violations == 0);
    CHECK(unit.max_deviation < 1e-8);
    // raw difference vectors: supports differ on a sizable share of nodes
    const auto raw = verify_lle(10, 5, LleComparison::observation_space);
    CHECK(raw.n_violations > 0);
  }
}
