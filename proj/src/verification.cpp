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


#include "nnk/verification.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "nnk/kernel.hpp"
#include "nnk/neighbors.hpp"
#include "nnk/nnqp.hpp"

namespace nnk {

namespace {

constexpr Index kCloudSize = 100;
constexpr Index kCloudK = 10;

std::vector<Index> support_of(const Eigen::VectorXd& theta) {
  std::vector<Index> out;
  for (Index a = 0; a < theta.size(); ++a) {
    if (theta[a] > kZeroTol) out.push_back(a);
  }
  return out;
}

PointSet plane_cloud(Index t, std::uint64_t seed) {
  return random_cloud(kCloudSize, t % 2 == 0 ? 2 : 5, seed + static_cast<std::uint64_t>(t));
}

}  // namespace

PointSet random_cloud(Index n, Index dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  PointMatrix x(n, dim);
  for (Index r = 0; r < n; ++r) {
    for (Index c = 0; c < dim; ++c) x(r, c) = gauss(rng);
  }
  return PointSet::from_points(std::move(x));
}

VerifyResult verify_qp_oracle(Index n_instances, std::uint64_t seed) {
  VerifyResult out{"qp_oracle"};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Index> size_dist(1, 8);
  std::uniform_int_distribution<Index> dim_dist(1, 5);
  std::uniform_real_distribution<double> log_sigma(std::log(0.1), std::log(4.0));
  for (Index t = 0; t < n_instances; ++t) {
    const Index m = size_dist(rng);
    const auto ps = random_cloud(m + 1, dim_dist(rng), rng());
    const auto spec = KernelSpec::gaussian(std::exp(log_sigma(rng)));
    std::vector<Index> support(static_cast<std::size_t>(m));
    std::iota(support.begin(), support.end(), Index{1});
    const auto local = kernel_submatrix(ps, 0, support, spec);

    QPProblem p{local.support.values, local.center};
    const auto fast = solve(p);
    const auto exact = solve_by_enumeration(p);
    const double dev = (fast.theta - exact.theta).cwiseAbs().maxCoeff();
    out.max_deviation = std::max(out.max_deviation, dev);
    const bool ok = support_of(fast.theta) == support_of(exact.theta) && dev < 1e-6 &&
                    kkt_residuals(p, fast).within(1e-8);
    ++out.n_cases;
    if (!ok) ++out.n_violations;
  }
  return out;
}

VerifyResult verify_kri(Index n_instances, std::uint64_t seed) {
  VerifyResult out{"kri"};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  std::uniform_real_distribution<double> log_sigma(std::log(0.25), std::log(2.0));
  while (out.n_cases < n_instances) {
    PointMatrix x(3, 2);
    for (Index r = 0; r < 3; ++r) {
      x(r, 0) = coord(rng);
      x(r, 1) = coord(rng);
    }
    const auto spec = KernelSpec::gaussian(std::exp(log_sigma(rng)));
    const double k_ij = eval_gaussian(x.row(0), x.row(1), spec.sigma_sq);
    const double k_ik = eval_gaussian(x.row(0), x.row(2), spec.sigma_sq);
    const double k_jk = eval_gaussian(x.row(1), x.row(2), spec.sigma_sq);
    if (!(k_jk < 1.0) || !(k_ij > 0.0) || !(k_ik > 0.0)) continue;
    const auto verdict = kri_predict(k_ij, k_ik, k_jk);

    // closed-form weights of the predicted support
    double w_j = 0.0;
    double w_k = 0.0;
    if (verdict.both_connected()) {
      w_j = (k_ij - k_jk * k_ik) / (1.0 - k_jk * k_jk);
      w_k = (k_ik - k_jk * k_ij) / (1.0 - k_jk * k_jk);
    } else if (verdict.j_connected) {
      w_j = k_ij;
    } else {
      w_k = k_ik;
    }
    const bool near_edge = std::abs(verdict.ratio / verdict.lower - 1.0) < 1e-6 ||
                           std::abs(verdict.ratio / verdict.upper - 1.0) < 1e-6 ||
                           (w_j > 0.0 && w_j < 1e-7) || (w_k > 0.0 && w_k < 1e-7);
    if (near_edge) continue;

    QPProblem p;
    p.K_SS.resize(2, 2);
    p.K_SS << 1.0, k_jk, k_jk, 1.0;
    p.K_Si.resize(2);
    p.K_Si << k_ij, k_ik;
    const auto sol = solve(p);
    const bool ok = (sol.theta[0] > kZeroTol) == verdict.j_connected &&
                    (sol.theta[1] > kZeroTol) == verdict.k_connected;
    out.max_deviation = std::max(
        out.max_deviation, std::max(std::abs(sol.theta[0] - w_j), std::abs(sol.theta[1] - w_k)));
    ++out.n_cases;
    if (!ok) ++out.n_violations;
  }
  return out;
}

VerifyResult verify_plane(Index n_clouds, std::uint64_t seed) {
  VerifyResult out{"plane"};
  for (Index t = 0; t < n_clouds; ++t) {
    const auto ps = plane_cloud(t, seed);
    const auto spec = KernelSpec::gaussian(bandwidth_from_neighbors(ps, kCloudK));
    const auto report = check_plane_property(build_nnk(ps, kCloudK, spec), ps);
    out.n_cases += report.n_checks;
    out.n_violations += static_cast<Index>(report.violations.size());
    for (const auto& v : report.violations) {
      out.max_deviation = std::max(out.max_deviation, v.excess);
    }
  }
  return out;
}

VerifyResult verify_polytope(Index n_clouds, std::uint64_t seed) {
  VerifyResult out{"polytope"};
  for (Index t = 0; t < n_clouds; ++t) {
    const auto ps = plane_cloud(t, seed);
    const auto spec = KernelSpec::gaussian(bandwidth_from_neighbors(ps, kCloudK));
    const auto g = build_nnk(ps, kCloudK, spec);
    for (const auto& fit : g.fits) {
      const auto report = check_polytope_conditions(fit, ps, spec);
      out.max_deviation = std::max(
          {out.max_deviation, report.max_stationarity, -report.min_pruned_margin});
      ++out.n_cases;
      if (!report.pass) ++out.n_violations;
    }
  }
  return out;
}

VerifyResult verify_lle(Index n_datasets, std::uint64_t seed, LleComparison mode) {
  VerifyResult out{mode == LleComparison::observation_space ? "lle_equivalence"
                                                            : "lle_equivalence_unit_directions"};
  for (Index t = 0; t < n_datasets; ++t) {
    const auto ps = random_cloud(kCloudSize, 2 + t % 4, seed + static_cast<std::uint64_t>(t));
    const auto report = check_lle_equivalence(ps, 5, mode);
    out.n_cases += report.n_nodes;
    out.n_violations += report.nodes_failing;
    out.max_deviation = std::max(out.max_deviation, mode == LleComparison::observation_space
                                                        ? report.max_weight_deviation
                                                        : report.max_objective_gap);
  }
  return out;
}

VerifyResult check_objective_dominance(const PointSet& ps, const SparseGraph& nnk,
                                       const SparseGraph& omp) {
  VerifyResult out{"objective_dominance"};
  if (!nnk.kernel || nnk.fits.size() != omp.fits.size()) {
    throw InvalidArgument("objective dominance needs matching kernel graphs");
  }
  const double slack = 1e-10;
  for (std::size_t f = 0; f < nnk.fits.size(); ++f) {
    const auto& fit = nnk.fits[f];
    const auto local = kernel_submatrix(ps, fit.node, fit.candidates, *nnk.kernel);
    const QPProblem p{local.support.values, local.center};
    const double j_knn = qp_objective(p, local.center);
    const double j_nnk = fit.objective;
    const double j_omp = omp.fits[f].objective;
    const double excess = std::max({j_nnk - j_knn, j_nnk - j_omp, j_omp - 0.5});
    out.max_deviation = std::max(out.max_deviation, excess);
    ++out.n_cases;
    if (excess > slack) ++out.n_violations;
  }
  return out;
}

VerifyResult verify_objective_dominance(Index n_clouds, std::uint64_t seed) {
  VerifyResult out{"objective_dominance"};
  for (Index t = 0; t < n_clouds; ++t) {
    const auto ps = plane_cloud(t, seed);
    const auto neighbors = knn_search(ps, kCloudK);
    const auto spec = KernelSpec::gaussian(bandwidth_from_neighbors(neighbors));
    const auto r = check_objective_dominance(
        ps, build_nnk(ps, neighbors, spec),
        build_nnk_greedy(ps, neighbors, spec, GreedyMode::omp));
    out.n_cases += r.n_cases;
    out.n_violations += r.n_violations;
    out.max_deviation = std::max(out.max_deviation, r.max_deviation);
  }
  return out;
}

}  // namespace nnk
