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

#include "nnk/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nnk/error.hpp"
#include "nnk/neighbors.hpp"
#include "nnk/nnqp.hpp"

namespace nnk {

namespace {

bool in_unit_range(double v) { return v > 0.0 && v <= 1.0; }

// True when the supports differ or a common weight is off by more than
// weight_tol.
bool compare_fits(const std::vector<Index>& support_a,
                  const std::vector<double>& weights_a,
                  const std::vector<Index>& support_b,
                  const std::vector<double>& weights_b, double weight_tol,
                  LleEquivalenceReport& report) {
  Index difference = 0;
  double worst = 0.0;
  for (std::size_t a = 0; a < support_a.size(); ++a) {
    const auto it = std::find(support_b.begin(), support_b.end(), support_a[a]);
    if (it == support_b.end()) {
      ++difference;
      continue;
    }
    const double dev = std::abs(weights_a[a] - weights_b[it - support_b.begin()]);
    worst = std::max(worst, dev);
  }
  report.max_weight_deviation = std::max(report.max_weight_deviation, worst);
  if (worst > weight_tol) ++report.nodes_with_weight_mismatch;
  for (Index s : support_b) {
    if (std::find(support_a.begin(), support_a.end(), s) == support_a.end()) {
      ++difference;
    }
  }
  if (difference > 0) ++report.nodes_with_support_mismatch;
  return difference > 0 || worst > weight_tol;
  report.max_support_difference = std::max(report.max_support_difference, difference);
}

}  // namespace

KRIVerdict kri_predict(double k_ij, double k_ik, double k_jk) {
  if (!in_unit_range(k_ij) || !in_unit_range(k_ik) || !in_unit_range(k_jk)) {
    throw InvalidKernelValue("kernel ratio interval needs values in (0, 1]");
  }
  if (k_jk >= 1.0) {
    throw InvalidKernelValue("K_jk = 1: j and k coincide");
  }
  KRIVerdict v;
  v.ratio = k_ij / k_ik;
  v.lower = k_jk;
  v.upper = 1.0 / k_jk;
  v.j_connected = v.lower < v.ratio;
  v.k_connected = v.ratio < v.upper;
  return v;
}

PlaneReport check_plane_property(const SparseGraph& g, const PointSet& ps) {
  if (!g.kernel || g.kernel->kind != KernelKind::gaussian) {
    throw InvalidArgument("plane property applies to Gaussian-kernel graphs");
  }
  PlaneReport report;
  for (const auto& fit : g.fits) {
    const auto xi = ps.points.row(fit.node);
    for (std::size_t a = 0; a < fit.candidates.size(); ++a) {
      if (!(fit.theta[a] > 0.0)) continue;
      const Eigen::RowVectorXd dj = ps.points.row(fit.candidates[a]) - xi;
      const double a_sq = dj.squaredNorm();
      for (std::size_t b = 0; b < fit.candidates.size(); ++b) {
        if (b == a) continue;
        const double projection = (ps.points.row(fit.candidates[b]) - xi).dot(dj);
        if (!(projection > a_sq)) continue;
        ++report.n_checks;
        if (fit.theta[b] > 0.0) {
          report.violations.push_back(
              {fit.node, fit.candidates[a], fit.candidates[b], projection - a_sq});
        }
      }
    }
  }
  return report;
}

namespace {

template <class KernelAt>
PolytopeReport polytope_report(const LocalFit& fit, KernelAt&& kernel) {
  PolytopeReport report;
  report.min_pruned_margin = std::numeric_limits<double>::infinity();
  for (Index c : fit.candidates) {
    // sum over the retained block b of K(c, b) theta_b, minus K(i, c).
    double value = -kernel(fit.node, c);
    for (std::size_t b = 0; b < fit.support.size(); ++b) {
      value += kernel(c, fit.support[b]) * fit.weights[b];
    }
    CandidateCheck check;
    check.candidate = c;
    check.retained =
        std::find(fit.support.begin(), fit.support.end(), c) != fit.support.end();
    if (check.retained) {
      check.value = std::abs(value);
      check.pass = check.value <= kGeometrySlack;
      report.max_stationarity = std::max(report.max_stationarity, check.value);
    } else {
      check.value = value;
      check.pass = value >= -kGeometrySlack;
      report.min_pruned_margin = std::min(report.min_pruned_margin, value);
    }
    report.pass = report.pass && check.pass;
    report.candidates.push_back(check);
  }
  if (!std::isfinite(report.min_pruned_margin)) report.min_pruned_margin = 0.0;
  return report;
}

}  // namespace

PolytopeReport check_polytope_conditions(const LocalFit& fit,
                                         const Eigen::MatrixXd& k_full) {
  return polytope_report(fit, [&](Index p, Index q) { return k_full(p, q); });
}

PolytopeReport check_polytope_conditions(const LocalFit& fit, const PointSet& ps,
                                         const KernelSpec& spec) {
  return polytope_report(
      fit, [&](Index p, Index q) { return eval_kernel(ps, p, q, fit.node, spec); });
}

LleEquivalenceReport check_lle_equivalence(const PointSet& ps, Index k,
                                           LleComparison mode, double weight_tol) {
  const auto neighbors = knn_search(ps, k);
  const auto cosine = KernelSpec::cosine_at_node();
  LleEquivalenceReport report;
  for (Index i = 0; i < ps.size(); ++i) {
    const auto support = neighbors.indices(i);
    for (Index j : support) {
      if (ps.points.row(j) == ps.points.row(i)) {
        throw DegenerateInput("neighbor " + std::to_string(j) +
                              " coincides with center " + std::to_string(i));
      }
    }
    auto nnk_fit = fit_nnk(ps, i, support, cosine);

    if (mode == LleComparison::observation_space) {
      const auto lle_fit = fit_lle_positive(ps, i, support, LleConstraint::nonneg_sum1);
      const bool failed = compare_fits(nnk_fit.support, nnk_fit.weights, lle_fit.support,
                                       lle_fit.weights, weight_tol, report);
      if (failed) ++report.nodes_failing;
      ++report.n_nodes;
      continue;
    }

    const auto m = static_cast<Index>(support.size());
    Eigen::MatrixXd u(m, ps.dim());
    for (Index a = 0; a < m; ++a) {
      u.row(a) = ps.points.row(support[a]) - ps.points.row(i);
      u.row(a).normalize();
    }
    const Eigen::MatrixXd gram = u * u.transpose();
    const auto sol = solve_simplex_qp(gram);

    Eigen::Map<Eigen::VectorXd> theta(nnk_fit.theta.data(), m);
    theta /= theta.sum();
    nnk_fit.refresh_support();
    std::vector<Index> lle_support;
    std::vector<double> lle_weights;
    for (Index a = 0; a < m; ++a) {
      if (sol.theta[a] > 0.0) {
        lle_support.push_back(support[a]);
        lle_weights.push_back(sol.theta[a]);
      }
    }
    compare_fits(nnk_fit.support, nnk_fit.weights, lle_support, lle_weights, weight_tol,
                 report);
    // With more neighbors than dimensions the minimizer is often not unique,
    // so what is judged is whether the rescaled weights are optimal too.
    const double gap = theta.dot(gram * theta) - sol.objective;
    report.max_objective_gap = std::max(report.max_objective_gap, std::abs(gap));
    if (std::abs(gap) > kGeometrySlack) ++report.nodes_failing;
    ++report.n_nodes;
  }
  return report;
}

}  // namespace nnk
