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

#include "nnk/nnqp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/QR>

namespace nnk {

namespace {

constexpr double kRidgeLadder[] = {1e-10, 1e-8, 1e-6};
constexpr double kMinRcond = 1e-13;

struct BlockSingular {};

void check_problem(const QPProblem& p) {
  const Index n = p.size();
  if (p.K_SS.rows() != n || p.K_SS.cols() != n) {
    throw DimensionMismatch("K_SS is " + std::to_string(p.K_SS.rows()) + "x" +
                            std::to_string(p.K_SS.cols()) + " but K_Si has " +
                            std::to_string(n) + " entries");
  }
  if (!p.K_SS.allFinite() || !p.K_Si.allFinite()) {
    throw InvalidArgument("QP data must be finite");
  }
  if (!(p.ridge >= 0.0) || !(p.zero_tol >= 0.0)) {
    throw InvalidArgument("ridge and zero_tol must be nonnegative");
  }
}

// Solves A_PP z_P = b_P, scattering into a full-length vector.
bool solve_block(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                 const std::vector<Index>& passive, Eigen::VectorXd& z) {
  const auto m = static_cast<Index>(passive.size());
  Eigen::MatrixXd a_pp(m, m);
  Eigen::VectorXd b_p(m);
  for (Index r = 0; r < m; ++r) {
    b_p(r) = b(passive[r]);
    for (Index c = 0; c < m; ++c) a_pp(r, c) = a(passive[r], passive[c]);
  }
  Eigen::LLT<Eigen::MatrixXd> llt(a_pp);
  if (llt.info() != Eigen::Success || llt.rcond() < kMinRcond) return false;
  const Eigen::VectorXd z_p = llt.solve(b_p);
  if (!z_p.allFinite()) return false;
  z.setZero(b.size());
  for (Index r = 0; r < m; ++r) z(passive[r]) = z_p(r);
  return true;
}

QPSolution finish(const QPProblem& p, Eigen::VectorXd theta, double ridge,
                  int iterations) {
  QPSolution s;
  for (Index q = 0; q < theta.size(); ++q) {
    if (theta(q) <= p.zero_tol) {
      theta(q) = 0.0;
      s.active_set.push_back(q);
    }
  }
  s.dual = p.K_SS * theta - p.K_Si;
  s.objective = qp_objective(p, theta);
  s.theta = std::move(theta);
  s.ridge_used = ridge;
  s.iterations = iterations;
  return s;
}

QPSolution lawson_hanson(const QPProblem& p, double ridge) {
  const Index n = p.size();
  Eigen::MatrixXd a = p.K_SS;
  a.diagonal().array() += ridge;
  const Eigen::VectorXd& b = p.K_Si;
  const double dual_tol = 1e-14 * std::max(1.0, b.cwiseAbs().maxCoeff());
  const int max_changes = static_cast<int>(10 * n);

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd z(n);
  std::vector<Index> passive;
  std::vector<bool> in_passive(n, false);
  // Coordinates whose entry made no progress since theta last changed.
  std::vector<bool> blocked(n, false);
  int changes = 0;

  auto count_change = [&] {
    if (++changes > max_changes) {
      throw QPNonConvergence(
          "active-set swap cap (" + std::to_string(max_changes) + ") reached",
          finish(p, theta, ridge, changes));
    }
  };

  while (true) {
    const Eigen::VectorXd w = b - a * theta;
    Index enter = -1;
    for (Index j = 0; j < n; ++j) {
      if (in_passive[j] || blocked[j] || w(j) <= dual_tol) continue;
      if (enter < 0 || w(j) > w(enter)) enter = j;
    }
    if (enter < 0) break;
    count_change();
    passive.push_back(enter);
    in_passive[enter] = true;

    bool first_pass = true;
    while (true) {
      if (!solve_block(a, b, passive, z)) throw BlockSingular{};
      bool all_positive = true;
      for (Index q : passive) all_positive = all_positive && z(q) > 0.0;
      if (all_positive) {
        theta = z;
        std::fill(blocked.begin(), blocked.end(), false);
        break;
      }
      if (first_pass && z(enter) <= 0.0) {
        // Roundoff: the entering gradient was positive but the block solve
        // does not move it off zero. Leave theta as is and skip it.
        passive.pop_back();
        in_passive[enter] = false;
        blocked[enter] = true;
        break;
      }
      first_pass = false;

      double alpha = std::numeric_limits<double>::infinity();
      Index leave = -1;
      for (Index q : passive) {
        if (z(q) > 0.0) continue;
        const double step = theta(q) / (theta(q) - z(q));
        if (step < alpha) {
          alpha = step;
          leave = q;
        }
      }
      theta += alpha * (z - theta);
      theta(leave) = 0.0;
      std::erase_if(passive, [&](Index q) {
        if (theta(q) > 0.0) return false;
        theta(q) = 0.0;
        in_passive[q] = false;
        return true;
      });
      std::fill(blocked.begin(), blocked.end(), false);
      count_change();
    }
  }

  // Weights under zero_tol become exact zeros and the rest is re-solved so
  // stationarity holds on the reported support. Zeroing several weights at
  // once can push a pruned gradient past zero_tol, so this drops one weight
  // at a time and re-admits any coordinate whose gradient exceeds zero_tol.
  // A lone re-admitted coordinate gets w_k / s_k >= w_k > zero_tol.
  auto worst_gradient = [&](const Eigen::VectorXd& t, Index* at) {
    const Eigen::VectorXd w = b - a * t;
    double worst = -std::numeric_limits<double>::infinity();
    for (Index j = 0; j < n; ++j) {
      if (t(j) == 0.0 && w(j) > worst) {
        worst = w(j);
        *at = j;
      }
    }
    return worst;
  };
  std::erase_if(passive, [&](Index q) { return !(theta(q) > 0.0); });
  Eigen::VectorXd settled = theta;
  for (int round = 0; round < 2 * n + 2; ++round) {
    auto small = std::min_element(passive.begin(), passive.end(),
                                  [&](Index l, Index r) { return theta(l) < theta(r); });
    if (small != passive.end() && theta(*small) <= p.zero_tol) {
      passive.erase(small);
    } else {
      Index enter = -1;
      if (worst_gradient(theta, &enter) <= p.zero_tol) {
        settled = theta;
        break;
      }
      passive.push_back(enter);
    }
    if (passive.empty()) {
      theta.setZero();
    } else if (!solve_block(a, b, passive, z)) {
      break;
    } else {
      theta = z;
    }
  }
  theta = settled;
  return finish(p, std::move(theta), ridge, changes);
}

}  // namespace

double qp_objective(const QPProblem& p, const Eigen::VectorXd& theta) {
  return 0.5 * theta.dot(p.K_SS * theta) - p.K_Si.dot(theta) +
         0.5 * p.self_similarity;
}

QPSolution solve(const QPProblem& p) {
  check_problem(p);
  if (p.size() == 0) return finish(p, Eigen::VectorXd(0), p.ridge, 0);

  std::vector<double> ridges{p.ridge};
  for (double r : kRidgeLadder) {
    if (r > p.ridge) ridges.push_back(r);
  }
  for (double ridge : ridges) {
    try {
      return lawson_hanson(p, ridge);
    } catch (const BlockSingular&) {
    }
  }
  throw SingularSystem("block system singular even with ridge " +
                       std::to_string(ridges.back()));
}

QPSolution solve_by_enumeration(const QPProblem& p) {
  check_problem(p);
  const Index n = p.size();
  if (n > 12) throw SizeLimit("enumeration limited to |S| <= 12");

  Eigen::MatrixXd a = p.K_SS;
  a.diagonal().array() += p.ridge;
  const double slack = 1e-10 * std::max(1.0, p.K_Si.cwiseAbs().maxCoeff());

  Eigen::VectorXd best;
  double best_objective = std::numeric_limits<double>::infinity();
  std::vector<Index> beta;
  Eigen::VectorXd theta(n);
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    beta.clear();
    for (Index q = 0; q < n; ++q) {
      if (mask & (1u << q)) beta.push_back(q);
    }
    theta.setZero();
    if (!beta.empty()) {
      if (!solve_block(a, p.K_Si, beta, theta)) continue;
      bool positive = true;
      for (Index q : beta) positive = positive && theta(q) > 0.0;
      if (!positive) continue;
    }
    // Zero block must satisfy K_bg' theta_b - K_gi >= 0.
    const Eigen::VectorXd residual = a * theta - p.K_Si;
    bool optimal = true;
    for (Index q = 0; q < n && optimal; ++q) {
      if (!(mask & (1u << q))) optimal = residual(q) >= -slack;
    }
    if (!optimal) continue;
    const double obj = qp_objective(p, theta);
    if (obj < best_objective) {
      best_objective = obj;
      best = theta;
    }
  }
  if (best.size() == 0) {
    throw SingularSystem("no active-set partition satisfies the KKT conditions");
  }
  return finish(p, std::move(best), p.ridge, static_cast<int>(1u << n));
}

KKTResiduals kkt_residuals(const QPProblem& p, const QPSolution& s) {
  KKTResiduals r;
  if (s.theta.size() == 0) return r;
  r.stationarity =
      (p.K_SS * s.theta - p.K_Si - s.dual).cwiseAbs().maxCoeff();
  r.complementarity = std::abs(s.dual.dot(s.theta));
  r.dual_infeasibility = std::max(0.0, -s.dual.minCoeff());
  r.primal_infeasibility = std::max(0.0, -s.theta.minCoeff());
  return r;
}

SimplexQPSolution solve_simplex_qp(const Eigen::MatrixXd& M, double zero_tol) {
  const Index n = M.rows();
  if (n == 0 || M.cols() != n) {
    throw DimensionMismatch("simplex QP needs a non-empty square matrix");
  }
  if (!M.allFinite()) throw InvalidArgument("simplex QP data must be finite");
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  const double tol = 1e-13 * scale;
  const int max_iterations = static_cast<int>(10 * n + 10);

  Index start = 0;
  for (Index j = 1; j < n; ++j) {
    if (M(j, j) < M(start, start)) start = j;
  }
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(n);
  theta(start) = 1.0;
  std::vector<Index> free_set{start};
  std::vector<bool> is_free(n, false);
  is_free[start] = true;

  int it = 0;
  for (; it < max_iterations; ++it) {
    const Eigen::VectorXd g = M * theta;
    const auto m = static_cast<Index>(free_set.size());
    // Equality-constrained step on the free set:
    // [M_FF 1; 1' 0] [p; mu] = [-g_F; 0].
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(m + 1, m + 1);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + 1);
    for (Index r = 0; r < m; ++r) {
      for (Index c = 0; c < m; ++c) kkt(r, c) = M(free_set[r], free_set[c]);
      kkt(r, m) = 1.0;
      kkt(m, r) = 1.0;
      rhs(r) = -g(free_set[r]);
    }
    const Eigen::VectorXd sol = kkt.completeOrthogonalDecomposition().solve(rhs);
    const Eigen::VectorXd step = sol.head(m);

    if (step.cwiseAbs().maxCoeff() <= 1e-12) {
      double level = 0.0;
      for (Index q : free_set) level += g(q);
      level /= static_cast<double>(m);
      Index enter = -1;
      double most_negative = -tol;
      for (Index k = 0; k < n; ++k) {
        if (is_free[k]) continue;
        const double lambda = g(k) - level;
        if (lambda < most_negative) {
          most_negative = lambda;
          enter = k;
        }
      }
      if (enter < 0) break;
      free_set.push_back(enter);
      is_free[enter] = true;
      continue;
    }

    double alpha = 1.0;
    Index leave = -1;
    for (Index r = 0; r < m; ++r) {
      if (step(r) >= 0.0) continue;
      const double a = -theta(free_set[r]) / step(r);
      if (a < alpha) {
        alpha = a;
        leave = free_set[r];
      }
    }
    for (Index r = 0; r < m; ++r) theta(free_set[r]) += alpha * step(r);
    if (leave >= 0) {
      theta(leave) = 0.0;
      is_free[leave] = false;
      std::erase(free_set, leave);
    }
  }
  if (it == max_iterations) {
    throw NonConvergence("simplex QP iteration cap reached");
  }

  double total = 0.0;
  for (Index q = 0; q < n; ++q) {
    if (theta(q) <= zero_tol) theta(q) = 0.0;
    theta(q) = std::max(theta(q), 0.0);
    total += theta(q);
  }
  theta /= total;
  SimplexQPSolution out;
  out.objective = theta.dot(M * theta);
  out.theta = std::move(theta);
  out.iterations = it;
  return out;
}

}  // namespace nnk
