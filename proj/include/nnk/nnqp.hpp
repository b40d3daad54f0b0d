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

#ifndef NNK_NNQP_HPP
#define NNK_NNQP_HPP

#include <vector>

#include <Eigen/Core>

#include "nnk/dataset.hpp"
#include "nnk/error.hpp"

namespace nnk {

/// Weights at or below this are treated as exactly zero.
inline constexpr double kZeroTol = 1e-8;

/// min over theta >= 0 of 1/2 theta' A theta - b' theta, where A = K_SS and
/// b = K_Si for NNK. `self_similarity` is K_ii and only shifts the reported
/// objective.
struct QPProblem {
  Eigen::MatrixXd K_SS;
  Eigen::VectorXd K_Si;
  double zero_tol = kZeroTol;
  double ridge = 0.0;
  double self_similarity = 1.0;

  Index size() const { return K_Si.size(); }
};

struct QPSolution {
  Eigen::VectorXd theta;
  /// 1/2 theta' K_SS theta - K_Si' theta + 1/2 self_similarity.
  double objective = 0.0;
  /// K_SS theta - K_Si: zero on the support, nonnegative off it at optimum.
  Eigen::VectorXd dual;
  std::vector<Index> active_set;  // coordinates with theta == 0
  double ridge_used = 0.0;
  int iterations = 0;
};

/// Carries the best iterate reached before the swap cap.
class QPNonConvergence : public NonConvergence {
 public:
  QPNonConvergence(const std::string& what, QPSolution best)
      : NonConvergence(what), best_(std::move(best)) {}
  const QPSolution& best_iterate() const { return best_; }

 private:
  QPSolution best_;
};

/// Lawson-Hanson style active-set solve. Retries with diagonal ridge
/// 1e-10, 1e-8, 1e-6 (those above p.ridge) when a block system is singular.
/// Throws SingularSystem if every ridge fails and QPNonConvergence after
/// 10 |S| active-set changes.
QPSolution solve(const QPProblem& p);

/// Exhaustive search over all 2^|S| splits into a positive block beta and a
/// zero block gamma: solve K_bb theta_b = K_bi, accept when theta_b > 0 and
/// K_bg' theta_b - K_gi >= 0. Test oracle; throws SizeLimit above |S| = 12.
QPSolution solve_by_enumeration(const QPProblem& p);

/// 1/2 theta' K_SS theta - K_Si' theta + 1/2 self_similarity.
double qp_objective(const QPProblem& p, const Eigen::VectorXd& theta);

struct KKTResiduals {
  double stationarity = 0.0;     // ||K_SS theta - K_Si - dual||_inf
  double complementarity = 0.0;  // |dual' theta|
  double dual_infeasibility = 0.0;    // max(0, -min dual)
  double primal_infeasibility = 0.0;  // max(0, -min theta)

  bool within(double tol) const {
    return stationarity <= tol && complementarity <= tol &&
           dual_infeasibility <= tol && primal_infeasibility <= tol;
  }
};

KKTResiduals kkt_residuals(const QPProblem& p, const QPSolution& s);

/// min over theta >= 0, sum(theta) = 1 of theta' M theta, by a primal
/// active-set method on the bordered KKT system. Used for sum-to-one LLE.
struct SimplexQPSolution {
  Eigen::VectorXd theta;
  double objective = 0.0;  // theta' M theta
  int iterations = 0;
};

SimplexQPSolution solve_simplex_qp(const Eigen::MatrixXd& M,
                                   double zero_tol = kZeroTol);

}  // namespace nnk

#endif  // NNK_NNQP_HPP
