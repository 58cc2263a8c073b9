// Copyright 2026 The tlp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Dense tableau simplex with Bland's rule. Small programs only.
#include <limits>

#include "tlp/analysis.hpp"

namespace tlp {

LpResult simplex_maximize(const Eigen::VectorXd& c, const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                          double tol) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  if (c.size() != n || b.size() != m) throw ConfigError("linear program dimensions disagree");
  if (!a.allFinite() || !b.allFinite() || !c.allFinite()) throw NumericalError("linear program has non-finite data");
  if (m > 0 && b.minCoeff() < -tol) throw ConfigError("origin is not feasible");

  // Rows 0..m-1 constraints, row m objective (reduced costs, negated).
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m + 1, n + m + 1);
  t.topLeftCorner(m, n) = a;
  t.block(0, n, m, m).setIdentity();
  t.topRightCorner(m, 1) = b.cwiseMax(0.0);
  t.bottomLeftCorner(1, n) = -c.transpose();
  std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) basis[static_cast<std::size_t>(i)] = n + i;

  LpResult res;
  const int max_pivots = 50 * static_cast<int>(n + m) + 1000;
  for (;;) {
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < n + m; ++j) {
      if (t(m, j) < -tol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) break;
    Eigen::Index leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      if (t(i, enter) <= tol) continue;
      const double r = t(i, n + m) / t(i, enter);
      const bool tie = leave >= 0 && r <= best + tol &&
                       basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)];
      if (r < best - tol || tie) {
        best = std::min(best, r);
        leave = i;
      }
    }
    if (leave < 0) {
      res.status = LpResult::Status::unbounded;
      break;
    }
    t.row(leave) /= t(leave, enter);
    for (Eigen::Index i = 0; i <= m; ++i)
      if (i != leave && t(i, enter) != 0.0) t.row(i) -= t(i, enter) * t.row(leave);
    basis[static_cast<std::size_t>(leave)] = enter;
    if (++res.pivots > max_pivots) throw NumericalError("simplex did not terminate");
  }
  res.x = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < m; ++i)
    if (basis[static_cast<std::size_t>(i)] < n) res.x(basis[static_cast<std::size_t>(i)]) = t(i, n + m);
  res.value = res.status == LpResult::Status::optimal ? c.dot(res.x) : std::numeric_limits<double>::infinity();
  return res;
}

}  // namespace tlp
