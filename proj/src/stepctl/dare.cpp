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
#include <cmath>

#include "tlp/stepctl.hpp"

namespace tlp {

DareResult solve_dare(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::MatrixXd& q,
                      const Eigen::MatrixXd& r, int max_iter) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n || b.rows() != n || q.rows() != n || q.cols() != n || r.rows() != b.cols() ||
      r.cols() != b.cols())
    throw ConfigError("DARE operand dimensions disagree");
  const Eigen::LLT<Eigen::MatrixXd> rl(r);
  if (rl.info() != Eigen::Success) throw ConfigError("input cost must be positive definite");

  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd ak = a;
  Eigen::MatrixXd gk = b * rl.solve(b.transpose());
  Eigen::MatrixXd hk = q;
  DareResult out;
  bool converged = false;
  for (int it = 1; it <= max_iter; ++it) {
    const Eigen::PartialPivLU<Eigen::MatrixXd> w(eye + gk * hk);
    const Eigen::MatrixXd wa = w.solve(ak);
    const Eigen::MatrixXd wg = w.solve(gk);
    const Eigen::MatrixXd h_next = hk + ak.transpose() * hk * wa;
    gk = gk + ak * wg * ak.transpose();
    ak = ak * wa;
    const double step = (h_next - hk).norm();
    hk = 0.5 * (h_next + h_next.transpose());
    out.iterations = it;
    if (!hk.allFinite()) break;
    if (step <= 1e-13 * std::max(1.0, hk.norm())) {
      converged = true;
      break;
    }
  }
  if (!converged) throw NumericalError("Riccati doubling did not converge; pair may be unstabilizable");

  out.p = hk;
  const Eigen::MatrixXd btp = b.transpose() * out.p;
  const Eigen::MatrixXd s = r + btp * b;
  out.k = s.ldlt().solve(btp * a);
  const Eigen::MatrixXd res =
      a.transpose() * out.p * a - a.transpose() * out.p * b * out.k + q - out.p;
  out.residual = res.norm() / std::max(1.0, out.p.norm());
  // Doubling can settle on a huge but finite P when a mode cannot be stabilized.
  if (!(out.residual <= 1e-6) || !out.k.allFinite() || !(spectral_radius(a - b * out.k) < 1.0))
    throw NumericalError("Riccati solution is not stabilizing; pair may be unstabilizable");
  return out;
}

}  // namespace tlp
