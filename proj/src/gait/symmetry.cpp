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
#include "tlp/gait.hpp"

namespace tlp {

const TransformConstants& TransformConstants::get() {
  static const TransformConstants k = [] {
    TransformConstants c;
    // Columns follow Sel::xp: swing(2), pelvis(2), pelvis vel(2), stance(2).
    c.M.setZero();
    c.M(0, 0) = -1; c.M(0, 2) = 1;
    c.M(1, 1) = -1; c.M(1, 3) = 1;
    c.M(2, 2) = 1;  c.M(2, 6) = -1;
    c.M(3, 3) = 1;  c.M(3, 7) = -1;
    c.M(4, 4) = 1;
    c.M(5, 5) = 1;
    c.T.setZero();
    c.T(0, 6) = 1; c.T(1, 7) = 1;
    c.T(6, 0) = 1; c.T(7, 1) = 1;
    for (int i = 2; i < 6; ++i) c.T(i, i) = 1;
    c.O = Vec6(1, -1, 1, -1, 1, -1).asDiagonal();
    return c;
  }();
  return k;
}

Mat6x23 symmetry_operator(const TransferMatrix& hc) {
  const auto& k = TransformConstants::get();
  const auto sxp = Sel::matrix(Sel::xp);
  return -k.M * sxp + k.O * k.M * k.T * sxp * hc.m;
}

const std::vector<int>& admissible_entries() {
  static const std::vector<int> cols{0, 1, 2, 3, 4, 5, 12, 13, 14, 15, 16, 17};
  return cols;
}

Eigen::Matrix<double, kDim, Eigen::Dynamic> periodic_gaits(const Mat6x23& r) {
  const auto& cols = admissible_entries();
  const Eigen::MatrixXd ra = r(Eigen::all, cols);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(ra, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double cut = 1e-9 * (s.size() ? s(0) : 0.0);
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > cut) ++rank;
  const int dim = static_cast<int>(cols.size()) - rank;
  if (dim <= 0) throw NumericalError("no periodic gait at this timing");
  Eigen::Matrix<double, kDim, Eigen::Dynamic> basis(kDim, dim);
  basis.setZero();
  const Eigen::MatrixXd v = svd.matrixV().rightCols(dim);
  for (std::size_t i = 0; i < cols.size(); ++i) basis.row(cols[i]) = v.row(static_cast<int>(i));
  return basis;
}

}  // namespace tlp
