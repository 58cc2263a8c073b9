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
#include <algorithm>
#include <cmath>

#include "tlp/analysis.hpp"

namespace tlp {

PushSurface push_response_surface(std::shared_ptr<const ControlGrid> grid, const PeriodicGait& gait,
                                  const Controller& ctrl, const std::vector<double>& starts,
                                  const std::vector<double>& ends, const Eigen::Vector4d& push) {
  PushSurface out;
  out.starts = starts;
  out.ends = ends;
  out.push = push;
  const auto ns = static_cast<Eigen::Index>(starts.size());
  const auto ne = static_cast<Eigen::Index>(ends.size());
  for (auto& m : out.err) m = Eigen::MatrixXd::Zero(ns, ne);
  const GaitTiming& tm = grid->timing();
  for (Eigen::Index i = 0; i < ns; ++i) {
    for (Eigen::Index k = 0; k < ne; ++k) {
      const int a = tm.index_at(starts[static_cast<std::size_t>(i)] * tm.stride());
      const int b = tm.index_at(ends[static_cast<std::size_t>(k)] * tm.stride());
      if (b <= a) continue;
      const PushFn fn = [&](int stride, int j, double) {
        return stride == 0 && j >= a && j < b ? push : Eigen::Vector4d::Zero();
      };
      Episode ep(grid, gait, ctrl);
      for (std::size_t s = 0; s < out.err.size(); ++s) {
        const StrideRecord rec = ep.run_stride(fn);
        out.err[s](i, k) = rec.diverged ? kDivergenceNorm : std::min(rec.error_norm, kDivergenceNorm);
      }
    }
  }
  return out;
}

}  // namespace tlp
