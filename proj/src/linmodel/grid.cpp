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
#include "tlp/linmodel.hpp"

namespace tlp {

StrideGrid::StrideGrid(const ModelParams& params, const GaitTiming& timing)
    : params_(params), timing_(timing) {
  params_.validate();
  timing_.validate();
  stride_ = stride_transfer(params_, timing_);
  stride_c_ = constrain_foot_velocity(stride_);
  steps_ = step_matrices(params_, timing_);
  const int n = timing_.steps();
  remaining_.reserve(static_cast<std::size_t>(n));
  remaining_c_.reserve(static_cast<std::size_t>(n));
  remaining_cond_.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    remaining_.push_back(remaining_transfer(params_, timing_, timing_.time_at(j)));
    const double cond = constraint_condition(remaining_.back().m);
    remaining_cond_.push_back(cond);
    if (cond <= kConstraintCondLimit)
      remaining_c_.emplace_back(constrain_foot_velocity(remaining_.back()));
    else
      remaining_c_.emplace_back(std::nullopt);
  }
}

}  // namespace tlp
