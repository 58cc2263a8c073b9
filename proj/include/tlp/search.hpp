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
// Exhaustive scoring of the 4096 projection configurations.
#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "tlp/ctpc.hpp"

namespace tlp {

inline constexpr std::array<Variant, 3> kVariants{Variant::aggressive, Variant::normal, Variant::light};

// One model with its walking grid, nominal gait and the three DLQR gains.
struct SearchModel {
  ModelParams params;
  std::shared_ptr<const ControlGrid> grid;
  PeriodicGait gait;
  std::array<FeedbackGain, 3> gains;  // indexed like kVariants
};

// Pseudo-passive timing of the model, gait scaled to `speed`.
SearchModel make_search_model(const ModelParams& params, double t_ds = 0.1, double speed = 0.5,
                              int steps_per_stride = 100);
// Any timing, hip-ramp actuated gait.
SearchModel make_search_model(const ModelParams& params, const GaitTiming& timing, double speed);

struct CostPair {
  double state = 0.0;
  double input = 0.0;
};

struct SearchOptions {
  int horizon = 10;             // strides per cost simulation
  int sub_periods = 7;          // push windows split the stride into this many parts
  double push_magnitude = 20.0; // N, sagittal
  double mu = 1e-2;             // push-duration weight on the input cost
  double zero_floor = 1e-12;    // replaces a zero per-dimension minimum
  int threads = 0;              // 0: hardware concurrency
};

// Linear stride map of a closed loop once no disturbance is active:
// e+ = phi e, and the stride input cost is e' psi e.
struct StrideMap {
  Mat6 phi = Mat6::Zero();
  Mat6 psi = Mat6::Zero();
};

StrideMap probe_stride_map(const SearchModel& m, const Controller& ctrl);

// Cost of one controller on one model. Pushes and perturbations are simulated
// for two strides; later strides follow the probed linear map exactly.
class CostEvaluator {
 public:
  CostEvaluator(const SearchModel& model, Controller ctrl, double input_weight, const SearchOptions& opt);

  // Unit perturbation of error coordinate i (0-based) at the stride start.
  CostPair self_stability(int i) const;
  CostPair self_stability(const Vec6& e0) const;
  // Push over sub-periods j1 through j2 inclusive (0 <= j1 < j2 < sub_periods).
  CostPair push(int j1, int j2, double magnitude) const;
  CostPair push(int j1, int j2) const { return push(j1, j2, opt_.push_magnitude); }
  // 6 self-stability pairs then the C(n,2) push pairs, flattened state/input.
  std::vector<double> all() const;

  const StrideMap& map() const { return map_; }

 private:
  CostPair tail(Vec6 e, int from_stride, CostPair acc) const;
  const SearchModel& model_;
  Controller ctrl_;
  double r_;
  SearchOptions opt_;
  StrideMap map_;
};

// Grid index of push sub-period boundary j.
int sub_period_index(int j, int sub_periods, int steps);

struct ConfigScore {
  ProjectionConfig cfg;
  Category category = Category::c1;
  bool constant_input = false;
  // Raw costs per variant, models concatenated.
  std::array<std::vector<double>, 3> raw;
  double cost = 0.0;  // V_c after normalization
};

// log10 of each entry over its per-dimension minimum, summed over entries
// and variants. Infinite raw costs give an infinite V_c.
void normalize_costs(std::vector<ConfigScore>& scores, double zero_floor = 1e-12);

struct SearchResult {
  std::vector<ConfigScore> sorted;  // ascending cost, ties by flag order
  std::array<std::optional<ConfigScore>, 4> best;  // indexed by Category
};

using ProgressFn = std::function<void(int done, int total)>;

// Scores the given configuration indices (all 4096 when empty). Constant-input
// classification runs on `classify`, typically a well-conditioned timing.
SearchResult run_search(const std::vector<SearchModel>& models, const SearchModel& classify,
                        const SearchOptions& opt, const std::vector<int>& indices = {},
                        const ProgressFn& progress = nullptr);

}  // namespace tlp
