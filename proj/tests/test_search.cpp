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
#include <limits>

#include "doctest.h"
#include "tlp/search.hpp"

using namespace tlp;

namespace {

const SearchModel& adult_model() {
  static const SearchModel m = make_search_model(ModelParams::adult());
  return m;
}

const SearchModel& classify_model() {
  static const SearchModel m =
      make_search_model(ModelParams::adult(), GaitTiming::from_frequency(1.8, 0.2), 0.5);
  return m;
}

Controller c1_controller(const SearchModel& m, std::size_t variant = 0) {
  return make_ctpc(m.grid->model_ptr(), m.gains[variant], ProjectionConfig::named("C1"));
}

// Every stride simulated in full, no linear tail.
CostPair brute_force(const SearchModel& m, const Controller& c, double r, const PushFn& push, const Vec23& start,
                     int horizon) {
  Episode ep(m.grid, m.gait, c, start);
  CostPair acc;
  for (int s = 0; s < horizon; ++s) {
    const StrideRecord rec = ep.run_stride(push);
    acc.state += rec.error_norm * rec.error_norm;
    acc.input += r * rec.input_cost;
  }
  return acc;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1e-12, std::max(std::abs(a), std::abs(b))); }

}  // namespace

TEST_CASE("sub-period boundaries cover the stride") {
  CHECK(sub_period_index(0, 7, 100) == 0);
  CHECK(sub_period_index(7, 7, 100) == 100);
  for (int j = 0; j < 7; ++j) CHECK(sub_period_index(j, 7, 100) < sub_period_index(j + 1, 7, 100));
}

TEST_CASE("self-stability cost matches full simulation") {
  const SearchModel& m = adult_model();
  const Controller c = c1_controller(m);
  const SearchOptions opt;
  const double r = input_weight(Variant::aggressive);
  const CostEvaluator ev(m, c, r, opt);
  for (int i = 0; i < 6; ++i) {
    CAPTURE(i);
    const Vec23 start = reconstruct_state(Vec6::Unit(i), m.gait.beta.segment<2>(ix::stance), m.gait.beta);
    const CostPair want = brute_force(m, c, r, no_push, start, opt.horizon);
    const CostPair got = ev.self_stability(i);
    CHECK(rel(got.state, want.state) < 1e-8);
    CHECK(rel(got.input, want.input) < 1e-8);
  }
}

TEST_CASE("push cost matches full simulation") {
  const SearchModel& m = adult_model();
  const Controller c = c1_controller(m, 1);
  const SearchOptions opt;
  const double r = input_weight(Variant::normal);
  const CostEvaluator ev(m, c, r, opt);
  const int n = m.grid->steps();
  for (auto [j1, j2] : {std::pair{0, 1}, std::pair{2, 5}, std::pair{0, 6}}) {
    CAPTURE(j1);
    CAPTURE(j2);
    const int a = sub_period_index(j1, opt.sub_periods, n);
    const int b = sub_period_index(j2 + 1, opt.sub_periods, n);
    const PushFn push = [&](int s, int j, double) {
      return s == 0 && j >= a && j < b ? Eigen::Vector4d(opt.push_magnitude, 0, 0, 0) : Eigen::Vector4d::Zero();
    };
    CostPair want = brute_force(m, c, r, push, m.gait.beta, opt.horizon);
    want.input *= opt.mu * (j2 - j1) * (j2 - j1);
    const CostPair got = ev.push(j1, j2);
    CHECK(rel(got.state, want.state) < 1e-8);
    CHECK(rel(got.input, want.input) < 1e-8);
  }
}

TEST_CASE("zero push costs nothing") {
  const SearchModel& m = adult_model();
  const CostEvaluator ev(m, c1_controller(m), 1.0, SearchOptions{});
  const CostPair z = ev.push(1, 4, 0.0);
  CHECK(z.state < 1e-20);
  CHECK(z.input < 1e-20);
  CHECK_THROWS_AS(ev.push(3, 3), ConfigError);
  CHECK_THROWS_AS(ev.push(0, 7), ConfigError);
  CHECK(ev.all().size() == 54);
}

TEST_CASE("costs do not depend on walking speed") {
  const SearchModel& slow = adult_model();
  const SearchModel fast = make_search_model(ModelParams::adult(), 0.1, 1.2);
  const CostEvaluator a(slow, c1_controller(slow), 0.01, SearchOptions{});
  const CostEvaluator b(fast, c1_controller(fast), 0.01, SearchOptions{});
  const auto va = a.all();
  const auto vb = b.all();
  REQUIRE(va.size() == vb.size());
  for (std::size_t i = 0; i < va.size(); ++i) {
    CAPTURE(i);
    CHECK(std::abs(va[i] - vb[i]) <= 1e-7 * std::max(1.0, std::abs(va[i])));
  }
}

TEST_CASE("normalization sums log ratios to the per-dimension minimum") {
  std::vector<ConfigScore> s(2);
  for (auto& c : s)
    for (auto& v : c.raw) v = {1.0, 0.0};
  s[0].raw[0] = {10.0, 0.0};
  s[1].raw[2] = {1.0, 1e-10};
  normalize_costs(s, 1e-12);
  CHECK(s[0].cost == doctest::Approx(1.0));
  CHECK(s[1].cost == doctest::Approx(2.0));
  s[1].raw[1][0] = std::numeric_limits<double>::infinity();
  normalize_costs(s);
  CHECK(std::isinf(s[1].cost));
  s[1].raw[1].push_back(1.0);
  CHECK_THROWS_AS(normalize_costs(s), ConfigError);
}

TEST_CASE("search subset is deterministic, sorted and classifies the presets") {
  std::vector<SearchModel> models{adult_model()};
  std::vector<int> idx{0, 1365, 2730, 4095};
  for (const char* n : {"C1", "C2", "C3", "C4"}) idx.push_back(ProjectionConfig::named(n).index());
  SearchOptions opt;
  opt.threads = 1;
  const SearchResult a = run_search(models, classify_model(), opt, idx);
  opt.threads = 3;
  int calls = 0;
  const SearchResult b = run_search(models, classify_model(), opt, idx, [&](int, int) { ++calls; });
  CHECK(calls == static_cast<int>(idx.size()));
  REQUIRE(a.sorted.size() == idx.size());
  for (std::size_t i = 0; i < a.sorted.size(); ++i) {
    CHECK(a.sorted[i].cfg.index() == b.sorted[i].cfg.index());
    CHECK(a.sorted[i].cost == b.sorted[i].cost);
    if (i > 0) CHECK(a.sorted[i - 1].cost <= a.sorted[i].cost);
  }
  const Category want[] = {Category::c1, Category::c2, Category::c3, Category::c4};
  for (int k = 0; k < 4; ++k) {
    const int index = ProjectionConfig::named("C" + std::to_string(k + 1)).index();
    for (const ConfigScore& s : a.sorted)
      if (s.cfg.index() == index) CHECK(s.category == want[k]);
    const auto& best = a.best[static_cast<std::size_t>(k)];
    REQUIRE(best.has_value());
    for (const ConfigScore& s : a.sorted)
      if (s.category == want[k]) CHECK(best->cost <= s.cost);
  }
  CHECK_THROWS_AS(run_search({}, classify_model(), opt, idx), ConfigError);
}
