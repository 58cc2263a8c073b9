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
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "tlp/linmodel.hpp"

using namespace tlp;

namespace {

const ModelParams kAdult = ModelParams::adult();

// Swing-velocity block singularity inside single support, found by bisection.
double singular_ss_time(const ModelParams& p) {
  const PhaseDynamics ss = build_phase_dynamics(p, Phase::ss);
  auto f = [&](double t) { return constraint_block(transfer_matrix(ss, t).m)(0, 0); };
  double lo = 0.05, hi = 0.05;
  while (f(lo) * f(hi + 0.01) > 0) hi += 0.01;
  hi += 0.01;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(lo) * f(mid) <= 0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

bool is_sagittal(int i) { return i < 22 && i % 2 == 0; }
bool is_lateral(int i) { return i == 22 || i % 2 == 1; }

}  // namespace

TEST_CASE("selectors cover disjoint entries of the state") {
  CHECK(kDim == 23);
  std::array<int, kDim> seen{};
  for (int i : Sel::x8) seen[i]++;
  for (int i : Sel::z) seen[i]++;
  for (int i : Sel::w) seen[i]++;
  for (int i = 0; i < kDim; ++i) CHECK(seen[i] == 1);
  const auto s = Sel::matrix(Sel::xp);
  CHECK(s.rows() == 8);
  CHECK(s(0, 2) == 1.0);
  CHECK(s.sum() == 8.0);
}

TEST_CASE("generator structure") {
  for (Phase ph : {Phase::ds, Phase::ss}) {
    const MatAug a = build_phase_dynamics(kAdult, ph).generator;
    // Stance foot, inputs, disturbances and side flag are held constant.
    for (int r = ix::stance; r < kDim; ++r) CHECK(a.row(r).isZero(0.0));
    // Sagittal and lateral blocks never couple.
    for (int r = 0; r < kDim; ++r)
      for (int c = 0; c < kDim; ++c)
        if ((is_sagittal(r) && is_lateral(c)) || (is_lateral(r) && is_sagittal(c))) CHECK(a(r, c) == 0.0);
    // Falling pelvis: eigenvalues +-sqrt(g/h1) on the pelvis sub-block.
    Eigen::Matrix2d pel;
    pel << a(0, 0), a(0, 4), a(4, 0), a(4, 4);
    const auto ev = pel.eigenvalues();
    const double k = std::sqrt(kAdult.gravity / kAdult.h1);
    CHECK(std::abs(std::abs(ev(0).real()) - k) < 1e-12);
    CHECK(std::abs(ev(0).real() + ev(1).real()) < 1e-12);
  }
  const MatAug ds = build_phase_dynamics(kAdult, Phase::ds).generator;
  CHECK(ds.row(ix::swing).isZero(0.0));
  CHECK(ds.row(ix::swing_vel).isZero(0.0));
}

TEST_CASE("transfer matrix matches fine-step integration") {
  std::mt19937_64 rng(7);
  const double durations[2] = {0.1, 0.85};
  int k = 0;
  for (Phase ph : {Phase::ds, Phase::ss}) {
    const PhaseDynamics dyn = build_phase_dynamics(kAdult, ph);
    const double t = durations[k++];
    const Mat23 h = transfer_matrix(dyn, t).m;
    double worst = 0.0;
    for (int n = 0; n < 50; ++n) {
      const Vec23 q = oracle::random_state(rng);
      worst = std::max(worst, oracle::rel_err(h * q, oracle::integrate(kAdult, ph, q, 0.0, t)));
    }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("ramp offset matches integration started mid-phase") {
  std::mt19937_64 rng(8);
  const PhaseDynamics ss = build_phase_dynamics(kAdult, Phase::ss);
  const Mat23 h = transfer_matrix(ss, 0.3, 0.2).m;
  for (int n = 0; n < 10; ++n) {
    const Vec23 q = oracle::random_state(rng);
    CHECK(oracle::rel_err(h * q, oracle::integrate(kAdult, Phase::ss, q, 0.2, 0.3)) < 1e-6);
  }
}

TEST_CASE("identity at zero duration and semigroup property") {
  for (Phase ph : {Phase::ds, Phase::ss}) {
    const PhaseDynamics dyn = build_phase_dynamics(kAdult, ph);
    CHECK(transfer_matrix(dyn, 0.0).m.isIdentity(0.0));
    const double t1 = 0.17, t2 = 0.29;
    const Mat23 whole = transfer_matrix(dyn, t1 + t2).m;
    // Ramps keep counting across the split when the offset is carried.
    const Mat23 split = transfer_matrix(dyn, t2, t1).m * transfer_matrix(dyn, t1).m;
    CHECK((whole - split).norm() / whole.norm() < 1e-12);
    // Without ramp inputs the plain composition holds.
    Mat23 no_ramp = Mat23::Identity();
    for (int i : Sel::inputs_ramp) no_ramp(i, i) = 0.0;
    const Mat23 plain = transfer_matrix(dyn, t2).m * transfer_matrix(dyn, t1).m;
    CHECK(((whole - plain) * no_ramp).norm() / whole.norm() < 1e-12);
  }
  CHECK_THROWS_AS(transfer_matrix(build_phase_dynamics(kAdult, Phase::ss), -0.1), DomainError);
}

TEST_CASE("degenerate timing reduces to the double-support flow") {
  const GaitTiming tm = GaitTiming::make(0.2, 0.0);
  const Mat23 h = stride_transfer(kAdult, tm).m;
  const Mat23 ds = transfer_matrix(build_phase_dynamics(kAdult, Phase::ds), 0.2).m;
  CHECK((h - ds).norm() < 1e-12 * ds.norm());
}

TEST_CASE("grid steps compose to the stride map") {
  const GaitTiming tm = GaitTiming::make(0.1, 0.84);
  const auto steps = step_matrices(kAdult, tm);
  REQUIRE(static_cast<int>(steps.size()) == tm.steps());
  Mat23 chain = Mat23::Identity();
  for (int j = 0; j < tm.steps(); ++j) {
    const Mat23 h = partial_transfer(kAdult, tm, tm.time_at(j)).m;
    CHECK((chain - h).norm() / h.norm() < 1e-9);
    CHECK(steps[j].t_from == doctest::Approx(tm.time_at(j)));
    chain = steps[j].m * chain;
  }
  const Mat23 full = stride_transfer(kAdult, tm).m;
  CHECK((chain - full).norm() / full.norm() < 1e-9);
}

TEST_CASE("remaining map completes the partial map") {
  const GaitTiming tm = GaitTiming::make(0.1, 0.84);
  const Mat23 full = stride_transfer(kAdult, tm).m;
  CHECK((remaining_transfer(kAdult, tm, 0.0).m - full).norm() / full.norm() < 1e-12);
  for (double t : {0.03, 0.1, 0.4, 0.93}) {
    const Mat23 prod = remaining_transfer(kAdult, tm, t).m * partial_transfer(kAdult, tm, t).m;
    CHECK((prod - full).norm() / full.norm() < 1e-9);
  }
  CHECK_THROWS_AS(remaining_transfer(kAdult, tm, tm.stride()), DomainError);
  CHECK_THROWS_AS(partial_transfer(kAdult, tm, -0.01), DomainError);
}

TEST_CASE("state grid cache agrees with direct construction") {
  const GaitTiming tm = GaitTiming::make(0.1, 0.84);
  const StrideGrid g(kAdult, tm);
  CHECK(g.steps() == 100);
  const Mat23 full = stride_transfer(kAdult, tm).m;
  CHECK((g.stride().m - full).norm() < 1e-9 * full.norm());
  for (int j : {0, 5, 10, 50, 99}) {
    const Mat23 r = remaining_transfer(kAdult, tm, tm.time_at(j)).m;
    CHECK((g.remaining(j).m - r).norm() < 1e-9 * r.norm());
    if (g.remaining_constrained(j)) CHECK(g.remaining_condition(j) <= kConstraintCondLimit);
  }
}

TEST_CASE("foot velocity elimination") {
  std::mt19937_64 rng(11);
  const GaitTiming tm = GaitTiming::make(0.1, 0.84);
  const TransferMatrix h = stride_transfer(kAdult, tm);
  const TransferMatrix hc = constrain_foot_velocity(h);
  CHECK(hc.constrained);
  // Dedicated channels disappear and the swing foot lands at rest.
  for (int c : Sel::hip_const) CHECK(hc.m.col(c).norm() < 1e-10 * hc.m.norm());
  for (int n = 0; n < 20; ++n) {
    const Vec23 q = oracle::random_state(rng);
    CHECK((hc.m * q)(Sel::swing_vel).norm() < 1e-8 * std::max(1.0, q.norm()));
  }
  // The realised torque reproduces the constrained map through the free one.
  const Vec23 q = oracle::random_state(rng);
  const Eigen::Vector2d u = -constraint_block(h.m).inverse() * (h.m * q)(Sel::swing_vel);
  Vec23 qu = q;
  qu.segment<2>(ix::hip) += u;
  CHECK(oracle::rel_err(hc.m * q, h.m * qu) < 1e-9);
  // Applying the elimination twice changes nothing.
  CHECK((constrain_foot_velocity(hc).m - hc.m).norm() < 1e-9 * hc.m.norm());
}

TEST_CASE("foot velocity elimination fails at the block singularity") {
  const double ts = singular_ss_time(kAdult);
  CHECK(ts > 0.3);
  CHECK(ts < 0.8);
  const TransferMatrix h = transfer_matrix(build_phase_dynamics(kAdult, Phase::ss), ts);
  CHECK(constraint_condition(h.m) > kConstraintCondLimit);
  CHECK_THROWS_AS(constrain_foot_velocity(h), ConstraintError);
  try {
    constrain_foot_velocity(h);
  } catch (const ConstraintError& e) {
    CHECK(e.condition() > kConstraintCondLimit);
  }
}

TEST_CASE("timing grid") {
  const GaitTiming tm = GaitTiming::make(0.1, 0.9);
  CHECK(tm.n_ds == 10);
  CHECK(tm.n_ss == 90);
  CHECK(tm.time_at(10) == doctest::Approx(0.1));
  CHECK(tm.index_at(0.1) == 10);
  CHECK(tm.index_at(5.0) == 100);
  CHECK_NOTHROW(tm.validate());
  const GaitTiming f = GaitTiming::from_frequency(2.0, 0.2);
  CHECK(f.stride() == doctest::Approx(0.5));
  CHECK(f.t_ds == doctest::Approx(0.1));
  CHECK_THROWS_AS(GaitTiming::make(-0.1, 0.5), DomainError);
  CHECK_THROWS_AS(GaitTiming::from_frequency(1.0, 1.2), DomainError);
}

TEST_CASE("presets and parameter validation") {
  const ModelParams kid = ModelParams::kid();
  CHECK(kid.h1 == doctest::Approx(0.55 * kAdult.h1));
  CHECK(kid.pelvis_mass == doctest::Approx(0.25 * kAdult.pelvis_mass));
  CHECK(preset_from_name(preset_name(Preset::kid)) == Preset::kid);
  CHECK_THROWS_AS(preset_from_name("giant"), ConfigError);
  ModelParams bad = kAdult;
  bad.h2 = 0.0;
  CHECK_THROWS_AS(bad.validate(), ParamError);
  CHECK_THROWS_AS(build_phase_dynamics(bad, Phase::ss), ParamError);
}

TEST_CASE("touch-down relabel swaps feet and mirrors lateral axes") {
  Vec23 q = Vec23::Zero();
  q(ix::swing) = 0.5;
  q(ix::swing + 1) = 0.2;
  q(ix::stance) = -0.1;
  q(ix::stance + 1) = -0.2;
  q(ix::pelvis_vel + 1) = 0.3;
  q(ix::swing_vel) = 1.0;
  q(ix::side) = 1.0;
  const Vec23 n = relabel_at_touchdown(q);
  CHECK(n(ix::stance) == 0.5);
  CHECK(n(ix::stance + 1) == -0.2);
  CHECK(n(ix::swing) == -0.1);
  CHECK(n(ix::swing + 1) == 0.2);
  CHECK(n(ix::pelvis_vel + 1) == -0.3);
  CHECK(n(ix::swing_vel) == 0.0);
  CHECK(n(ix::side) == 1.0);
}
