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

#include "doctest.h"
#include "tlp/analysis.hpp"

using namespace tlp;

namespace {

const ModelParams kAdult = ModelParams::adult();

struct Walk {
  GaitTiming tm;
  std::shared_ptr<const ControlGrid> grid;
  PeriodicGait gait;
  Walk(double freq, double speed)
      : tm(GaitTiming::from_frequency(freq, 0.2)),
        grid(std::make_shared<const ControlGrid>(kAdult, tm)),
        gait(periodic_gait(kAdult, tm, speed)) {}
  Controller make(const std::string& tag) const { return make_controller(ControllerSpec::parse(tag), grid->model_ptr()); }
};

RegionConstraints short_horizon() {
  RegionConstraints c;
  c.horizon = 3;
  return c;
}

}  // namespace

TEST_CASE("simplex on small programs") {
  Eigen::MatrixXd a(3, 2);
  a << 1, 1, 1, 3, 1, 0;
  const LpResult r = simplex_maximize(Eigen::Vector2d(3, 2), a, Eigen::Vector3d(4, 6, 3));
  REQUIRE(r.status == LpResult::Status::optimal);
  CHECK(r.value == doctest::Approx(11.0));
  CHECK(r.x(0) == doctest::Approx(3.0));
  CHECK(r.x(1) == doctest::Approx(1.0));

  Eigen::MatrixXd u(1, 1);
  u << -1;
  CHECK(simplex_maximize(Eigen::VectorXd::Ones(1), u, Eigen::VectorXd::Ones(1)).status ==
        LpResult::Status::unbounded);
  CHECK_THROWS_AS(simplex_maximize(Eigen::VectorXd::Ones(1), u, -Eigen::VectorXd::Ones(1)), ConfigError);
  CHECK_THROWS_AS(simplex_maximize(Eigen::VectorXd::Ones(2), u, Eigen::VectorXd::Ones(1)), ConfigError);

  // Degenerate vertex at the origin.
  Eigen::MatrixXd d(3, 2);
  d << 1, -1, -1, 1, 1, 1;
  const LpResult z = simplex_maximize(Eigen::Vector2d(1, 1), d, Eigen::Vector3d(0, 0, 2));
  REQUIRE(z.status == LpResult::Status::optimal);
  CHECK(z.value == doctest::Approx(2.0));
}

TEST_CASE("hull, area and containment") {
  std::vector<Eigen::Vector2d> pts{{0, 0}, {2, 0}, {2, 1}, {0, 1}, {1, 0.5}, {0.5, 0.5}, {2, 0.5}};
  const auto hull = convex_hull(pts);
  CHECK(hull.size() == 4);
  CHECK(polygon_area(hull) == doctest::Approx(2.0));
  CHECK(polygon_contains(hull, {1.0, 0.5}, 0.0));
  CHECK(polygon_contains(hull, {2.0, 1.0}, 0.0));
  CHECK_FALSE(polygon_contains(hull, {2.1, 0.5}, 0.0));
  CHECK(polygon_contains(hull, {2.0 + 1e-7, 0.5}, 1e-6));
  CHECK_FALSE(polygon_contains({{0, 0}, {1, 1}}, {0, 0}, 1.0));
}

TEST_CASE("closed-loop map of stride feedback equals the designed closed loop") {
  const Walk w(1.8, 0.5);
  const ErrorSystem es = build_error_system(w.grid->model().stride_constrained());
  const FeedbackGain g = design_gain(es, Variant::normal);
  const ClosedLoopMap m = closed_loop_map(w.grid, w.gait, make_dlqr(g), 1);
  CHECK(m.superposition_residual < 1e-10);
  CHECK((m.map - (es.ae - es.bu * g.k)).norm() < 1e-8 * std::max(1.0, es.ae.norm()));
  CHECK(m.spectral_radius == doctest::Approx(g.spectral_radius).epsilon(1e-8));
  for (Eigen::Index i = 1; i < m.eigenvalues.size(); ++i)
    CHECK(std::abs(m.eigenvalues(i - 1)) >= std::abs(m.eigenvalues(i)));
  CHECK_THROWS_AS(closed_loop_map(w.grid, w.gait, make_dlqr(g), 0), ConfigError);
}

TEST_CASE("eigen sweep stabilizes and keeps sagittal and lateral spectra paired") {
  const std::vector<ControllerSpec> specs{ControllerSpec::parse("open"), ControllerSpec::parse("dlqr-aggressive"),
                                          ControllerSpec::parse("ctpc-C1-aggressive")};
  const auto reps = eigen_sweep(kAdult, {1.0, 2.0}, specs);
  REQUIRE(reps.size() == 6);
  for (const EigenReport& r : reps) {
    CAPTURE(r.tag);
    CAPTURE(r.frequency);
    CHECK(r.eigenvalues.size() == 6);
    CHECK(r.duplicate_gap < 1e-6);
    if (r.tag == "open") CHECK(r.spectral_radius >= 1.0 - 1e-9);
    else CHECK(r.spectral_radius < 1.0);
  }
}

TEST_CASE("standing gait is periodic with only the sway left") {
  const GaitTiming tm = GaitTiming::from_frequency(1.5, 0.2);
  const PeriodicGait g = standing_gait(kAdult, tm);
  CHECK(g.speed == 0.0);
  CHECK(g.beta(ix::side) == 1.0);
  auto grid = std::make_shared<const ControlGrid>(kAdult, tm);
  Episode ep(grid, g, make_open_loop());
  CHECK(ep.run_stride(no_push).error_norm < 1e-9);
}

TEST_CASE("push surface shape and empty cells") {
  const Walk w(1.8, 0.5);
  const std::vector<double> starts{0.0, 0.5}, ends{0.5, 1.0};
  const PushSurface s = push_response_surface(w.grid, w.gait, w.make("dlqr-aggressive"), starts, ends,
                                              Eigen::Vector4d(20, 0, 0, 0));
  for (const auto& e : s.err) {
    CHECK(e.rows() == 2);
    CHECK(e.cols() == 2);
    CHECK(e(1, 0) == 0.0);
    CHECK(e(0, 0) > 0.0);
  }
  const PushSurface z = push_response_surface(w.grid, w.gait, w.make("ctpc-C1-aggressive"), starts, ends,
                                              Eigen::Vector4d::Zero());
  for (const auto& e : z.err) CHECK(e.maxCoeff() < 1e-9);
}

TEST_CASE("regions contain the origin and sit inside the maximal region") {
  const Walk w(3.0, 0.5);
  const RegionConstraints cons = short_horizon();
  const RegionSlice mx = maximal_region(w.grid, w.gait, {2, 4}, cons, 16);
  CHECK(mx.rays.size() == 16);
  CHECK(mx.capped_rays == 0);
  CHECK(mx.area > 0.0);
  CHECK(polygon_contains(mx.vertices, Eigen::Vector2d::Zero(), 0.0));
  for (const char* tag : {"dlqr-aggressive", "ctpc-C1-aggressive"}) {
    CAPTURE(tag);
    const RegionSlice r = controllable_region(w.grid, w.gait, w.make(tag), {2, 4}, cons, 16);
    CHECK(r.area > 0.0);
    CHECK(r.area <= mx.area * (1.0 + 1e-9));
    CHECK(polygon_contains(r.vertices, Eigen::Vector2d::Zero(), 0.0));
    for (const auto& v : r.vertices) CHECK(polygon_contains(mx.vertices, v, 1e-6));
  }
}

TEST_CASE("zero torque allowance leaves no region") {
  const GaitTiming tm = GaitTiming::from_frequency(2.0, 0.2);
  auto grid = std::make_shared<const ControlGrid>(kAdult, tm);
  RegionConstraints cons = short_horizon();
  cons.hip_torque_limit = 0.0;
  const Controller c = make_controller(ControllerSpec::parse("dlqr-aggressive"), grid->model_ptr());
  const RegionSlice r = controllable_region(grid, standing_gait(kAdult, tm), c, {2, 4}, cons, 16);
  CHECK(r.area < 1e-12);
  for (const auto& p : r.rays) CHECK(p.norm() < 1e-9);
}

TEST_CASE("region argument checks") {
  const Walk w(3.0, 0.5);
  const Controller c = w.make("dlqr-aggressive");
  CHECK_THROWS_AS(controllable_region(w.grid, w.gait, c, {2, 2}), ConfigError);
  CHECK_THROWS_AS(controllable_region(w.grid, w.gait, c, {2, 6}), ConfigError);
  CHECK_THROWS_AS(controllable_region(w.grid, w.gait, c, {2, 4}, {}, 2), ConfigError);
  RegionConstraints total = short_horizon();
  total.torque_about_nominal = false;  // the nominal gait alone exceeds the bound here
  CHECK_THROWS_AS(controllable_region(w.grid, w.gait, c, {2, 4}, total), ConfigError);
}
