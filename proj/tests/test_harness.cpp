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
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "tlp/harness.hpp"

using namespace tlp;
using nlohmann::json;

namespace {

const ModelParams kAdult = ModelParams::adult();

TimingSpec pseudo_passive() { return TimingSpec{}; }

TimingSpec walking_18() {
  TimingSpec t;
  t.mode = TimingMode::frequency;
  t.frequency = 1.8;
  return t;
}

Setup setup(const std::string& tag, const TimingSpec& t = pseudo_passive(), double speed = 0.5) {
  return make_setup(kAdult, t, speed, ControllerSpec::parse(tag));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, ',');) out.push_back(cell);
  return out;
}

}  // namespace

TEST_CASE("config defaults and round trip") {
  const RunConfig d = config_from_json(json::object());
  CHECK(d.params.preset == Preset::adult);
  CHECK(d.timing.mode == TimingMode::pseudo_passive);
  CHECK(d.scenario == ScenarioKind::benchmark);
  CHECK(d.bench.strides == 1000);
  CHECK(d.bench.pushes == 100);

  const json j = {{"model", {{"preset", "kid"}, {"leg_mass", 4.0}}},
                  {"timing", {{"mode", "frequency"}, {"frequency", 2.0}}},
                  {"speed", 0.7},
                  {"controller", "ctpc-C3-light"},
                  {"updates_per_stride", 3},
                  {"seed", 42},
                  {"scenario",
                   {{"kind", "intermittent"},
                    {"strides", 8},
                    {"pushes", {{{"w", {1, 2, 3, 4}}, {"t_start", 0.5}, {"t_end", 0.7}}}}}}};
  const RunConfig c = config_from_json(j);
  CHECK(c.params.preset == Preset::custom);
  CHECK(c.params.leg_mass == 4.0);
  CHECK(c.timing.frequency == 2.0);
  CHECK(c.controller.tag() == "ctpc-C3-light");
  CHECK(c.controller.updates_per_stride == 3);
  CHECK(c.seed == 42);
  CHECK(c.scenario == ScenarioKind::intermittent);
  REQUIRE(c.pushes.size() == 1);
  CHECK(c.pushes[0].w(3) == 4.0);
  CHECK(config_to_json(config_from_json(config_to_json(c))) == config_to_json(c));
}

TEST_CASE("config rejects bad input") {
  CHECK_THROWS_AS(config_from_json({{"sped", 1.0}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"speed", "fast"}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"speed", -0.1}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"model", "giant"}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"model", {{"h1", -1.0}}}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"timing", {{"mode", "sometimes"}}}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"controller", "pid"}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"scenario", {{"kind", "dance"}}}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"scenario", {{"profile", {{1.0, 0.5}, {1.0, 0.7}}}}}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"scenario", {{"push", {1, 2}}}}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"scenario", {{"pushes", {{{"t_start", 1.0}, {"t_end", 0.5}}}}}}}),
                  ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
  const std::string path = "test_harness_bad.json";
  std::ofstream(path) << "{ not json";
  CHECK_THROWS_AS(load_config(path), ConfigError);
}

TEST_CASE("constant speed profile needs no extra input") {
  const Setup s = setup("dlqr-aggressive");
  const RunRecord r = run_speed_tracking(s, {{0.0, 0.5}}, 8, true);
  CHECK(r.convergence_strides.empty());
  CHECK(r.mean_input < 1e-9);
  CHECK(r.peak_error < 1e-9);
}

TEST_CASE("speed step: aggressive settles quickly, light slower") {
  const double t_change = 3 * setup("open").grid->timing().stride();
  const std::vector<std::pair<double, double>> profile{{0.0, 0.5}, {t_change, 1.0}};
  const RunRecord fast = run_speed_tracking(setup("dlqr-aggressive"), profile, 30);
  const RunRecord slow = run_speed_tracking(setup("dlqr-light"), profile, 30);
  REQUIRE(fast.convergence_strides.size() == 1);
  REQUIRE(slow.convergence_strides.size() == 1);
  CHECK(fast.convergence_strides[0] >= 1);
  CHECK(fast.convergence_strides[0] <= 3);
  CHECK((slow.convergence_strides[0] < 0 || slow.convergence_strides[0] > fast.convergence_strides[0]));
  CHECK(fast.target_speed.back() == 1.0);
}

TEST_CASE("stride push") {
  const Setup d = setup("dlqr-aggressive");
  SUBCASE("zero push leaves zero error") {
    const RunRecord r = run_stride_push(d, Eigen::Vector4d::Zero(), 1, 5);
    for (const StrideRecord& s : r.strides) CHECK(s.error_norm < 1e-9);
    CHECK(r.recovery_strides == 0);
  }
  SUBCASE("touch-down errors follow the stride recursion") {
    const Eigen::Vector4d w(20.0, 8.0, 0.0, 0.0);
    const RunRecord r = run_stride_push(d, w, 1, 6, true);
    const ErrorSystem es = build_error_system(d.grid->model().stride_constrained());
    const int n = d.grid->steps();
    Vec6 e = Vec6::Zero();
    for (std::size_t k = 0; k < r.strides.size(); ++k) {
      const StepRecord& first = r.steps[k * static_cast<std::size_t>(n)];
      const Vec6 pred = es.ae * e + es.bu * first.u_extra + es.bw * first.w_true;
      CAPTURE(k);
      CHECK((pred - r.strides[k].e).norm() < 1e-8 * std::max(1.0, pred.norm()));
      e = r.strides[k].e;
    }
  }
  SUBCASE("time projection corrects within the next stride") {
    const Eigen::Vector4d w(20.0, 0.0, 0.0, 0.0);
    const RunRecord dl = run_stride_push(d, w, 2, 12);
    const RunRecord ct = run_stride_push(setup("ctpc-C1-aggressive"), w, 2, 12);
    CHECK(ct.strides[3].error_norm < 0.5 * dl.strides[3].error_norm);
    CHECK(ct.recovery_strides >= 0);
    CHECK(dl.recovery_strides >= 2);
  }
  CHECK_THROWS_AS(run_stride_push(d, Eigen::Vector4d::Zero(), 5, 5), ConfigError);
}

TEST_CASE("intermittent pushes") {
  const TimingSpec tm = walking_18();
  const Setup dl = setup("dlqr-aggressive", tm);
  const Setup ct = setup("ctpc-C1-aggressive", tm);
  const double period = dl.grid->timing().stride();
  double prev = INFINITY;
  for (int i = 0; i < 8; ++i) {
    PushEvent p;
    p.w = Eigen::Vector4d(20.0, 0.0, 0.0, 0.0);
    p.t_start = (2.0 + 0.1 * i) * period;
    p.t_end = p.t_start + 0.1 * period;
    const RunRecord a = run_intermittent(dl, {p}, 8);
    const RunRecord b = run_intermittent(ct, {p}, 8);
    CAPTURE(i);
    REQUIRE(a.push_peaks.size() == 1);
    CHECK(a.push_peaks[0] <= prev);
    CHECK(b.push_peaks[0] < a.push_peaks[0]);
    prev = a.push_peaks[0];
  }
  // The error dynamics are linear, so mirrored lateral pushes give equal peaks.
  PushEvent left;
  left.w = Eigen::Vector4d(0.0, 20.0, 0.0, 0.0);
  left.t_start = 2.3 * period;
  left.t_end = 2.5 * period;
  PushEvent right = left;
  right.w(1) = -20.0;
  const double pl = run_intermittent(dl, {left}, 8).push_peaks[0];
  const double pr = run_intermittent(dl, {right}, 8).push_peaks[0];
  CHECK(pl == doctest::Approx(pr).epsilon(1e-9));
  PushEvent bad = left;
  bad.t_end = bad.t_start;
  CHECK_THROWS_AS(run_intermittent(dl, {bad}, 8), ConfigError);
}

TEST_CASE("benchmark is seeded and its aggregates add up") {
  const Setup s = setup("ctpc-C1-aggressive");
  BenchmarkOptions opt;
  opt.strides = 60;
  opt.pushes = 8;
  const double period = s.grid->timing().stride();
  const auto pushes = benchmark_pushes(7, opt, period);
  REQUIRE(pushes.size() == 8);
  for (const PushEvent& p : pushes) {
    CHECK(std::abs(p.w(0)) <= 20.0);
    CHECK(std::abs(p.w(1)) <= 20.0);
    CHECK(p.w.tail<2>().isZero());
    CHECK(p.t_end > p.t_start);
    CHECK(p.t_end - p.t_start <= period + 1e-12);
    CHECK(p.t_start < opt.strides * period);
  }
  const RunRecord a = run_benchmark(s, 7, opt, true);
  const RunRecord b = run_benchmark(s, 7, opt, true);
  const RunRecord c = run_benchmark(s, 8, opt);
  CHECK(a.strides.size() == 60);
  CHECK(a.step_count == 60 * s.grid->steps());
  CHECK(a.mean_error == b.mean_error);
  CHECK(a.mean_input == b.mean_input);
  std::ostringstream sa, sb;
  write_steps(sa, a, Format::csv);
  write_steps(sb, b, Format::csv);
  CHECK(sa.str() == sb.str());
  CHECK(a.mean_error != c.mean_error);
  const Aggregates re = recompute_aggregates(a);
  CHECK(re.mean_error == a.mean_error);
  CHECK(re.mean_input == a.mean_input);
  CHECK(a.mean_error > 0.0);
}

TEST_CASE("divergence aborts or restarts") {
  const Setup s = setup("open", walking_18());
  const RunRecord r = run_stride_push(s, Eigen::Vector4d(1e9, 0, 0, 0), 0, 40);
  CHECK(r.aborted);
  CHECK(r.strides.size() < 40);
  BenchmarkOptions opt;
  opt.strides = 40;
  opt.pushes = 3;
  opt.max_force = 1e9;
  const RunRecord stop = run_benchmark(s, 3, opt);
  CHECK(stop.aborted);
  CHECK(stop.divergences == 1);
  opt.rezero_on_divergence = true;
  const RunRecord go = run_benchmark(s, 3, opt);
  CHECK_FALSE(go.aborted);
  CHECK(go.divergences >= 1);
  CHECK(go.strides.size() == 40);
}

TEST_CASE("telemetry tables") {
  const RunRecord r = run_stride_push(setup("dlqr-normal"), Eigen::Vector4d(10, 0, 0, 0), 1, 3, true);
  std::ostringstream csv;
  write_steps(csv, r, Format::csv);
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  const auto header = split(line);
  CHECK(header.front() == "stride_idx");
  CHECK(header[2] == "time_s");
  int rows = 0;
  while (std::getline(in, line)) {
    CHECK(split(line).size() == header.size());
    ++rows;
  }
  CHECK(rows == static_cast<int>(r.steps.size()));

  std::ostringstream js;
  write_strides(js, r, Format::json);
  std::istringstream jin(js.str());
  int n = 0;
  while (std::getline(jin, line)) {
    const json j = json::parse(line);
    CHECK(j.contains("error_norm_si"));
    CHECK(j.at("stride_idx").get<double>() == n);
    ++n;
  }
  CHECK(n == 3);
  const json sum = summary_json(r);
  CHECK(sum.at("scenario") == "stride_push");
  CHECK(sum.at("controller") == "dlqr-normal");
  CHECK(sum.at("mean_error").get<double>() == r.mean_error);
  CHECK_THROWS_AS(format_from_name("xml"), ConfigError);
}
