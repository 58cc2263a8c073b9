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
#include <iomanip>
#include <ostream>

#include "tlp/harness.hpp"

namespace tlp {
namespace {

using nlohmann::json;

// Column names carry their units after the last underscore.
std::vector<std::string> step_columns() {
  std::vector<std::string> c{"stride_idx", "j_idx", "time_s"};
  for (int i = 0; i < kDim; ++i) c.push_back("q" + std::to_string(i) + "_si");
  for (int i = 0; i < 6; ++i) c.push_back("e" + std::to_string(i) + "_si");
  c.insert(c.end(), {"u_sag_Nmps", "u_lat_Nmps", "uc_sag_Nm", "uc_lat_Nm", "west_fx_N", "west_fy_N", "west_tx_Nm",
                     "west_ty_Nm", "w_fx_N", "w_fy_N", "w_tx_Nm", "w_ty_Nm", "held_flag"});
  return c;
}

std::vector<double> step_values(const StepRecord& s) {
  std::vector<double> v{static_cast<double>(s.stride), static_cast<double>(s.j), s.time};
  v.insert(v.end(), s.q.data(), s.q.data() + kDim);
  v.insert(v.end(), s.e.data(), s.e.data() + 6);
  v.insert(v.end(), {s.u_extra(0), s.u_extra(1), s.u_constraint(0), s.u_constraint(1)});
  v.insert(v.end(), s.w_est.data(), s.w_est.data() + 4);
  v.insert(v.end(), s.w_true.data(), s.w_true.data() + 4);
  v.push_back(s.held ? 1.0 : 0.0);
  return v;
}

const std::vector<std::string> kStrideColumns{"stride_idx",     "error_norm_si", "speed_mps",     "target_mps",
                                              "input_cost_Nm2ps2", "diverged_flag", "e0_si",       "e1_si",
                                              "e2_si",          "e3_si",         "e4_si",         "e5_si"};

std::vector<double> stride_values(const RunRecord& r, std::size_t k) {
  const StrideRecord& s = r.strides[k];
  std::vector<double> v{static_cast<double>(s.stride), s.error_norm, s.speed,
                        k < r.target_speed.size() ? r.target_speed[k] : 0.0, s.input_cost, s.diverged ? 1.0 : 0.0};
  v.insert(v.end(), s.e.data(), s.e.data() + 6);
  return v;
}

void emit(std::ostream& os, Format f, const std::vector<std::string>& cols, const std::vector<double>& vals) {
  if (f == Format::csv) {
    for (std::size_t i = 0; i < vals.size(); ++i) os << (i ? "," : "") << vals[i];
    os << '\n';
    return;
  }
  json j = json::object();
  for (std::size_t i = 0; i < vals.size(); ++i) j[cols[i]] = vals[i];
  os << j.dump() << '\n';
}

void header(std::ostream& os, Format f, const std::vector<std::string>& cols) {
  if (f != Format::csv) return;
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
}

}  // namespace

Format format_from_name(const std::string& name) {
  if (name == "csv") return Format::csv;
  if (name == "json") return Format::json;
  throw ConfigError("unknown output format: " + name);
}

void write_steps(std::ostream& os, const RunRecord& r, Format f) {
  const auto cols = step_columns();
  os << std::setprecision(17);
  header(os, f, cols);
  for (const StepRecord& s : r.steps) emit(os, f, cols, step_values(s));
}

void write_strides(std::ostream& os, const RunRecord& r, Format f) {
  os << std::setprecision(17);
  header(os, f, kStrideColumns);
  for (std::size_t k = 0; k < r.strides.size(); ++k) emit(os, f, kStrideColumns, stride_values(r, k));
}

json summary_json(const RunRecord& r) {
  json pushes = json::array();
  for (const PushEvent& p : r.pushes)
    pushes.push_back({{"w", {p.w(0), p.w(1), p.w(2), p.w(3)}}, {"t_start", p.t_start}, {"t_end", p.t_end}});
  return {{"scenario", r.scenario},
          {"controller", r.controller},
          {"seed", r.seed},
          {"strides", r.strides.size()},
          {"steps", r.step_count},
          {"mean_error", r.mean_error},
          {"mean_input", r.mean_input},
          {"peak_error", r.peak_error},
          {"divergences", r.divergences},
          {"aborted", r.aborted},
          {"convergence_strides", r.convergence_strides},
          {"recovery_strides", r.recovery_strides},
          {"push_peaks", r.push_peaks},
          {"pushes", pushes}};
}

}  // namespace tlp
