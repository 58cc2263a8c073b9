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
#include <complex>

#include "tlp/analysis.hpp"

namespace tlp {
namespace {

constexpr double kSuperpositionTol = 1e-8;

Vec6 run_from(const std::shared_ptr<const ControlGrid>& grid, const PeriodicGait& gait, const Controller& ctrl,
              const Vec6& e0, int n_strides) {
  Episode ep(grid, gait, ctrl, reconstruct_state(e0, gait.beta.segment<2>(ix::stance), gait.beta));
  StrideRecord rec;
  for (int s = 0; s < n_strides; ++s) rec = ep.run_stride(no_push);
  return rec.e;
}

Eigen::VectorXcd sorted_eigenvalues(const Eigen::MatrixXd& m) {
  Eigen::VectorXcd ev = Eigen::EigenSolver<Eigen::MatrixXd>(m, false).eigenvalues();
  std::vector<std::complex<double>> v(ev.data(), ev.data() + ev.size());
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
    if (std::abs(a) != std::abs(b)) return std::abs(a) > std::abs(b);
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
  return Eigen::Map<Eigen::VectorXcd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

ClosedLoopMap closed_loop_map(std::shared_ptr<const ControlGrid> grid, const PeriodicGait& gait,
                              const Controller& ctrl, int n_strides) {
  if (n_strides < 1) throw ConfigError("closed-loop map needs at least one stride");
  ClosedLoopMap out;
  for (int i = 0; i < 6; ++i) out.map.col(i) = run_from(grid, gait, ctrl, Vec6::Unit(i), n_strides);
  Vec6 probe;
  probe << 0.3, -0.7, 1.1, 0.2, -0.5, 0.9;
  const Vec6 want = out.map * probe;
  const Vec6 got = run_from(grid, gait, ctrl, probe, n_strides);
  const double scale = std::max({1.0, want.norm(), out.map.norm() * probe.norm()});
  out.superposition_residual = (got - want).norm() / scale;
  if (!(out.superposition_residual <= kSuperpositionTol))
    throw NumericalError("closed loop is not linear in the stride-start error (residual " +
                         std::to_string(out.superposition_residual) + ")");
  out.eigenvalues = sorted_eigenvalues(out.map);
  out.spectral_radius = out.eigenvalues.size() ? std::abs(out.eigenvalues(0)) : 0.0;
  return out;
}

PeriodicGait standing_gait(const ModelParams& params, const GaitTiming& timing) {
  return periodic_gait(params, timing, 0.0);
}

std::vector<EigenReport> eigen_sweep(const ModelParams& params, const std::vector<double>& frequencies,
                                     const std::vector<ControllerSpec>& controllers, double ds_fraction,
                                     int steps_per_stride) {
  std::vector<EigenReport> out;
  for (double f : frequencies) {
    const GaitTiming tm = GaitTiming::from_frequency(f, ds_fraction, steps_per_stride);
    auto grid = std::make_shared<const ControlGrid>(params, tm);
    const PeriodicGait gait = standing_gait(params, tm);
    for (const ControllerSpec& spec : controllers) {
      const Controller ctrl = make_controller(spec, grid->model_ptr());
      const ClosedLoopMap m = closed_loop_map(grid, gait, ctrl);
      EigenReport r;
      r.frequency = f;
      r.tag = spec.tag();
      r.eigenvalues = m.eigenvalues;
      r.spectral_radius = m.spectral_radius;
      const std::array<int, 3> sag{0, 2, 4}, lat{1, 3, 5};
      const Eigen::VectorXcd es = sorted_eigenvalues(m.map(sag, sag));
      const Eigen::VectorXcd el = sorted_eigenvalues(m.map(lat, lat));
      for (int i = 0; i < 3; ++i)
        r.duplicate_gap = std::max(r.duplicate_gap, std::abs(es(i) - el(i)) / std::max(1.0, std::abs(es(i))));
      r.all_real = true;
      for (const auto& z : m.eigenvalues)
        if (std::abs(z.imag()) > 1e-9 * std::max(1.0, std::abs(z))) r.all_real = false;
      out.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace tlp
