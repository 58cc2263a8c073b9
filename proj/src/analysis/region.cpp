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
#include <numbers>

#include "tlp/analysis.hpp"

namespace tlp {
namespace {

// Rays stop here when nothing else binds.
constexpr double kRayCap = 10.0;
constexpr double kAffineTol = 1e-6;
constexpr int kCoarseRays = 16;

// Constraint quantities of one run: per stride, hip torque samples (both
// axes) then the footstep offset.
Eigen::VectorXd measure(const std::shared_ptr<const ControlGrid>& grid, const PeriodicGait& gait,
                        const Controller& ctrl, const Vec6& e0, const RegionConstraints& cons) {
  const int n = grid->steps();
  const int per = 2 * (cons.samples_per_stride + 1) + 2;
  const GaitTiming& tm = grid->timing();
  Eigen::VectorXd out(per * cons.horizon);
  Episode ep(grid, gait, ctrl, reconstruct_state(e0, gait.beta.segment<2>(ix::stance), gait.beta));
  std::vector<StepRecord> log;
  log.reserve(static_cast<std::size_t>(n));
  auto hip_torque = [&](const Vec23& q, double offset) -> Eigen::Vector2d {
    return q.segment<2>(ix::hip) + q.segment<2>(ix::hip_ramp) * offset;
  };
  for (int s = 0; s < cons.horizon; ++s) {
    log.clear();
    const StrideRecord rec = ep.run_stride(no_push, &log);
    if (!ep.state().allFinite()) throw NumericalError("region probe overflowed");
    Eigen::Index at = static_cast<Eigen::Index>(s) * per;
    for (int k = 0; k < cons.samples_per_stride; ++k) {
      const int j = k * n / cons.samples_per_stride;
      out.segment<2>(at) = hip_torque(log[static_cast<std::size_t>(j)].q, tm.offset_at(j));
      at += 2;
    }
    out.segment<2>(at) = hip_torque(log.back().q, tm.offset_at(n - 1) + tm.dt_at(n - 1));
    at += 2;
    out.segment<2>(at) = ep.state().segment<2>(ix::stance) - ep.state().segment<2>(ix::swing);
  }
  return out;
}

// Affine map z -> quantities, z = (e0, inputs), probed column by column.
struct AffineMap {
  Eigen::VectorXd c0;
  Eigen::MatrixXd a;
};

template <class Eval>
AffineMap probe_affine(int dims, const Eval& eval) {
  AffineMap m;
  m.c0 = eval(Eigen::VectorXd::Zero(dims));
  m.a.resize(m.c0.size(), dims);
  for (int i = 0; i < dims; ++i) m.a.col(i) = eval(Eigen::VectorXd::Unit(dims, i)) - m.c0;
  Eigen::VectorXd z(dims);
  for (int i = 0; i < dims; ++i) z(i) = std::sin(1.0 + 0.7 * i);
  const Eigen::VectorXd want = m.c0 + m.a * z;
  if ((eval(z) - want).norm() > kAffineTol * std::max(1.0, want.norm()))
    throw NumericalError("closed loop is not affine in the initial error");
  return m;
}

RegionSlice solve_region(const AffineMap& map, std::array<int, 2> subspace, const RegionConstraints& cons,
                         int rays) {
  if (rays < 3) throw ConfigError("region needs at least three rays");
  if (subspace[0] == subspace[1] || std::min(subspace[0], subspace[1]) < 0 || std::max(subspace[0], subspace[1]) > 5)
    throw ConfigError("region subspace must name two distinct error coordinates");
  const int per = 2 * (cons.samples_per_stride + 1) + 2;
  const int torques = 2 * (cons.samples_per_stride + 1);

  // Rows g z <= h over z = (e0, inputs).
  const Eigen::Index dims = map.a.cols();
  std::vector<Eigen::RowVectorXd> g;
  std::vector<double> h;
  for (int s = 0; s < cons.horizon; ++s) {
    const Eigen::Index base = static_cast<Eigen::Index>(s) * per;
    for (int k = 0; k < torques; ++k) {
      const Eigen::Index r = base + k;
      const double nominal = cons.torque_about_nominal ? 0.0 : map.c0(r);
      g.push_back(map.a.row(r));
      h.push_back(cons.hip_torque_limit - nominal);
      g.push_back(-map.a.row(r));
      h.push_back(cons.hip_torque_limit + nominal);
    }
    const Eigen::Index rx = base + torques;
    for (double sx : {1.0, -1.0}) {
      for (double sy : {1.0, -1.0}) {
        g.push_back(sx * map.a.row(rx) + sy * map.a.row(rx + 1));
        h.push_back(cons.diamond_half_diagonal - sx * map.c0(rx) - sy * map.c0(rx + 1));
      }
    }
  }
  for (double v : h)
    if (v < 0.0) throw ConfigError("nominal gait violates the region constraints");
  // Open-loop growth spreads row magnitudes over many decades.
  for (std::size_t r = 0; r < g.size(); ++r) {
    const double m = g[r].cwiseAbs().maxCoeff();
    if (m > 0.0) {
      g[r] /= m;
      h[r] /= m;
    }
  }

  std::vector<int> free;
  for (int i = 0; i < 6; ++i)
    if (i != subspace[0] && i != subspace[1]) free.push_back(i);
  const Eigen::Index inputs = dims - 6;
  const Eigen::Index split = static_cast<Eigen::Index>(free.size()) + inputs;
  // Columns: t, then each free variable as a +/- pair.
  const Eigen::Index cols = 1 + 2 * split;
  const auto rows = static_cast<Eigen::Index>(g.size()) + 1;
  Eigen::MatrixXd fixed(rows, 2 * split);
  Eigen::VectorXd b(rows);
  for (Eigen::Index r = 0; r + 1 < rows; ++r) {
    const Eigen::RowVectorXd& gr = g[static_cast<std::size_t>(r)];
    for (std::size_t f = 0; f < free.size(); ++f) {
      const auto c = static_cast<Eigen::Index>(f);
      fixed(r, 2 * c) = gr(free[f]);
      fixed(r, 2 * c + 1) = -gr(free[f]);
    }
    for (Eigen::Index u = 0; u < inputs; ++u) {
      const Eigen::Index c = static_cast<Eigen::Index>(free.size()) + u;
      fixed(r, 2 * c) = gr(6 + u);
      fixed(r, 2 * c + 1) = -gr(6 + u);
    }
    b(r) = h[static_cast<std::size_t>(r)];
  }
  fixed.row(rows - 1).setZero();
  b(rows - 1) = kRayCap;

  RegionSlice out;
  out.subspace = subspace;
  out.horizon = cons.horizon;
  out.samples_per_stride = cons.samples_per_stride;
  Eigen::MatrixXd a(rows, cols);
  a.rightCols(2 * split) = fixed;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(cols);
  c(0) = 1.0;
  auto cast = [&](const Eigen::Vector2d& dir, bool* capped) -> Eigen::Vector2d {
    for (Eigen::Index r = 0; r + 1 < rows; ++r) {
      const Eigen::RowVectorXd& gr = g[static_cast<std::size_t>(r)];
      a(r, 0) = dir(0) * gr(subspace[0]) + dir(1) * gr(subspace[1]);
    }
    a(rows - 1, 0) = 1.0;
    const LpResult lp = simplex_maximize(c, a, b);
    double t = lp.status == LpResult::Status::optimal ? lp.x(0) : kRayCap;
    *capped = t >= kRayCap * (1.0 - 1e-9);
    return std::min(t, kRayCap) * dir;
  };
  auto uniform = [](int k, int n) {
    const double th = 2.0 * std::numbers::pi * k / n;
    return Eigen::Vector2d(std::cos(th), std::sin(th));
  };

  // A coarse pass sets the ray spacing: directions are spread evenly in the
  // frame where the slice has unit second moment, which keeps long thin
  // slices resolved at their tips.
  Eigen::Matrix2d shape = Eigen::Matrix2d::Identity();
  {
    Eigen::Matrix2d m = Eigen::Matrix2d::Zero();
    bool capped = false;
    for (int k = 0; k < kCoarseRays; ++k) {
      const Eigen::Vector2d p = cast(uniform(k, kCoarseRays), &capped);
      m += p * p.transpose();
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(m);
    const Eigen::Vector2d ev = es.eigenvalues();
    if (ev.minCoeff() > 1e-12 * std::max(1.0, ev.maxCoeff()))
      shape = es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
  }
  for (int k = 0; k < rays; ++k) {
    bool capped = false;
    out.rays.push_back(cast((shape * uniform(k, rays)).normalized(), &capped));
    if (capped) ++out.capped_rays;
  }
  out.vertices = convex_hull(out.rays);
  out.area = polygon_area(out.vertices);
  return out;
}

}  // namespace

RegionSlice controllable_region(std::shared_ptr<const ControlGrid> grid, const PeriodicGait& gait,
                                const Controller& ctrl, std::array<int, 2> subspace, const RegionConstraints& cons,
                                int rays) {
  if (cons.horizon < 1 || cons.samples_per_stride < 1) throw ConfigError("region horizon and samples must be positive");
  Controller c = ctrl;
  if (c.kind == ControllerKind::ctpc) c.updates_per_stride = cons.samples_per_stride;
  const AffineMap map = probe_affine(6, [&](const Eigen::VectorXd& z) {
    return measure(grid, gait, c, z.head<6>(), cons);
  });
  RegionSlice out = solve_region(map, subspace, cons, rays);
  out.tag = c.tag;
  return out;
}

RegionSlice maximal_region(std::shared_ptr<const ControlGrid> grid, const PeriodicGait& gait,
                           std::array<int, 2> subspace, const RegionConstraints& cons, int rays) {
  if (cons.horizon < 1 || cons.samples_per_stride < 1) throw ConfigError("region horizon and samples must be positive");
  const int n = grid->steps();
  const int per_stride = 2 * cons.samples_per_stride;
  const int inputs = per_stride * cons.horizon;
  auto u = std::make_shared<Eigen::VectorXd>(Eigen::VectorXd::Zero(inputs));
  // Segment of grid index j: the last sample point at or before j.
  std::vector<int> seg(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    int k = 0;
    while (k + 1 < cons.samples_per_stride && (k + 1) * n / cons.samples_per_stride <= j) ++k;
    seg[static_cast<std::size_t>(j)] = k;
  }
  // Free inputs ride on a stabilizing stride feedback. Every input sequence
  // stays reachable, and the probed map no longer grows exponentially.
  const ErrorSystem es = build_error_system(grid->model().stride_constrained());
  Controller c = make_dlqr(design_gain(es, Variant::aggressive));
  c.tag = "maximal";
  c.feedforward = [u, seg, per_stride, horizon = cons.horizon](int stride, int j) -> Eigen::Vector2d {
    if (stride >= horizon) return Eigen::Vector2d::Zero();
    return u->segment<2>(stride * per_stride + 2 * seg[static_cast<std::size_t>(j)]);
  };
  const AffineMap map = probe_affine(6 + inputs, [&](const Eigen::VectorXd& z) {
    *u = z.tail(inputs);
    return measure(grid, gait, c, z.head<6>(), cons);
  });
  RegionSlice out = solve_region(map, subspace, cons, rays);
  out.tag = c.tag;
  return out;
}

std::vector<Eigen::Vector2d> convex_hull(std::vector<Eigen::Vector2d> pts) {
  std::sort(pts.begin(), pts.end(), [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
  };
  std::vector<Eigen::Vector2d> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lo = k + 1; i-- > 0;) {
    while (k >= lo && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

double polygon_area(const std::vector<Eigen::Vector2d>& poly) {
  double s = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % poly.size()];
    s += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * std::abs(s);
}

bool polygon_contains(const std::vector<Eigen::Vector2d>& poly, const Eigen::Vector2d& p, double slack) {
  if (poly.size() < 3) return false;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Eigen::Vector2d& a = poly[i];
    const Eigen::Vector2d& b = poly[(i + 1) % poly.size()];
    const Eigen::Vector2d edge = b - a;
    const double len = edge.norm();
    if (len == 0.0) continue;
    // Signed distance to the left of the edge; negative is outside.
    const double d = (edge.x() * (p.y() - a.y()) - edge.y() * (p.x() - a.x())) / len;
    if (d < -slack) return false;
  }
  return true;
}

}  // namespace tlp
