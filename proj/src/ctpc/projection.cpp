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
#include <limits>

#include "tlp/ctpc.hpp"

namespace tlp {
namespace {

// Unknowns: [X1 (6), U1 (2), X2 (6), U2 (2)].
constexpr int kX1 = 0, kU1 = 6, kX2 = 8, kU2 = 14;

void fill_h_blocks(ProjectionBlocks& b, const Mat23& hc, const Mat2x6& k) {
  const auto& tc = TransformConstants::get();
  b.h1 = hc(Sel::x, Sel::x);
  b.h2 = hc(Sel::x, Sel::hip_ramp);
  b.h3 = hc(Sel::x, Sel::w);
  b.h4 = hc(Sel::x, Sel::z);
  b.d1 = -k * tc.M.leftCols<6>();
  b.d3 = k * tc.M.rightCols<2>();
  b.d2.setZero();
}

void fill_g_blocks(ProjectionBlocks& b, const Mat23& gc) {
  b.g1 = gc(Sel::x, Sel::x8);
  b.g2 = gc(Sel::x, Sel::hip_ramp);
  b.g3 = gc(Sel::x, Sel::w);
  b.g4 = gc(Sel::x, Sel::z);
}

Eigen::Vector2d d2_of(const Mat2x6& k, const Vec23& beta) {
  const auto& tc = TransformConstants::get();
  return -k * (tc.M * beta(Sel::xp));
}

}  // namespace

ProjectionBlocks make_blocks(const Mat23& hc, const Mat23& gc, const Mat2x6& k, const Vec23& beta) {
  ProjectionBlocks b;
  fill_h_blocks(b, hc, k);
  fill_g_blocks(b, gc);
  b.d2 = d2_of(k, beta);
  return b;
}

Mat16 assemble_matrix(const ProjectionConfig& cfg, const ProjectionBlocks& b) {
  const auto& d = cfg.d;
  Mat16 a = Mat16::Zero();
  a.block<6, 6>(0, kX1) = b.h1;
  a.block<6, 2>(0, kU1) = d[0] * b.h2 - d[1] * b.g2;
  a.block<6, 2>(0, kU2) = d[2] * b.h2 - d[3] * b.g2;
  a.block<2, 6>(6, kX1) = b.d1;
  a.block<2, 2>(6, kU1).setIdentity();
  a.block<6, 2>(8, kU1) = d[4] * b.h2 - d[5] * b.g2;
  a.block<6, 6>(8, kX2) = b.h1;
  a.block<6, 2>(8, kU2) = d[6] * b.h2 - d[7] * b.g2;
  a.block<2, 6>(14, kX2) = b.d1;
  a.block<2, 2>(14, kU2).setIdentity();
  return a;
}

Vec16 assemble_rhs(const ProjectionConfig& cfg, const ProjectionBlocks& b, const Vec8& xt,
                   const Eigen::Vector4d& w, const Vec11& z, const Eigen::Vector2d& p) {
  const auto& d = cfg.d;
  const Vec6 common = b.g1 * xt + (b.g4 - b.h4) * z;
  const Eigen::Vector2d law = b.d2 + b.d3 * p;
  Vec16 r;
  r.segment<6>(0) = common + (d[9] * b.g3 - d[8] * b.h3) * w;
  r.segment<2>(6) = law;
  r.segment<6>(8) = common + (d[11] * b.g3 - d[10] * b.h3) * w;
  r.segment<2>(14) = law;
  return r;
}

Vec11 projection_z(const Vec23& q, const Vec23& beta) {
  Vec11 z = beta(Sel::z);
  z.head<2>() = q.segment<2>(ix::stance);
  return z;
}

CtpcPolicy::CtpcPolicy(std::shared_ptr<const StrideGrid> grid, const Mat2x6& k, const ProjectionConfig& cfg)
    : grid_(std::move(grid)), k_(k), cfg_(cfg) {
  const int n = grid_->steps();
  blocks_.resize(static_cast<std::size_t>(n));
  lu_.resize(static_cast<std::size_t>(n));
  cond_.assign(static_cast<std::size_t>(n), 0.0);
  valid_.assign(static_cast<std::size_t>(n), false);
  const Mat23& hc = grid_->stride_constrained().m;
  for (int j = 0; j < n; ++j) {
    const auto sj = static_cast<std::size_t>(j);
    fill_h_blocks(blocks_[sj], hc, k_);
    const auto& gc = grid_->remaining_constrained(j);
    if (!gc) continue;
    fill_g_blocks(blocks_[sj], gc->m);
    const Mat16 a = assemble_matrix(cfg_, blocks_[sj]);
    const Eigen::JacobiSVD<Mat16> svd(a);
    const auto& s = svd.singularValues();
    cond_[sj] = s(15) > 0.0 ? s(0) / s(15) : std::numeric_limits<double>::infinity();
    if (!(cond_[sj] <= kProjectionCondLimit)) continue;
    lu_[sj].compute(a);
    valid_[sj] = true;
  }
}

PolicyResult CtpcPolicy::solve(int j, const Vec23& q, const Eigen::Vector4d& w_est, const Vec23& beta) const {
  const auto sj = static_cast<std::size_t>(j);
  PolicyResult res;
  res.condition = cond_[sj];
  if (!valid_[sj]) return res;
  ProjectionBlocks b = blocks_[sj];
  b.d2 = d2_of(k_, beta);
  const Vec16 rhs = assemble_rhs(cfg_, b, q(Sel::x8), w_est, projection_z(q, beta), q.segment<2>(ix::stance));
  const Vec16 x = lu_[sj].solve(rhs);
  res.x1 = x.segment<6>(kX1);
  res.u1 = x.segment<2>(kU1);
  res.x2 = x.segment<6>(kX2);
  res.u2 = x.segment<2>(kU2);
  res.ok = x.allFinite();
  return res;
}

PolicyResult CtpcPolicy::solve_uncached(int j, const Vec23& q, const Eigen::Vector4d& w_est,
                                        const Vec23& beta) const {
  PolicyResult res;
  const auto& gc = grid_->remaining_constrained(j);
  if (!gc) return res;
  const ProjectionBlocks b = make_blocks(grid_->stride_constrained().m, gc->m, k_, beta);
  const Mat16 a = assemble_matrix(cfg_, b);
  const Vec16 rhs = assemble_rhs(cfg_, b, q(Sel::x8), w_est, projection_z(q, beta), q.segment<2>(ix::stance));
  const Vec16 x = a.partialPivLu().solve(rhs);
  res.x1 = x.segment<6>(kX1);
  res.u1 = x.segment<2>(kU1);
  res.x2 = x.segment<6>(kX2);
  res.u2 = x.segment<2>(kU2);
  res.condition = cond_[static_cast<std::size_t>(j)];
  res.ok = x.allFinite();
  return res;
}

}  // namespace tlp
