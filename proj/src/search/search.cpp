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
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "tlp/search.hpp"

namespace tlp {

void normalize_costs(std::vector<ConfigScore>& scores, double zero_floor) {
  if (scores.empty()) return;
  for (auto& s : scores) s.cost = 0.0;
  for (std::size_t v = 0; v < kVariants.size(); ++v) {
    const std::size_t dims = scores.front().raw[v].size();
    std::vector<double> lo(dims, std::numeric_limits<double>::infinity());
    for (const auto& s : scores) {
      if (s.raw[v].size() != dims) throw ConfigError("cost vectors differ in length");
      for (std::size_t i = 0; i < dims; ++i) lo[i] = std::min(lo[i], s.raw[v][i]);
    }
    for (double& x : lo) x = std::max(x, zero_floor);
    for (auto& s : scores)
      for (std::size_t i = 0; i < dims; ++i) s.cost += std::log10(std::max(s.raw[v][i], zero_floor) / lo[i]);
  }
}

SearchResult run_search(const std::vector<SearchModel>& models, const SearchModel& classify,
                        const SearchOptions& opt, const std::vector<int>& indices, const ProgressFn& progress) {
  if (models.empty()) throw ConfigError("search needs at least one model");
  std::vector<int> todo = indices;
  if (todo.empty()) {
    todo.resize(4096);
    std::iota(todo.begin(), todo.end(), 0);
  }
  std::vector<ConfigScore> scores(todo.size());
  const int total = static_cast<int>(todo.size());
  std::atomic<int> next{0};
  std::atomic<int> done{0};
  std::mutex report;

  auto work = [&] {
    for (int k = next++; k < total; k = next++) {
      ConfigScore& s = scores[static_cast<std::size_t>(k)];
      s.cfg = ProjectionConfig::from_index(todo[static_cast<std::size_t>(k)]);
      for (std::size_t v = 0; v < kVariants.size(); ++v) {
        for (const SearchModel& m : models) {
          const Controller c = make_ctpc(m.grid->model_ptr(), m.gains[v], s.cfg);
          const CostEvaluator ev(m, c, input_weight(kVariants[v]), opt);
          const std::vector<double> part = ev.all();
          s.raw[v].insert(s.raw[v].end(), part.begin(), part.end());
        }
      }
      const ConstantInputReport rep = is_constant_input(classify.grid, classify.gains[1], s.cfg, classify.gait);
      s.constant_input = rep.constant;
      s.category = category_of(s.cfg.alternative_count(), rep.constant);
      const int d = ++done;
      if (progress) {
        std::lock_guard<std::mutex> lock(report);
        progress(d, total);
      }
    }
  };
  int threads = opt.threads > 0 ? opt.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, total);
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  normalize_costs(scores, opt.zero_floor);
  SearchResult res;
  res.sorted = std::move(scores);
  std::stable_sort(res.sorted.begin(), res.sorted.end(), [](const ConfigScore& a, const ConfigScore& b) {
    if (a.cost != b.cost) return a.cost < b.cost;
    return a.cfg.index() < b.cfg.index();
  });
  for (const ConfigScore& s : res.sorted) {
    auto& slot = res.best[static_cast<std::size_t>(s.category)];
    if (!slot) slot = s;
  }
  return res;
}

}  // namespace tlp
