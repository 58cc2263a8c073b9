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
// tlpctl: command-line front end for gaits, controllers, search, analysis
// and benchmarks. Exit codes: 0 success, 2 configuration error, 3 numerical
// failure (divergence or singularity).
#include <CLI11.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tlp/analysis.hpp"
#include "tlp/harness.hpp"
#include "tlp/search.hpp"

namespace {

using nlohmann::json;
using namespace tlp;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "csv";
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "JSON run configuration")->check(CLI::ExistingFile);
  app->add_option("--seed", c.seed, "random seed (overrides the config)");
  app->add_option("--out", c.out, "output directory (stdout when omitted)");
  app->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

RunConfig load(const Common& c) {
  RunConfig cfg = c.config.empty() ? RunConfig{} : load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  return cfg;
}

// Writes named tables into --out, or to stdout one after another.
class Sink {
 public:
  explicit Sink(const Common& c) : dir_(c.out), format_(format_from_name(c.format)) {
    if (!dir_.empty()) std::filesystem::create_directories(dir_);
  }
  Format format() const { return format_; }
  std::string ext() const { return format_ == Format::csv ? ".csv" : ".jsonl"; }

  template <class Fn>
  void table(const std::string& name, Fn&& fn) {
    if (dir_.empty()) {
      fn(std::cout);
      return;
    }
    std::ofstream f(std::filesystem::path(dir_) / (name + ext()));
    if (!f) throw ConfigError("cannot write to " + dir_);
    fn(f);
  }
  void document(const std::string& name, const json& j) {
    if (dir_.empty()) {
      std::cout << j.dump(2) << '\n';
      return;
    }
    std::ofstream f(std::filesystem::path(dir_) / (name + ".json"));
    if (!f) throw ConfigError("cannot write to " + dir_);
    f << j.dump(2) << '\n';
  }

 private:
  std::string dir_;
  Format format_;
};

// Rows of equal-keyed records as CSV or JSON lines.
void write_rows(std::ostream& os, Format f, const std::vector<std::string>& cols, const std::vector<json>& rows) {
  if (f == Format::json) {
    for (const json& r : rows) os << r.dump() << '\n';
    return;
  }
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (const json& r : rows) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      const json& v = r.at(cols[i]);
      os << (i ? "," : "");
      if (v.is_string()) os << v.get<std::string>();
      else os << v.dump();
    }
    os << '\n';
  }
}

json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json complex_json(const Eigen::VectorXcd& v) {
  json a = json::array();
  for (const auto& z : v) a.push_back({z.real(), z.imag()});
  return a;
}

json gait_json(const PeriodicGait& g) {
  return {{"t_ds_s", g.timing.t_ds},
          {"t_ss_s", g.timing.t_ss},
          {"steps_per_stride", g.timing.steps()},
          {"speed_mps", g.speed},
          {"class", g.cls == GaitClass::pseudo_passive ? "pseudo_passive" : "actuated"},
          {"beta", vec_json(g.beta)}};
}

std::vector<ControllerSpec> parse_specs(const std::vector<std::string>& tags) {
  std::vector<ControllerSpec> out;
  for (const auto& t : tags) out.push_back(ControllerSpec::parse(t));
  return out;
}

// ---------------------------------------------------------------- gait

void gait_find(const Common& c) {
  const RunConfig cfg = load(c);
  Sink sink(c);
  const PseudoPassiveResult pp = pseudo_passive_timing(cfg.params, cfg.timing.t_ds, cfg.timing.steps_per_stride);
  json j = gait_json(pp.gait);
  j["model"] = preset_name(cfg.params.preset);
  j["sign_changes"] = pp.sign_changes;
  j["genuine_roots"] = pp.genuine_roots;
  sink.document("gait", j);
}

void gait_scale(const Common& c, double speed) {
  RunConfig cfg = load(c);
  if (speed >= 0.0) cfg.speed = speed;
  Sink sink(c);
  const Setup s = make_setup(cfg.params, cfg.timing, cfg.speed, ControllerSpec::parse("open"));
  json j = gait_json(s.gait);
  j["model"] = preset_name(cfg.params.preset);
  sink.document("gait", j);
}

// ---------------------------------------------------------------- dlqr

void dlqr_design(const Common& c) {
  const RunConfig cfg = load(c);
  Sink sink(c);
  const GaitTiming tm = resolve_timing(cfg.params, cfg.timing);
  const StrideGrid grid(cfg.params, tm);
  const ErrorSystem es = build_error_system(grid.stride_constrained());
  std::vector<json> rows;
  for (Variant v : kVariants) {
    const FeedbackGain g = design_gain(es, v);
    json k = json::array();
    for (int r = 0; r < 2; ++r) k.push_back(vec_json(g.k.row(r).transpose()));
    rows.push_back({{"variant", variant_name(v)},
                    {"input_weight", input_weight(v)},
                    {"spectral_radius", g.spectral_radius},
                    {"k", k},
                    {"eigenvalues", complex_json(g.closed_loop_eigenvalues)}});
  }
  if (sink.format() == Format::json) {
    sink.document("dlqr", {{"t_ds_s", tm.t_ds}, {"t_ss_s", tm.t_ss}, {"gains", rows}});
    return;
  }
  sink.table("dlqr", [&](std::ostream& os) {
    os << "variant,input_weight,spectral_radius";
    for (int r = 0; r < 2; ++r)
      for (int i = 0; i < 6; ++i) os << ",k" << r << i;
    os << '\n' << std::setprecision(17);
    for (const json& row : rows) {
      os << row["variant"].get<std::string>() << ',' << row["input_weight"].get<double>() << ','
         << row["spectral_radius"].get<double>();
      for (const json& kr : row["k"])
        for (const json& x : kr) os << ',' << x.get<double>();
      os << '\n';
    }
  });
}

// ---------------------------------------------------------------- runs

int emit_run(Sink& sink, const RunRecord& r, bool steps) {
  if (steps) sink.table("steps", [&](std::ostream& os) { write_steps(os, r, sink.format()); });
  sink.table("strides", [&](std::ostream& os) { write_strides(os, r, sink.format()); });
  sink.document("summary", summary_json(r));
  return r.aborted ? kExitNumerical : 0;
}

int ctpc_run(const Common& c, const std::string& controller) {
  RunConfig cfg = load(c);
  if (!controller.empty()) {
    const int u = cfg.controller.updates_per_stride;
    cfg.controller = ControllerSpec::parse(controller);
    cfg.controller.updates_per_stride = u;
  }
  Sink sink(c);
  const RunRecord r = run_scenario(cfg);
  return emit_run(sink, r, cfg.keep_steps);
}

int bench_run(const Common& c, const std::vector<std::string>& controllers, int seeds) {
  const RunConfig cfg = load(c);
  if (seeds < 1) throw ConfigError("--seeds must be positive");
  Sink sink(c);
  std::vector<std::string> tags = controllers;
  if (tags.empty()) tags.push_back(cfg.controller.tag());
  std::vector<json> rows;
  json summary = json::array();
  bool aborted = false;
  for (const std::string& tag : tags) {
    const Setup s = make_setup(cfg.params, cfg.timing, cfg.speed, ControllerSpec::parse(tag));
    double sum = 0.0;
    for (int k = 0; k < seeds; ++k) {
      const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(k);
      const RunRecord r = run_benchmark(s, seed, cfg.bench);
      aborted = aborted || r.aborted;
      sum += r.mean_error;
      rows.push_back({{"controller", tag},
                      {"seed", seed},
                      {"strides", r.strides.size()},
                      {"mean_error_si", r.mean_error},
                      {"mean_input_Nmps", r.mean_input},
                      {"peak_error_si", r.peak_error},
                      {"divergences", r.divergences},
                      {"aborted", r.aborted ? 1 : 0}});
    }
    summary.push_back({{"controller", tag}, {"seeds", seeds}, {"mean_error", sum / seeds}});
  }
  sink.table("bench", [&](std::ostream& os) {
    os << std::setprecision(17);
    write_rows(os, sink.format(),
               {"controller", "seed", "strides", "mean_error_si", "mean_input_Nmps", "peak_error_si", "divergences",
                "aborted"},
               rows);
  });
  sink.document("bench_summary", summary);
  return aborted ? kExitNumerical : 0;
}

// ---------------------------------------------------------------- search

void search_run(const Common& c, int stride, int threads, int top) {
  const RunConfig cfg = load(c);
  if (stride < 1) throw ConfigError("--every must be positive");
  Sink sink(c);
  std::vector<SearchModel> models{make_search_model(ModelParams::adult(), cfg.timing.t_ds, cfg.speed),
                                  make_search_model(ModelParams::kid(), cfg.timing.t_ds, cfg.speed)};
  const SearchModel classify =
      make_search_model(ModelParams::adult(), GaitTiming::from_frequency(1.8, 0.2), cfg.speed);
  SearchOptions opt;
  opt.threads = threads;
  std::vector<int> idx;
  if (stride > 1) {
    for (int i = 0; i < 4096; i += stride) idx.push_back(i);
    for (const char* n : {"C1", "C2", "C3", "C4"}) {
      const int k = ProjectionConfig::named(n).index();
      if (k % stride != 0) idx.push_back(k);
    }
  }
  const SearchResult res = run_search(models, classify, opt, idx, [](int done, int total) {
    if (done % 256 == 0 || done == total) std::cerr << "search " << done << "/" << total << '\n';
  });
  std::vector<json> rows;
  const int n = top > 0 ? std::min<int>(top, static_cast<int>(res.sorted.size())) : static_cast<int>(res.sorted.size());
  for (int i = 0; i < n; ++i) {
    const ConfigScore& s = res.sorted[static_cast<std::size_t>(i)];
    rows.push_back({{"rank", i + 1},
                    {"flags", s.cfg.str()},
                    {"category", category_name(s.category)},
                    {"constant_input", s.constant_input ? 1 : 0},
                    {"cost", std::isfinite(s.cost) ? json(s.cost) : json("inf")}});
  }
  sink.table("search", [&](std::ostream& os) {
    os << std::setprecision(10);
    write_rows(os, sink.format(), {"rank", "flags", "category", "constant_input", "cost"}, rows);
  });
  json best = json::object();
  for (int k = 0; k < 4; ++k) {
    const auto& b = res.best[static_cast<std::size_t>(k)];
    if (b) best[category_name(static_cast<Category>(k))] = {{"flags", b->cfg.str()}, {"cost", b->cost}};
  }
  sink.document("search_best", best);
}

// ---------------------------------------------------------------- analysis

void analyze_eigen(const Common& c, const std::vector<std::string>& controllers, double f_lo, double f_hi, int n) {
  const RunConfig cfg = load(c);
  if (n < 1 || !(f_lo > 0.0) || !(f_hi >= f_lo)) throw ConfigError("bad frequency range");
  Sink sink(c);
  std::vector<double> freqs;
  for (int i = 0; i < n; ++i) freqs.push_back(n == 1 ? f_lo : f_lo + (f_hi - f_lo) * i / (n - 1));
  const auto reports = eigen_sweep(cfg.params, freqs, parse_specs(controllers), cfg.timing.ds_fraction,
                                   cfg.timing.steps_per_stride);
  std::vector<json> rows;
  for (const EigenReport& r : reports)
    rows.push_back({{"frequency_hz", r.frequency},
                    {"controller", r.tag},
                    {"spectral_radius", r.spectral_radius},
                    {"duplicate_gap", r.duplicate_gap},
                    {"all_real", r.all_real ? 1 : 0},
                    {"eigenvalues", complex_json(r.eigenvalues)}});
  if (sink.format() == Format::json) {
    sink.document("eigen", rows);
    return;
  }
  sink.table("eigen", [&](std::ostream& os) {
    os << std::setprecision(12);
    write_rows(os, Format::csv, {"frequency_hz", "controller", "spectral_radius", "duplicate_gap", "all_real"}, rows);
  });
}

void analyze_surface(const Common& c, const std::vector<std::string>& controllers, const std::vector<double>& push,
                     int cells) {
  const RunConfig cfg = load(c);
  if (push.size() != 4) throw ConfigError("--push needs four numbers");
  if (cells < 1) throw ConfigError("--cells must be positive");
  Sink sink(c);
  const Setup base = make_setup(cfg.params, cfg.timing, cfg.speed, ControllerSpec::parse("open"));
  std::vector<double> starts, ends;
  for (int i = 0; i < cells; ++i) {
    starts.push_back(static_cast<double>(i) / cells);
    ends.push_back(static_cast<double>(i + 1) / cells);
  }
  const Eigen::Vector4d w(push[0], push[1], push[2], push[3]);
  std::vector<json> rows;
  for (const std::string& tag : controllers) {
    const Controller ctrl = make_controller(ControllerSpec::parse(tag), base.grid->model_ptr());
    const PushSurface s = push_response_surface(base.grid, base.gait, ctrl, starts, ends, w);
    for (std::size_t i = 0; i < starts.size(); ++i)
      for (std::size_t k = 0; k < ends.size(); ++k) {
        if (ends[k] <= starts[i]) continue;
        const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>(k);
        rows.push_back({{"controller", ctrl.tag},
                        {"start_frac", starts[i]},
                        {"end_frac", ends[k]},
                        {"err1_si", s.err[0](a, b)},
                        {"err2_si", s.err[1](a, b)},
                        {"err3_si", s.err[2](a, b)}});
      }
  }
  sink.table("surface", [&](std::ostream& os) {
    os << std::setprecision(12);
    write_rows(os, sink.format(), {"controller", "start_frac", "end_frac", "err1_si", "err2_si", "err3_si"}, rows);
  });
}

void analyze_region(const Common& c, const std::vector<std::string>& controllers, const std::vector<int>& sub,
                    int rays, bool maximal) {
  const RunConfig cfg = load(c);
  if (sub.size() != 2) throw ConfigError("--subspace needs two indices");
  Sink sink(c);
  const Setup base = make_setup(cfg.params, cfg.timing, cfg.speed, ControllerSpec::parse("open"));
  const std::array<int, 2> s{sub[0], sub[1]};
  std::vector<RegionSlice> slices;
  for (const std::string& tag : controllers)
    slices.push_back(controllable_region(base.grid, base.gait,
                                         make_controller(ControllerSpec::parse(tag), base.grid->model_ptr()), s, {},
                                         rays));
  if (maximal) slices.push_back(maximal_region(base.grid, base.gait, s, {}, rays));
  std::vector<json> rows;
  json summary = json::array();
  for (const RegionSlice& r : slices) {
    for (std::size_t i = 0; i < r.vertices.size(); ++i)
      rows.push_back({{"controller", r.tag}, {"vertex", i}, {"x_si", r.vertices[i].x()}, {"y_si", r.vertices[i].y()}});
    summary.push_back({{"controller", r.tag},
                       {"subspace", {r.subspace[0], r.subspace[1]}},
                       {"area", r.area},
                       {"rays", r.rays.size()},
                       {"capped_rays", r.capped_rays},
                       {"horizon", r.horizon}});
  }
  sink.table("region", [&](std::ostream& os) {
    os << std::setprecision(12);
    write_rows(os, sink.format(), {"controller", "vertex", "x_si", "y_si"}, rows);
  });
  sink.document("region_summary", summary);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tlpctl: three-linear-pendulum walking control toolkit"};
  app.require_subcommand(1);
  Common common;

  auto* gait = app.add_subcommand("gait", "periodic gaits");
  gait->require_subcommand(1);
  auto* gait_find_cmd = gait->add_subcommand("find", "pseudo-passive timing and gait at 1 m/s");
  add_common(gait_find_cmd, common);
  auto* gait_scale_cmd = gait->add_subcommand("scale", "nominal gait at a speed");
  double speed = -1.0;
  gait_scale_cmd->add_option("--speed", speed, "target speed, m/s (default: config speed)");
  add_common(gait_scale_cmd, common);

  auto* dlqr = app.add_subcommand("dlqr", "stride feedback");
  dlqr->require_subcommand(1);
  auto* dlqr_design_cmd = dlqr->add_subcommand("design", "gains for the three variants");
  add_common(dlqr_design_cmd, common);

  auto* ctpc = app.add_subcommand("ctpc", "closed-loop scenarios");
  ctpc->require_subcommand(1);
  auto* ctpc_run_cmd = ctpc->add_subcommand("run", "run the configured scenario");
  std::string controller;
  ctpc_run_cmd->add_option("--controller", controller, "controller tag, e.g. ctpc-C1-aggressive");
  add_common(ctpc_run_cmd, common);

  auto* search = app.add_subcommand("search", "projection configuration search");
  search->require_subcommand(1);
  auto* search_run_cmd = search->add_subcommand("run", "score configurations");
  int every = 1, threads = 0, top = 0;
  search_run_cmd->add_option("--every", every, "score every n-th configuration (presets always)");
  search_run_cmd->add_option("--threads", threads, "worker threads (0: all cores)");
  search_run_cmd->add_option("--top", top, "rows to write (0: all)");
  add_common(search_run_cmd, common);

  auto* analyze = app.add_subcommand("analyze", "closed-loop analysis");
  analyze->require_subcommand(1);
  std::vector<std::string> controllers;
  auto* eigen_cmd = analyze->add_subcommand("eigen", "eigenvalue sweep over frequency");
  double f_lo = 0.8, f_hi = 2.5;
  int n_freq = 8;
  eigen_cmd->add_option("--controllers", controllers, "controller tags")->default_str("open dlqr-* ctpc-C1..C4");
  eigen_cmd->add_option("--fmin", f_lo, "lowest frequency, step/s");
  eigen_cmd->add_option("--fmax", f_hi, "highest frequency, step/s");
  eigen_cmd->add_option("--count", n_freq, "number of frequencies");
  add_common(eigen_cmd, common);
  auto* surface_cmd = analyze->add_subcommand("surface", "touch-down errors over push timing");
  std::vector<double> push{20.0, 0.0, 0.0, 0.0};
  int cells = 10;
  surface_cmd->add_option("--controllers", controllers, "controller tags");
  surface_cmd->add_option("--push", push, "fx fy tx ty (N, N m)")->expected(4);
  surface_cmd->add_option("--cells", cells, "timing cells per stride");
  add_common(surface_cmd, common);
  auto* region_cmd = analyze->add_subcommand("region", "controllable-region slices");
  std::vector<int> sub{2, 4};
  int rays = 64;
  bool no_maximal = false;
  region_cmd->add_option("--controllers", controllers, "controller tags");
  region_cmd->add_option("--subspace", sub, "two error coordinates")->expected(2);
  region_cmd->add_option("--rays", rays, "ray count");
  region_cmd->add_flag("--no-maximal", no_maximal, "skip the maximal region");
  add_common(region_cmd, common);

  auto* bench = app.add_subcommand("bench", "random-push benchmark");
  bench->require_subcommand(1);
  auto* bench_run_cmd = bench->add_subcommand("run", "benchmark one or more controllers");
  int seeds = 1;
  bench_run_cmd->add_option("--controllers", controllers, "controller tags (default: config controller)");
  bench_run_cmd->add_option("--seeds", seeds, "consecutive seeds from --seed");
  add_common(bench_run_cmd, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*gait_find_cmd) gait_find(common);
    else if (*gait_scale_cmd) gait_scale(common, speed);
    else if (*dlqr_design_cmd) dlqr_design(common);
    else if (*ctpc_run_cmd) return ctpc_run(common, controller);
    else if (*search_run_cmd) search_run(common, every, threads, top);
    else if (*eigen_cmd) {
      if (controllers.empty())
        controllers = {"open", "dlqr-light", "dlqr-normal", "dlqr-aggressive", "ctpc-C1-aggressive",
                       "ctpc-C2-aggressive", "ctpc-C3-aggressive", "ctpc-C4-aggressive"};
      analyze_eigen(common, controllers, f_lo, f_hi, n_freq);
    } else if (*surface_cmd) {
      if (controllers.empty()) controllers = {"open", "dlqr-aggressive", "ctpc-C1-aggressive"};
      analyze_surface(common, controllers, push, cells);
    } else if (*region_cmd) {
      if (controllers.empty()) controllers = {"dlqr-aggressive", "ctpc-C1-aggressive"};
      analyze_region(common, controllers, sub, rays, !no_maximal);
    } else if (*bench_run_cmd) return bench_run(common, controllers, seeds);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}
