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
#include "tlp/ctpc.hpp"

namespace tlp {

ControllerSpec ControllerSpec::parse(const std::string& tag) {
  ControllerSpec s;
  if (tag == "open" || tag == "open-loop") {
    s.kind = ControllerKind::open_loop;
    return s;
  }
  const auto first = tag.find('-');
  const std::string head = tag.substr(0, first);
  if (first == std::string::npos) throw ConfigError("controller tag needs a variant: " + tag);
  const auto last = tag.rfind('-');
  s.variant = variant_from_name(tag.substr(last + 1));
  if (head == "dlqr") {
    if (last != first) throw ConfigError("malformed controller tag: " + tag);
    s.kind = ControllerKind::dlqr;
  } else if (head == "ctpc") {
    if (last == first) throw ConfigError("time-projecting tag needs a configuration: " + tag);
    s.kind = ControllerKind::ctpc;
    s.cfg = ProjectionConfig::named(tag.substr(first + 1, last - first - 1));
  } else {
    throw ConfigError("unknown controller kind: " + tag);
  }
  return s;
}

std::string ControllerSpec::tag() const {
  switch (kind) {
    case ControllerKind::open_loop: return "open";
    case ControllerKind::dlqr: return "dlqr-" + variant_name(variant);
    case ControllerKind::ctpc: {
      std::string name = cfg.str();
      for (const char* preset : {"C1", "C2", "C3", "C4"})
        if (ProjectionConfig::named(preset).index() == cfg.index()) name = preset;
      return "ctpc-" + name + "-" + variant_name(variant);
    }
  }
  return "open";
}

Controller make_controller(const ControllerSpec& spec, std::shared_ptr<const StrideGrid> grid) {
  if (spec.kind == ControllerKind::open_loop) return make_open_loop();
  const FeedbackGain gain = design_gain(build_error_system(grid->stride_constrained()), spec.variant);
  Controller c = spec.kind == ControllerKind::dlqr ? make_dlqr(gain) : make_ctpc(std::move(grid), gain, spec.cfg);
  c.tag = spec.tag();
  c.updates_per_stride = spec.updates_per_stride;
  return c;
}

}  // namespace tlp
