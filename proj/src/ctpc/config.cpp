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

ProjectionConfig ProjectionConfig::parse(const std::string& flags) {
  ProjectionConfig c;
  int n = 0;
  for (char ch : flags) {
    if (ch == ' ' || ch == '_') continue;
    if ((ch != '0' && ch != '1') || n >= 12) throw ConfigError("projection flags must be 12 binary digits: " + flags);
    c.d[static_cast<std::size_t>(n++)] = ch - '0';
  }
  if (n != 12) throw ConfigError("projection flags must be 12 binary digits: " + flags);
  return c;
}

ProjectionConfig ProjectionConfig::from_index(int index) {
  if (index < 0 || index >= 4096) throw ConfigError("projection index out of range");
  ProjectionConfig c;
  for (int i = 0; i < 12; ++i) c.d[static_cast<std::size_t>(i)] = (index >> (11 - i)) & 1;
  return c;
}

ProjectionConfig ProjectionConfig::named(const std::string& name) {
  if (name == "C1" || name == "c1") return parse("1110 0110 1001");
  if (name == "C2" || name == "c2") return parse("1110 0110 1101");
  if (name == "C3" || name == "c3") return parse("1100 1010 1001");
  if (name == "C4" || name == "c4") return parse("1100 1011 1101");
  return parse(name);
}

int ProjectionConfig::index() const {
  int v = 0;
  for (int i = 0; i < 12; ++i) v = (v << 1) | d[static_cast<std::size_t>(i)];
  return v;
}

std::string ProjectionConfig::str() const {
  std::string s;
  for (int v : d) s.push_back(static_cast<char>('0' + v));
  return s;
}

Category category_of(int alternative_count, bool constant_input) {
  if (alternative_count == 2) return constant_input ? Category::c2 : Category::c1;
  return constant_input ? Category::c4 : Category::c3;
}

std::string category_name(Category c) {
  switch (c) {
    case Category::c1: return "C1";
    case Category::c2: return "C2";
    case Category::c3: return "C3";
    case Category::c4: return "C4";
  }
  return "C1";
}

}  // namespace tlp
