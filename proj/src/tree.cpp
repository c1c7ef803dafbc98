// Copyright 2026 The RANalyzer Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ranalyzer/tree.hpp"

#include <algorithm>
#include <functional>

#include "ranalyzer/error.hpp"
#include "ranalyzer/text.hpp"

namespace ranalyzer {

int Tree::depth() const {
  if (nodes.empty()) return 0;
  std::function<int(int)> walk = [&](int i) -> int {
    const auto& n = nodes[static_cast<std::size_t>(i)];
    if (n.feature < 0) return 0;
    return 1 + std::max(walk(n.left), walk(n.right));
  };
  return walk(0);
}

std::size_t Tree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.feature < 0; }));
}

void Tree::write(std::string& out) const {
  for (const auto& n : nodes) {
    out += std::to_string(n.feature);
    out += ' ';
    out += text::format_double(n.threshold);
    out += ' ';
    out += std::to_string(n.left);
    out += ' ';
    out += std::to_string(n.right);
    out += ' ';
    out += text::format_double(n.value);
    out += '\n';
  }
}

Tree Tree::read(const std::vector<std::string>& lines, std::size_t& pos, std::size_t count,
                std::size_t n_features) {
  Tree t;
  t.nodes.reserve(count);
  for (std::size_t k = 0; k < count; ++k, ++pos) {
    if (pos >= lines.size()) throw DataError("model file truncated inside a tree");
    const auto parts = text::split(text::trim(lines[pos]), ' ');
    if (parts.size() != 5) throw DataError("bad tree node line: " + lines[pos]);
    TreeNode n;
    const auto f = text::parse_double(parts[0]);
    const auto thr = text::parse_double(parts[1]);
    const auto l = text::parse_double(parts[2]);
    const auto r = text::parse_double(parts[3]);
    const auto v = text::parse_double(parts[4]);
    if (!f || !thr || !l || !r || !v) throw DataError("bad tree node line: " + lines[pos]);
    n.feature = static_cast<int>(*f);
    n.threshold = *thr;
    n.left = static_cast<int>(*l);
    n.right = static_cast<int>(*r);
    n.value = *v;
    if (n.feature >= static_cast<int>(n_features)) throw DataError("tree references unknown feature");
    if (n.feature >= 0 && (n.left <= static_cast<int>(k) || n.right <= static_cast<int>(k) ||
                           n.left >= static_cast<int>(count) || n.right >= static_cast<int>(count)))
      throw DataError("tree child index out of range");
    t.nodes.push_back(n);
  }
  return t;
}

}  // namespace ranalyzer
