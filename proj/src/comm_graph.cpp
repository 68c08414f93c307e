/*
 * Copyright (c) 2026, The kset-workbench Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "kset/comm_graph.hpp"

#include <functional>
#include <string>

namespace kset {

CommGraph::CommGraph(Adversary adversary, int horizon)
    : adversary_(std::move(adversary)), n_(adversary_.params.n), horizon_(horizon) {
  if (horizon < 0) throw EngineError("horizon must be >= 0");
  if (horizon > kMaxHorizon) throw EngineError("horizon exceeds " + std::to_string(kMaxHorizon));
  const auto levels = static_cast<std::size_t>(horizon_ + 1);
  const auto nodes = levels * static_cast<std::size_t>(n_);
  in_.assign(nodes, 0);
  seen_.assign(nodes * levels, 0);
  vals_.assign(nodes, 0);

  const FailurePattern& pattern = adversary_.pattern;
  std::vector<int> crash_round(static_cast<std::size_t>(n_));
  for (int p = 0; p < n_; ++p) crash_round[static_cast<std::size_t>(p)] = pattern.crash_round(p);

  for (int p = 0; p < n_; ++p) {
    const NodeId node{p, 0};
    seen_[index(node) * levels] = bit(p);
    vals_[index(node)] = bit(adversary_.values[static_cast<std::size_t>(p)]);
  }
  for (int m = 1; m <= horizon_; ++m) {
    for (int p = 0; p < n_; ++p) {
      if (crash_round[static_cast<std::size_t>(p)] <= m) continue;
      ProcessSet senders = 0;
      for (int j = 0; j < n_; ++j) {
        if (j == p) continue;
        const int c = crash_round[static_cast<std::size_t>(j)];
        if (c > m || (c == m && contains(pattern.crash(j)->delivers, p))) senders |= bit(j);
      }
      const NodeId node{p, m};
      in_[index(node)] = senders;
      ProcessSet* out = &seen_[index(node) * levels];
      ValueSet vals = 0;
      for (ProcessSet from = senders | bit(p); from; from &= from - 1) {
        const NodeId prev{std::countr_zero(from), m - 1};
        const ProcessSet* src = &seen_[index(prev) * levels];
        for (int l = 0; l < m; ++l) out[l] |= src[l];
        vals |= vals_[index(prev)];
      }
      out[m] = bit(p);
      vals_[index(node)] = vals;
    }
  }
}

bool CommGraph::active(NodeId node) const {
  if (node.process < 0 || node.process >= n_ || node.time < 0 || node.time > horizon_) return false;
  return adversary_.pattern.crash_round(node.process) > node.time;
}

View::View(std::shared_ptr<const CommGraph> graph, NodeId owner) : graph_(std::move(graph)), owner_(owner) {
  if (!graph_) throw EngineError("view needs a graph");
  if (!graph_->active(owner_)) throw EngineError("no view at inactive node " + to_string(owner_));
}

bool View::contains(NodeId node) const {
  if (node.time < 0 || node.time > owner_.time || node.process < 0 || node.process >= n()) return false;
  return kset::contains(seen_at(node.time), node.process);
}

ProcessSet View::delivered_to(NodeId node) const {
  if (!contains(node)) throw EngineError("node " + to_string(node) + " is not in the view of " + to_string(owner_));
  return graph_->in_senders(node);
}

std::optional<Value> View::initial_value(ProcessId p) const {
  if (!contains(NodeId{p, 0})) return std::nullopt;
  return graph_->adversary().values[static_cast<std::size_t>(p)];
}

std::vector<std::uint32_t> View::key() const {
  std::vector<std::uint32_t> key;
  key.push_back(static_cast<std::uint32_t>(owner_.process));
  key.push_back(static_cast<std::uint32_t>(owner_.time));
  for (int l = 0; l <= owner_.time; ++l) key.push_back(seen_at(l));
  for (int l = 1; l <= owner_.time; ++l)
    for (ProcessSet s = seen_at(l); s; s &= s - 1) key.push_back(graph_->in_senders(NodeId{std::countr_zero(s), l}));
  for (ProcessSet s = seen_at(0); s; s &= s - 1)
    key.push_back(static_cast<std::uint32_t>(graph_->adversary().values[static_cast<std::size_t>(std::countr_zero(s))]));
  return key;
}

std::size_t View::hash() const {
  std::size_t h = 0xcbf29ce484222325ull;
  for (std::uint32_t w : key()) h = (h ^ w) * 0x100000001b3ull;
  return h;
}

bool operator==(const View& a, const View& b) {
  if (a.owner_ != b.owner_ || a.n() != b.n()) return false;
  if (a.graph_ == b.graph_) return true;
  const int m = a.owner_.time;
  for (int l = 0; l <= m; ++l)
    if (a.seen_at(l) != b.seen_at(l)) return false;
  for (int l = 1; l <= m; ++l)
    for (ProcessSet s = a.seen_at(l); s; s &= s - 1) {
      const NodeId node{std::countr_zero(s), l};
      if (a.graph_->in_senders(node) != b.graph_->in_senders(node)) return false;
    }
  const auto& va = a.graph_->adversary().values;
  const auto& vb = b.graph_->adversary().values;
  for (ProcessSet s = a.seen_at(0); s; s &= s - 1) {
    const auto p = static_cast<std::size_t>(std::countr_zero(s));
    if (va[p] != vb[p]) return false;
  }
  return true;
}

std::optional<View> ViewTable::at(NodeId node) const {
  if (!graph_->active(node)) return std::nullopt;
  return View(graph_, node);
}

std::size_t ViewTable::size() const {
  std::size_t count = 0;
  for (int m = 0; m <= graph_->horizon(); ++m)
    for (int p = 0; p < graph_->n(); ++p) count += graph_->active(NodeId{p, m}) ? 1 : 0;
  return count;
}

ViewTable build_views(const Adversary& adversary, int horizon) {
  return ViewTable(std::make_shared<const CommGraph>(adversary, horizon));
}

}  // namespace kset
