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

#include "kset/knowledge.hpp"

#include <algorithm>
#include <string>

namespace kset {

namespace {

// crashed[l] collects every process whose round-rho message (rho <= l) is
// missing at some node the observer has seen at level rho.
std::array<ProcessSet, kMaxHorizon + 1> crash_evidence(const CommGraph& graph, NodeId observer) {
  std::array<ProcessSet, kMaxHorizon + 1> crashed{};
  const ProcessSet everyone = all_processes(graph.n());
  ProcessSet acc = 0;
  for (int rho = 1; rho <= observer.time; ++rho) {
    for (ProcessSet s = graph.seen(observer, rho); s; s &= s - 1) {
      const int h = std::countr_zero(s);
      acc |= everyone & ~graph.in_senders(NodeId{h, rho}) & ~bit(h);
    }
    crashed[static_cast<std::size_t>(rho)] = acc;
  }
  return crashed;
}

void check_target(const View& view, NodeId target) {
  if (target.time > view.time())
    throw KnowledgeError("target " + to_string(target) + " is later than observer " + to_string(view.owner()));
  if (target.time < 0 || target.process < 0 || target.process >= view.n())
    throw KnowledgeError("target " + to_string(target) + " out of range");
}

}  // namespace

std::string_view to_string(NodeStatus status) {
  switch (status) {
    case NodeStatus::kSeen: return "seen";
    case NodeStatus::kGuaranteedCrashed: return "guaranteed-crashed";
    case NodeStatus::kHidden: return "hidden";
  }
  return "?";
}

KnowledgeSummary summarize(const CommGraph& graph, NodeId node) {
  KnowledgeSummary s;
  s.observer = node;
  s.vals = graph.vals(node);
  s.minval = std::countr_zero(s.vals);
  s.low = s.minval < graph.params().k;
  const auto crashed = crash_evidence(graph, node);
  const ProcessSet everyone = all_processes(graph.n());
  s.hc = graph.n();
  for (int l = 0; l <= node.time; ++l) {
    const auto idx = static_cast<std::size_t>(l);
    s.hidden[idx] = everyone & ~graph.seen(node, l) & ~crashed[idx];
    s.hc = std::min(s.hc, popcount(s.hidden[idx]));
  }
  s.known_failures = popcount(crashed[static_cast<std::size_t>(node.time)]);
  return s;
}

bool persists(const CommGraph& graph, const KnowledgeSummary& now, Value v) {
  if (!contains(now.vals, v)) return false;
  const NodeId node = now.observer;
  const int m = node.time;
  if (m > 0 && contains(graph.vals(NodeId{node.process, m - 1}), v)) return true;
  int holders = 0;
  if (m > 0)
    for (ProcessSet s = graph.seen(node, m - 1); s; s &= s - 1)
      holders += contains(graph.vals(NodeId{std::countr_zero(s), m - 1}), v) ? 1 : 0;
  return holders >= graph.params().t - now.known_failures;
}

NodeKnowledge analyze(const CommGraph& graph, NodeId node, const NodeKnowledge* prev) {
  NodeKnowledge k;
  k.summary = summarize(graph, node);
  k.minval_persists = persists(graph, k.summary, k.summary.minval);
  k.new_failures = k.summary.known_failures - (prev ? prev->summary.known_failures : 0);
  return k;
}

NodeStatus classify(const View& view, NodeId target) {
  check_target(view, target);
  if (view.contains(target)) return NodeStatus::kSeen;
  const auto crashed = crash_evidence(view.graph(), view.owner());
  return contains(crashed[static_cast<std::size_t>(target.time)], target.process) ? NodeStatus::kGuaranteedCrashed
                                                                                  : NodeStatus::kHidden;
}

HiddenCapacity hidden_capacity(const View& view) {
  const KnowledgeSummary s = summarize(view.graph(), view.owner());
  HiddenCapacity out;
  out.hc = s.hc;
  out.hidden.assign(s.hidden.begin(), s.hidden.begin() + view.time() + 1);
  return out;
}

int known_failures(const View& view) { return summarize(view.graph(), view.owner()).known_failures; }

bool persists(const View& view, Value v, const View* prev_view) {
  const int m = view.time();
  if (m > 0) {
    if (prev_view == nullptr) throw KnowledgeError("persists needs the previous view when time > 0");
    if (prev_view->owner() != NodeId{view.owner().process, m - 1})
      throw KnowledgeError("previous view belongs to " + to_string(prev_view->owner()));
  }
  const KnowledgeSummary s = summarize(view.graph(), view.owner());
  if (!s.knows(v)) return false;
  if (m > 0 && contains(prev_view->values(), v)) return true;
  int holders = 0;
  if (m > 0)
    for (ProcessSet seen = view.seen_at(m - 1); seen; seen &= seen - 1)
      holders += contains(view.graph().vals(NodeId{std::countr_zero(seen), m - 1}), v) ? 1 : 0;
  return holders >= view.params().t - s.known_failures;
}

KnowledgeSummary summarize(const View& view) { return summarize(view.graph(), view.owner()); }

}  // namespace kset
