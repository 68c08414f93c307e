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

#ifndef KSET_KNOWLEDGE_HPP_
#define KSET_KNOWLEDGE_HPP_

#include <array>
#include <string_view>

#include "kset/comm_graph.hpp"
#include "kset/model.hpp"

namespace kset {

enum class NodeStatus { kSeen, kGuaranteedCrashed, kHidden };

std::string_view to_string(NodeStatus status);

struct HiddenCapacity {
  int hc = 0;
  std::vector<ProcessSet> hidden;  // hidden processes per level 0..m
};

struct KnowledgeSummary {
  NodeId observer;
  ValueSet vals = 0;
  Value minval = 0;
  bool low = false;
  int hc = 0;
  int known_failures = 0;
  std::array<ProcessSet, kMaxHorizon + 1> hidden{};  // levels 0..observer.time

  bool knows(Value v) const { return contains(vals, v); }
  int hidden_count(int level) const { return popcount(hidden[static_cast<std::size_t>(level)]); }
};

// Everything a decision rule may consult at one node: the summary, whether
// minval is known to persist, and how many failures were first discovered in
// the node's own round.
struct NodeKnowledge {
  KnowledgeSummary summary;
  bool minval_persists = false;
  int new_failures = 0;
};

NodeStatus classify(const View& view, NodeId target);
HiddenCapacity hidden_capacity(const View& view);
int known_failures(const View& view);
// prev_view must be the observer's own view one step earlier when time > 0.
bool persists(const View& view, Value v, const View* prev_view);
KnowledgeSummary summarize(const View& view);

// Graph-level forms used by the engine; `node` must be active.
KnowledgeSummary summarize(const CommGraph& graph, NodeId node);
bool persists(const CommGraph& graph, const KnowledgeSummary& now, Value v);
NodeKnowledge analyze(const CommGraph& graph, NodeId node, const NodeKnowledge* prev);

class KnowledgeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace kset

#endif  // KSET_KNOWLEDGE_HPP_
