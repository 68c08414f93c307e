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

#ifndef KSET_ENGINE_HPP_
#define KSET_ENGINE_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kset/comm_graph.hpp"
#include "kset/knowledge.hpp"
#include "kset/model.hpp"
#include "kset/protocols.hpp"

namespace kset {

struct Decision {
  Value value = 0;
  int time = 0;

  bool operator==(const Decision&) const = default;
};

using DecisionVector = std::vector<std::optional<Decision>>;

struct NodeRecord {
  bool active = false;
  Value minval = 0;
  int hc = 0;
  bool low = false;
  std::optional<Value> decision;  // set only at the node where the decision is taken

  bool operator==(const NodeRecord&) const = default;
};

struct RunTrace {
  Adversary adversary;
  std::string protocol;
  int horizon = 0;
  std::vector<NodeRecord> nodes;  // row-major by time, then process
  DecisionVector decisions;       // per process

  const NodeRecord& at(NodeId node) const {
    return nodes[static_cast<std::size_t>(node.time * adversary.n() + node.process)];
  }
  bool operator==(const RunTrace&) const = default;
};

// Knowledge of every active node of one run, computed once so that several
// decision rules can be evaluated against the same run cheaply.
class RunAnalysis {
 public:
  RunAnalysis(const Adversary& adversary, int horizon);

  const CommGraph& graph() const { return *graph_; }
  std::shared_ptr<const CommGraph> graph_ptr() const { return graph_; }
  const Adversary& adversary() const { return graph_->adversary(); }
  int horizon() const { return graph_->horizon(); }
  int n() const { return graph_->n(); }

  // Null when the node is not active.
  const NodeKnowledge* knowledge(NodeId node) const;
  View view(NodeId node) const { return View(graph_, node); }

 private:
  std::shared_ptr<const CommGraph> graph_;
  std::vector<NodeKnowledge> knowledge_;
};

// Replays `rule` given per-node knowledge; `knowledge_at` returns null for
// inactive nodes. Shared by both transports.
void check_horizon(const DecisionRule& rule, const SystemParams& params, int horizon);

template <typename KnowledgeAt>
RunTrace run_rule(const DecisionRule& rule, const Adversary& adversary, int horizon, KnowledgeAt&& knowledge_at) {
  check_horizon(rule, adversary.params, horizon);
  const int n = adversary.n();
  RunTrace trace;
  trace.adversary = adversary;
  trace.protocol = rule.name();
  trace.horizon = horizon;
  trace.nodes.resize(static_cast<std::size_t>((horizon + 1) * n));
  trace.decisions.assign(static_cast<std::size_t>(n), std::nullopt);
  for (int p = 0; p < n; ++p) {
    const NodeKnowledge* prev = nullptr;
    for (int m = 0; m <= horizon; ++m) {
      const NodeKnowledge* now = knowledge_at(NodeId{p, m});
      if (now == nullptr) break;
      NodeRecord& row = trace.nodes[static_cast<std::size_t>(m * n + p)];
      row.active = true;
      row.minval = now->summary.minval;
      row.hc = now->summary.hc;
      row.low = now->summary.low;
      auto& decided = trace.decisions[static_cast<std::size_t>(p)];
      if (!decided) {
        if (auto v = rule.evaluate(DecisionInput{adversary.params, *now, prev})) {
          row.decision = *v;
          decided = Decision{*v, m};
        }
      }
      prev = now;
    }
  }
  return trace;
}

RunTrace execute(const DecisionRule& rule, const RunAnalysis& analysis);
RunTrace execute(const DecisionRule& rule, const Adversary& adversary, int horizon);
// Decisions only; avoids building node rows.
DecisionVector decide(const DecisionRule& rule, const RunAnalysis& analysis);

struct BitAccounting {
  int n = 0;
  int id_bits = 0;
  int value_bits = 0;
  int round_bits = 0;
  std::vector<std::int64_t> pair_bits;  // [sender * n + receiver]
  std::int64_t value_messages = 0;
  std::int64_t failed_at_messages = 0;
  std::int64_t alive_at_messages = 0;
  std::int64_t im_alive_messages = 0;
  int max_failed_at_per_subject = 0;  // per (sender, subject) pair
  int max_alive_at_per_subject = 0;

  std::int64_t max_pair_bits() const;
  // max_pair_bits / (n * ceil(log2 n))
  double constant() const;
};

struct CompactRun {
  RunTrace trace;
  BitAccounting bits;
  // Knowledge reconstructed by receivers from the compact messages.
  std::vector<std::optional<NodeKnowledge>> knowledge;
};

CompactRun execute_compact(const DecisionRule& rule, const Adversary& adversary, int horizon);

int ceil_log2(int x);

}  // namespace kset

#endif  // KSET_ENGINE_HPP_
