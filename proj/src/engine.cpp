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

#include "kset/engine.hpp"

#include <algorithm>
#include <string>

namespace kset {

int ceil_log2(int x) {
  int bits = 0;
  while ((1 << bits) < x) ++bits;
  return bits;
}

void check_horizon(const DecisionRule& rule, const SystemParams& params, int horizon) {
  if (horizon < 0) throw EngineError("horizon must be >= 0");
  if (horizon > kMaxHorizon) throw EngineError("horizon exceeds " + std::to_string(kMaxHorizon));
  rule.check_params(params);
  if (rule.uniform() && horizon < params.t / params.k + 2)
    throw EngineError("uniform protocol " + rule.name() + " needs horizon >= floor(t/k)+2 = " +
                      std::to_string(params.t / params.k + 2));
}

RunAnalysis::RunAnalysis(const Adversary& adversary, int horizon)
    : graph_(std::make_shared<const CommGraph>(adversary, horizon)) {
  const int n = graph_->n();
  knowledge_.resize(static_cast<std::size_t>((horizon + 1) * n));
  for (int p = 0; p < n; ++p) {
    const NodeKnowledge* prev = nullptr;
    for (int m = 0; m <= horizon; ++m) {
      const NodeId node{p, m};
      if (!graph_->active(node)) break;
      NodeKnowledge& slot = knowledge_[static_cast<std::size_t>(m * n + p)];
      slot = analyze(*graph_, node, prev);
      prev = &slot;
    }
  }
}

const NodeKnowledge* RunAnalysis::knowledge(NodeId node) const {
  if (!graph_->active(node)) return nullptr;
  return &knowledge_[static_cast<std::size_t>(node.time * graph_->n() + node.process)];
}

RunTrace execute(const DecisionRule& rule, const RunAnalysis& analysis) {
  return run_rule(rule, analysis.adversary(), analysis.horizon(),
                  [&](NodeId node) { return analysis.knowledge(node); });
}

RunTrace execute(const DecisionRule& rule, const Adversary& adversary, int horizon) {
  check_horizon(rule, adversary.params, horizon);
  return execute(rule, RunAnalysis(adversary, horizon));
}

DecisionVector decide(const DecisionRule& rule, const RunAnalysis& analysis) {
  const SystemParams& params = analysis.adversary().params;
  check_horizon(rule, params, analysis.horizon());
  const int n = analysis.n();
  DecisionVector out(static_cast<std::size_t>(n));
  for (int p = 0; p < n; ++p) {
    const NodeKnowledge* prev = nullptr;
    for (int m = 0; m <= analysis.horizon(); ++m) {
      const NodeKnowledge* now = analysis.knowledge(NodeId{p, m});
      if (now == nullptr) break;
      if (auto v = rule.evaluate(DecisionInput{params, *now, prev})) {
        out[static_cast<std::size_t>(p)] = Decision{*v, m};
        break;
      }
      prev = now;
    }
  }
  return out;
}

std::int64_t BitAccounting::max_pair_bits() const {
  std::int64_t best = 0;
  for (int s = 0; s < n; ++s)
    for (int r = 0; r < n; ++r)
      if (s != r) best = std::max(best, pair_bits[static_cast<std::size_t>(s * n + r)]);
  return best;
}

double BitAccounting::constant() const {
  const double unit = static_cast<double>(n) * std::max(1, ceil_log2(n));
  return static_cast<double>(max_pair_bits()) / unit;
}

}  // namespace kset
