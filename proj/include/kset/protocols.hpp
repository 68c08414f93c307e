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

#ifndef KSET_PROTOCOLS_HPP_
#define KSET_PROTOCOLS_HPP_

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kset/knowledge.hpp"
#include "kset/model.hpp"

namespace kset {

struct DecisionInput {
  const SystemParams& params;
  const NodeKnowledge& now;
  const NodeKnowledge* prev;  // null at time 0

  int time() const { return now.summary.observer.time; }
};

// A decision rule of a full-information protocol. Rules are stateless and
// see only the knowledge derived from the current (and previous) view.
class DecisionRule {
 public:
  virtual ~DecisionRule() = default;
  virtual std::string name() const = 0;
  virtual std::optional<Value> evaluate(const DecisionInput& in) const = 0;
  // Targets uniform k-set agreement (and thus needs the longer horizon).
  virtual bool uniform() const { return false; }
  // Throws ModelError when the rule cannot run under `params`.
  virtual void check_params(const SystemParams& params) const { (void)params; }
};

std::optional<Value> opt_min_k(const DecisionInput& in);
std::optional<Value> u_p_min_k(const DecisionInput& in);
std::optional<Value> opt_zero(const DecisionInput& in);
std::optional<Value> floodmin_baseline(const DecisionInput& in);
std::optional<Value> earlystop_baseline(const DecisionInput& in);

// Which u-P_min[k] branch fires (1..3), or 0 for none. Exposed for tests.
int u_p_min_k_branch(const DecisionInput& in);

// Names: opt0, optmink, upmink, floodmin, earlystop, and the negative
// control "eager" (decides its own input at time 0).
std::unique_ptr<DecisionRule> make_protocol(std::string_view name);
std::vector<std::string> protocol_names();

}  // namespace kset

#endif  // KSET_PROTOCOLS_HPP_
