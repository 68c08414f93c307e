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

#include "kset/protocols.hpp"

#include <functional>

namespace kset {

namespace {

bool may_decide_min(const KnowledgeSummary& s, int k) { return s.low || s.hc < k; }

class FunctionRule final : public DecisionRule {
 public:
  using Fn = std::optional<Value> (*)(const DecisionInput&);

  FunctionRule(std::string name, Fn fn, bool uniform, std::function<void(const SystemParams&)> check)
      : name_(std::move(name)), fn_(fn), uniform_(uniform), check_(std::move(check)) {}

  std::string name() const override { return name_; }
  std::optional<Value> evaluate(const DecisionInput& in) const override { return fn_(in); }
  bool uniform() const override { return uniform_; }
  void check_params(const SystemParams& params) const override {
    if (check_) check_(params);
  }

 private:
  std::string name_;
  Fn fn_;
  bool uniform_;
  std::function<void(const SystemParams&)> check_;
};

std::optional<Value> eager(const DecisionInput& in) {
  // Decides on its own input right away; violates agreement on purpose.
  return std::countr_zero(in.now.summary.vals);
}

void require_binary_consensus(const SystemParams& p) {
  if (p.k != 1) throw ModelError("opt0 requires k = 1");
  if (p.d_vals != 1) throw ModelError("opt0 requires values in {0,1}");
}

}  // namespace

std::optional<Value> opt_min_k(const DecisionInput& in) {
  const KnowledgeSummary& s = in.now.summary;
  if (may_decide_min(s, in.params.k)) return s.minval;
  return std::nullopt;
}

int u_p_min_k_branch(const DecisionInput& in) {
  const KnowledgeSummary& s = in.now.summary;
  const int k = in.params.k;
  const int m = in.time();
  if (may_decide_min(s, k) && in.now.minval_persists) return 1;
  if (m > 0 && in.prev != nullptr && may_decide_min(in.prev->summary, k)) return 2;
  if (m == in.params.worst_case_time()) return 3;
  return 0;
}

std::optional<Value> u_p_min_k(const DecisionInput& in) {
  switch (u_p_min_k_branch(in)) {
    case 1:
    case 3: return in.now.summary.minval;
    case 2: return in.prev->summary.minval;
    default: return std::nullopt;
  }
}

std::optional<Value> opt_zero(const DecisionInput& in) {
  const KnowledgeSummary& s = in.now.summary;
  if (s.knows(0)) return 0;
  for (int l = 0; l <= in.time(); ++l)
    if (s.hidden_count(l) == 0) return 1;
  return std::nullopt;
}

std::optional<Value> floodmin_baseline(const DecisionInput& in) {
  if (in.time() == in.params.worst_case_time()) return in.now.summary.minval;
  return std::nullopt;
}

// Becomes ready at the first time m >= 1 at which fewer than k failures were
// newly discovered in round m, then decides one round later on the estimate
// it held when it became ready. A process that is not ready earlier falls
// back to the worst-case deadline.
std::optional<Value> earlystop_baseline(const DecisionInput& in) {
  const int m = in.time();
  if (m >= 2 && in.prev != nullptr && in.prev->new_failures < in.params.k) return in.prev->summary.minval;
  if (m == in.params.worst_case_time()) return in.now.summary.minval;
  return std::nullopt;
}

std::unique_ptr<DecisionRule> make_protocol(std::string_view name) {
  if (name == "opt0") return std::make_unique<FunctionRule>("opt0", &opt_zero, false, &require_binary_consensus);
  if (name == "optmink") return std::make_unique<FunctionRule>("optmink", &opt_min_k, false, nullptr);
  if (name == "upmink") return std::make_unique<FunctionRule>("upmink", &u_p_min_k, true, nullptr);
  if (name == "floodmin") return std::make_unique<FunctionRule>("floodmin", &floodmin_baseline, false, nullptr);
  if (name == "earlystop") return std::make_unique<FunctionRule>("earlystop", &earlystop_baseline, false, nullptr);
  if (name == "eager") return std::make_unique<FunctionRule>("eager", &eager, false, nullptr);
  throw ModelError("unknown protocol '" + std::string(name) + "'");
}

std::vector<std::string> protocol_names() { return {"opt0", "optmink", "upmink", "floodmin", "earlystop", "eager"}; }

}  // namespace kset
