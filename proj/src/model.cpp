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

#include "kset/model.hpp"

namespace kset {

SystemParams SystemParams::make(int n, int t, int k, int d_vals, int horizon) {
  SystemParams p;
  p.n = n;
  p.t = t;
  p.k = k;
  p.d_vals = d_vals < 0 ? k : d_vals;
  p.horizon = horizon < 0 ? (k >= 1 ? t / k + 2 : 2) : horizon;
  p.validate();
  return p;
}

void SystemParams::validate() const {
  if (n < 2 || n > kMaxProcesses)
    throw ModelError("n must be in [2, " + std::to_string(kMaxProcesses) + "], got " + std::to_string(n));
  if (t < 0 || t > n - 1) throw ModelError("t must be in [0, n-1], got " + std::to_string(t));
  if (k < 1) throw ModelError("k must be >= 1, got " + std::to_string(k));
  if (d_vals < k || d_vals > kMaxValue)
    throw ModelError("d must be in [k, " + std::to_string(kMaxValue) + "], got " + std::to_string(d_vals));
  if (horizon < 1 || horizon > kMaxHorizon)
    throw ModelError("horizon must be in [1, " + std::to_string(kMaxHorizon) + "], got " +
                     std::to_string(horizon));
}

std::string to_string(NodeId node) {
  return "<" + std::to_string(node.process) + "," + std::to_string(node.time) + ">";
}

FailurePattern::FailurePattern(int n, int t, std::vector<std::optional<CrashSpec>> crashes)
    : crash_(std::move(crashes)) {
  if (static_cast<int>(crash_.size()) != n)
    throw ModelError("failure pattern needs one entry per process");
  validate(t);
}

void FailurePattern::check_process(ProcessId p) const {
  if (p < 0 || p >= n()) throw ModelError("process id out of range: " + std::to_string(p));
}

const std::optional<CrashSpec>& FailurePattern::crash(ProcessId p) const {
  check_process(p);
  return crash_[static_cast<std::size_t>(p)];
}

int FailurePattern::crash_round(ProcessId p) const {
  const auto& c = crash(p);
  return c ? c->round : kNever;
}

ProcessSet FailurePattern::faulty() const {
  ProcessSet s = 0;
  for (int p = 0; p < n(); ++p)
    if (crash_[static_cast<std::size_t>(p)]) s |= bit(p);
  return s;
}

void FailurePattern::set_crash(ProcessId p, std::optional<CrashSpec> spec) {
  check_process(p);
  if (spec) {
    if (spec->round < 1) throw ModelError("crash round must be >= 1");
    if (spec->delivers & ~all_processes(n())) throw ModelError("delivery set names unknown processes");
    if (contains(spec->delivers, p)) throw ModelError("delivery set must not contain the crashing process");
  }
  crash_[static_cast<std::size_t>(p)] = spec;
}

void FailurePattern::validate(int t) const {
  for (int p = 0; p < n(); ++p) {
    const auto& c = crash_[static_cast<std::size_t>(p)];
    if (!c) continue;
    if (c->round < 1) throw ModelError("crash round must be >= 1 for process " + std::to_string(p));
    if (c->delivers & ~all_processes(n()))
      throw ModelError("delivery set of process " + std::to_string(p) + " names unknown processes");
    if (contains(c->delivers, p))
      throw ModelError("delivery set of process " + std::to_string(p) + " contains itself");
  }
  if (count_faulty(*this) > t)
    throw ModelError("pattern has " + std::to_string(count_faulty(*this)) + " faulty processes, bound is " +
                     std::to_string(t));
}

bool is_active(const FailurePattern& pattern, ProcessId process, int time) {
  return pattern.crash_round(process) > time;
}

bool edge_exists(const FailurePattern& pattern, ProcessId sender, ProcessId receiver, int round) {
  if (receiver < 0 || receiver >= pattern.n()) throw ModelError("receiver id out of range");
  if (round < 1) throw ModelError("rounds start at 1");
  if (sender == receiver) throw ModelError("self-continuation is not an edge");
  const auto& c = pattern.crash(sender);
  if (!c || c->round > round) return true;
  return c->round == round && contains(c->delivers, receiver);
}

int count_faulty(const FailurePattern& pattern) { return popcount(pattern.faulty()); }

Adversary::Adversary(SystemParams p, std::vector<Value> v, FailurePattern f)
    : params(p), values(std::move(v)), pattern(std::move(f)) {
  validate();
}

void Adversary::validate() const {
  params.validate();
  if (static_cast<int>(values.size()) != params.n)
    throw ModelError("expected " + std::to_string(params.n) + " initial values, got " +
                     std::to_string(values.size()));
  for (Value v : values)
    if (v < 0 || v > params.d_vals)
      throw ModelError("initial value " + std::to_string(v) + " outside [0, " + std::to_string(params.d_vals) + "]");
  if (pattern.n() != params.n) throw ModelError("failure pattern size does not match n");
  pattern.validate(params.t);
}

ProcessSet to_set(const std::vector<ProcessId>& ids) {
  ProcessSet s = 0;
  for (ProcessId p : ids) {
    if (p < 0 || p >= kMaxProcesses) throw ModelError("process id out of range: " + std::to_string(p));
    s |= bit(p);
  }
  return s;
}

std::vector<ProcessId> to_ids(ProcessSet set) {
  std::vector<ProcessId> ids;
  for (int p = 0; set; ++p, set >>= 1)
    if (set & 1u) ids.push_back(p);
  return ids;
}

Adversary make_adversary(const SystemParams& params, std::vector<Value> values,
                         std::vector<std::tuple<ProcessId, int, std::vector<ProcessId>>> crashes) {
  FailurePattern pattern(params.n);
  for (const auto& [p, round, delivers] : crashes) pattern.set_crash(p, CrashSpec{round, to_set(delivers)});
  return Adversary(params, std::move(values), std::move(pattern));
}

}  // namespace kset
