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

#ifndef KSET_MODEL_HPP_
#define KSET_MODEL_HPP_

#include <bit>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace kset {

using ProcessId = int;
using Value = int;

// Sets of processes (and of values) are bitmasks; bit p stands for process p.
using ProcessSet = std::uint32_t;
using ValueSet = std::uint32_t;

inline constexpr int kMaxProcesses = 16;
inline constexpr int kMaxValue = 31;
inline constexpr int kMaxHorizon = 15;
inline constexpr int kNever = 1 << 20;  // crash round of a process that never crashes

constexpr ProcessSet bit(int p) { return ProcessSet{1} << p; }
constexpr ProcessSet all_processes(int n) { return n >= 32 ? ~ProcessSet{0} : (ProcessSet{1} << n) - 1; }
constexpr bool contains(ProcessSet s, int p) { return (s >> p) & 1u; }
inline int popcount(std::uint32_t s) { return std::popcount(s); }

class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SystemParams {
  int n = 2;
  int t = 0;
  int k = 1;
  int d_vals = 1;
  int horizon = 2;

  // horizon = floor(t/k) + 2
  static SystemParams make(int n, int t, int k, int d_vals = -1, int horizon = -1);

  int worst_case_time() const { return t / k + 1; }
  int default_horizon() const { return t / k + 2; }
  void validate() const;

  bool operator==(const SystemParams&) const = default;
};

struct NodeId {
  ProcessId process = 0;
  int time = 0;

  bool operator==(const NodeId&) const = default;
  auto operator<=>(const NodeId&) const = default;
};

std::string to_string(NodeId node);

struct CrashSpec {
  int round = 1;           // crash round, >= 1
  ProcessSet delivers = 0;  // receivers of the crash-round message, never includes self

  bool operator==(const CrashSpec&) const = default;
};

// Crash-failure pattern. Only faulty processes carry an entry; the layered
// graph is realized lazily through edge_exists().
class FailurePattern {
 public:
  FailurePattern() = default;
  explicit FailurePattern(int n) : crash_(static_cast<std::size_t>(n)) {}
  FailurePattern(int n, int t, std::vector<std::optional<CrashSpec>> crashes);

  static FailurePattern failure_free(int n) { return FailurePattern(n); }

  int n() const { return static_cast<int>(crash_.size()); }
  const std::optional<CrashSpec>& crash(ProcessId p) const;
  int crash_round(ProcessId p) const;  // kNever for correct processes
  ProcessSet faulty() const;
  bool is_faulty(ProcessId p) const { return crash(p).has_value(); }

  // Replaces (or clears) the entry of one process. Checks ids, not the t bound.
  void set_crash(ProcessId p, std::optional<CrashSpec> spec);
  void validate(int t) const;

  bool operator==(const FailurePattern&) const = default;

 private:
  void check_process(ProcessId p) const;

  std::vector<std::optional<CrashSpec>> crash_;
};

// Active at `time` iff the process has not crashed in any round <= time.
bool is_active(const FailurePattern& pattern, ProcessId process, int time);
// The round-`round` message from sender to receiver is delivered.
bool edge_exists(const FailurePattern& pattern, ProcessId sender, ProcessId receiver, int round);
int count_faulty(const FailurePattern& pattern);

struct Adversary {
  SystemParams params;
  std::vector<Value> values;
  FailurePattern pattern;

  Adversary() = default;
  Adversary(SystemParams params, std::vector<Value> values, FailurePattern pattern);

  int n() const { return params.n; }
  void validate() const;

  bool operator==(const Adversary& other) const {
    return values == other.values && pattern == other.pattern && params.n == other.params.n &&
           params.t == other.params.t && params.k == other.params.k &&
           params.d_vals == other.params.d_vals;
  }
};

// Convenience builder for hand-written scenarios.
Adversary make_adversary(const SystemParams& params, std::vector<Value> values,
                         std::vector<std::tuple<ProcessId, int, std::vector<ProcessId>>> crashes);

ProcessSet to_set(const std::vector<ProcessId>& ids);
std::vector<ProcessId> to_ids(ProcessSet set);

}  // namespace kset

#endif  // KSET_MODEL_HPP_
