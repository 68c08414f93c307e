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

#ifndef KSET_ADVERSARIES_HPP_
#define KSET_ADVERSARIES_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kset/comm_graph.hpp"
#include "kset/engine.hpp"
#include "kset/model.hpp"

namespace kset {

class AdversaryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- enumeration

enum class ValueFilter { kAll, kCanonical, kExplicit };

struct EnumSpec {
  SystemParams params;                  // params.horizon bounds the crash rounds
  std::optional<int> per_round_cap;     // max crashes in any single round
  ValueFilter filter = ValueFilter::kAll;
  std::vector<std::vector<Value>> explicit_values;
  std::optional<std::uint64_t> max_adversaries;  // sample this many when the space is larger
  std::uint64_t seed = 1;
  std::uint64_t ceiling = 100'000'000;  // refuse full enumeration above this size

  std::string describe() const;  // one-line replayable summary
};

// Monotone relabelings that keep low values low and high values high do not
// change any decision time, so it is enough to enumerate vectors whose low
// values form a prefix of 0..k-1 and whose high values form a prefix of k..d.
bool is_canonical_values(const std::vector<Value>& values, const SystemParams& params);

class Enumerator {
 public:
  explicit Enumerator(EnumSpec spec);

  const EnumSpec& spec() const { return spec_; }
  std::uint64_t pattern_count() const { return pattern_count_; }
  std::uint64_t value_vector_count() const { return value_vectors_.size(); }
  // Size of the full space (saturating at UINT64_MAX).
  std::uint64_t exact_count() const;
  bool sampled() const { return sampled_; }
  // Number of adversaries for_each will produce.
  std::uint64_t stream_size() const;

  // Visits adversaries in the deterministic order. The callback may return
  // false to stop early.
  void for_each(const std::function<bool(const Adversary&)>& visit) const;
  // Patterns only, in order (all value vectors are paired with each).
  void for_each_pattern(const std::function<bool(const FailurePattern&)>& visit) const;
  const std::vector<std::vector<Value>>& value_vectors() const { return value_vectors_; }

 private:
  EnumSpec spec_;
  std::uint64_t pattern_count_ = 0;
  std::vector<std::vector<Value>> value_vectors_;
  bool sampled_ = false;
};

// Closed-form size of the pattern space; independent of the enumerator.
std::uint64_t count_patterns(int n, int t, int horizon, std::optional<int> per_round_cap);

// ------------------------------------------------------ hidden channel runs

struct ChannelCheck {
  bool view_equal = false;    // r'_i(m) = r_i(m)
  bool carries_value = true;  // (a)
  bool values_bounded = true; // (b)
  bool mutually_hidden = true;// (c)
  std::string detail;

  bool ok() const { return view_equal && carries_value && values_bounded && mutually_hidden; }
};

struct HiddenChannels {
  Adversary adversary;
  NodeId observer;
  std::vector<Value> values;
  std::vector<std::vector<ProcessId>> chains;  // chains[b][l] is the chain-b process at level l
  ChannelCheck check;
};

// Chain witnesses: at every level the c lowest-id hidden processes, the b-th
// of each level forming chain b.
std::vector<std::vector<ProcessId>> choose_chains(const View& view, int c);
HiddenChannels build_hidden_channels_run(const View& view, const std::vector<Value>& values);
ChannelCheck verify_hidden_channels(const View& original, const HiddenChannels& channels);

// ------------------------------------------------------------ run surgery

struct SurgeryResult {
  Adversary adversary;          // the rerouted run
  HiddenChannels channels;      // the intermediate run it was derived from
  Value low_value = 0;          // i's unique low value
  std::vector<std::optional<Decision>> target_decisions;  // under optmink
  bool collective = false;      // targets decide all k low values at time m
  bool view_unchanged = false;  // <i,m> has the same view as in the input run
  bool prefix_unchanged = false;  // every view before time m equals the intermediate run's
  bool observer_decides_low = false;

  bool ok() const { return collective && view_unchanged && prefix_unchanged; }
};

// Empty when the hypotheses hold; otherwise the first violated one. Besides
// the four hypotheses of the lemma it requires every target to be undecided
// under optmink before time m.
std::optional<std::string> surgery_precondition_failure(const RunAnalysis& run, ProcessId i, int m,
                                                        const std::vector<ProcessId>& targets);
SurgeryResult surgery_collective_low(const Adversary& adversary, ProcessId i, int m,
                                     const std::vector<ProcessId>& targets);

struct SurgeryInstance {
  Adversary adversary;
  ProcessId observer = 0;
  int time = 0;
  std::vector<ProcessId> targets;
};

// Seeded search for adversaries with a node satisfying the hypotheses.
std::vector<SurgeryInstance> find_surgery_instances(const SystemParams& params, int max_time, int wanted,
                                                    std::uint64_t seed, std::uint64_t budget);

// ------------------------------------------------------- margin scenarios

enum class SearchStatus { kFound, kNone, kBudgetExhausted };

struct MarginSearch {
  SearchStatus status = SearchStatus::kBudgetExhausted;
  std::optional<Adversary> witness;
  std::uint64_t seed = 0;
  std::uint64_t budget = 0;
  std::uint64_t tried = 0;
  bool exhaustive = false;
  int upmink_last_decision = -1;     // latest decision among processes active at target_time
  int baseline_first_correct = -1;   // earliest decision among correct processes
};

// True when under upmink every process active at target_time has decided by
// then and every correct process decides strictly later under the baseline.
bool is_margin_witness(const Adversary& adversary, const std::string& baseline, int target_time, int horizon);
MarginSearch find_margin_scenario(const SystemParams& params, const std::string& baseline, int target_time,
                                  std::uint64_t seed = 1, std::uint64_t budget = 200'000);

// ------------------------------------------------------- figure scenarios

struct Scenario {
  std::string name;
  std::string description;
  Adversary adversary;
  NodeId focus;                       // the node the scenario is about
  std::vector<ProcessId> targets;     // surgery targets when relevant
};

// hidden-path: binary consensus, a value kept from the observer by a chain.
// hidden-capacity: three disjoint chains against the observer (k = 3).
// collective-low: a first-time-low observer with four hidden high targets (k = 4).
std::vector<std::string> scenario_names();
Scenario make_scenario(const std::string& name);

}  // namespace kset

#endif  // KSET_ADVERSARIES_HPP_
