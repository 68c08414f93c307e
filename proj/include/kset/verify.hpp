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

#ifndef KSET_VERIFY_HPP_
#define KSET_VERIFY_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "kset/adversaries.hpp"
#include "kset/engine.hpp"
#include "kset/model.hpp"

namespace kset {

// ------------------------------------------------------------- properties

struct PropertyResult {
  bool pass = true;
  std::optional<Adversary> counterexample;
  ProcessSet offenders = 0;
  std::string detail;
};

enum class TimeBound { kNonuniform, kUniform };

// floor(f/k)+1, or min(floor(t/k)+1, floor(f/k)+2) for the uniform variant.
int time_bound(TimeBound bound, const SystemParams& params, int faulty);

struct PropertyReport {
  PropertyResult validity;
  PropertyResult decision;
  PropertyResult agreement;
  PropertyResult uniform_agreement;  // evaluated only when requested
  bool uniform_checked = false;

  bool ok() const {
    return validity.pass && decision.pass && agreement.pass && (!uniform_checked || uniform_agreement.pass);
  }
};

// Decisions are recorded at the time they are taken, so these checks need
// only the adversary and the decision vector.
PropertyReport check_decisions(const Adversary& adversary, const DecisionVector& decisions, bool uniform);
PropertyReport check_properties(const RunTrace& trace, bool uniform);
PropertyResult check_decision_times(const Adversary& adversary, const DecisionVector& decisions, TimeBound bound);
PropertyResult check_time_bound(const RunTrace& trace, TimeBound bound);

// Aggregate over an adversary stream.
struct PropertyTally {
  std::uint64_t failures = 0;
  std::optional<Adversary> first_counterexample;
  ProcessSet offenders = 0;
  std::string detail;

  void add(const PropertyResult& r);
};

struct AggregateReport {
  std::string protocol;
  std::string spec;
  std::uint64_t runs = 0;
  std::map<std::string, PropertyTally> properties;  // validity, decision, agreement, uniform-agreement, time-bound
  double seconds = 0;

  bool ok() const;
};

struct CheckOptions {
  bool uniform = false;
  std::optional<TimeBound> bound;
  int horizon = 0;
  int jobs = 1;
};

AggregateReport check_enumeration(const Enumerator& adversaries, const DecisionRule& rule, const CheckOptions& options);

// ------------------------------------------------------------- domination

struct DominationWitness {
  Adversary adversary;
  ProcessId process = -1;  // -1 for last-decider comparisons
  int time_q = -1;         // -1: never decides
  int time_p = -1;
};

struct DominationReport {
  std::string q;
  std::string p;
  bool last_decider = false;
  std::uint64_t runs = 0;
  std::uint64_t strict_count = 0;
  std::uint64_t violation_count = 0;
  std::vector<DominationWitness> strict_witnesses;  // first few, in stream order
  std::vector<DominationWitness> violations;

  bool holds() const { return violation_count == 0; }
  bool strict() const { return holds() && strict_count > 0; }
};

// Latest decision time among correct processes; kNever if one never decides.
int last_correct_decision(const Adversary& adversary, const DecisionVector& decisions);

// Pairwise comparison of every ordered pair of protocols, in both the
// per-process and the last-decider sense, over one shared stream.
class DominationMatrix {
 public:
  explicit DominationMatrix(std::vector<std::string> protocols, std::size_t keep_witnesses = 3);

  const std::vector<std::string>& protocols() const { return protocols_; }
  void add(const Adversary& adversary, const std::vector<DecisionVector>& decisions);
  const DominationReport& report(std::size_t q, std::size_t p, bool last_decider) const;
  const DominationReport& report(const std::string& q, const std::string& p, bool last_decider) const;
  std::size_t index(const std::string& name) const;

 private:
  std::vector<std::string> protocols_;
  std::size_t keep_;
  std::vector<DominationReport> standard_;
  std::vector<DominationReport> last_;
};

DominationMatrix domination_matrix(const Enumerator& adversaries, const std::vector<std::string>& protocols,
                                   int horizon, int jobs = 1);
DominationReport compare_domination(const std::string& q, const std::string& p, const Enumerator& adversaries,
                                    int horizon, bool last_decider, int jobs = 1);

// ------------------------------------------------ unbeatability certificate

struct CertificateReport {
  std::uint64_t runs = 0;
  std::uint64_t undecided_nodes = 0;
  std::uint64_t certified_nodes = 0;
  std::uint64_t failures = 0;
  std::optional<Adversary> first_failure;
  NodeId failed_node;
  std::string detail;

  bool ok() const { return failures == 0; }
  void merge(const CertificateReport& other);
};

// For every active node at which the optmink trace is still undecided:
// the node is high with hidden capacity >= k, and the hidden channel
// construction with the k low values yields a verified run.
CertificateReport unbeatability_certificate(const RunTrace& trace);
CertificateReport certify_enumeration(const Enumerator& adversaries, int horizon, int jobs = 1);

// ------------------------------------------------------------ batching

// Runs `work` on every adversary of the stream, in batches spread over
// `jobs` threads, and feeds the results to `merge` in stream order.
template <typename Result, typename Work, typename Merge>
void run_batched(const Enumerator& adversaries, int jobs, Work&& work, Merge&& merge) {
  constexpr std::size_t kBatch = 4096;
  std::vector<Adversary> batch;
  batch.reserve(kBatch);
  std::vector<Result> results;
  auto flush = [&] {
    results.assign(batch.size(), Result{});
    if (jobs <= 1 || batch.size() < 2) {
      for (std::size_t i = 0; i < batch.size(); ++i) results[i] = work(batch[i]);
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < jobs; ++w)
        pool.emplace_back([&, w] {
          for (std::size_t i = static_cast<std::size_t>(w); i < batch.size(); i += static_cast<std::size_t>(jobs))
            results[i] = work(batch[i]);
        });
      for (auto& th : pool) th.join();
    }
    for (std::size_t i = 0; i < batch.size(); ++i) merge(batch[i], std::move(results[i]));
    batch.clear();
  };
  adversaries.for_each([&](const Adversary& a) {
    batch.push_back(a);
    if (batch.size() == kBatch) flush();
    return true;
  });
  flush();
}

}  // namespace kset

#endif  // KSET_VERIFY_HPP_
