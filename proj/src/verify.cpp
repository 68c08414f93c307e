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

#include "kset/verify.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include "kset/knowledge.hpp"

namespace kset {

namespace {

int time_of(const std::optional<Decision>& d) { return d ? d->time : kNever; }
int shown(int time) { return time == kNever ? -1 : time; }

PropertyResult fail(const Adversary& a, ProcessSet offenders, std::string detail) {
  return PropertyResult{false, a, offenders, std::move(detail)};
}

}  // namespace

int time_bound(TimeBound bound, const SystemParams& params, int faulty) {
  const int nonuniform = faulty / params.k + 1;
  if (bound == TimeBound::kNonuniform) return nonuniform;
  return std::min(params.t / params.k + 1, faulty / params.k + 2);
}

PropertyReport check_decisions(const Adversary& a, const DecisionVector& decisions, bool uniform) {
  PropertyReport report;
  report.uniform_checked = uniform;
  ValueSet inputs = 0;
  for (Value v : a.values) inputs |= bit(v);
  ValueSet correct_values = 0;
  ValueSet all_values = 0;
  ProcessSet invalid = 0;
  ProcessSet undecided = 0;
  ProcessSet correct_deciders = 0;
  ProcessSet deciders = 0;
  for (int p = 0; p < a.n(); ++p) {
    const auto& d = decisions[static_cast<std::size_t>(p)];
    const bool correct = !a.pattern.is_faulty(p);
    if (!d) {
      if (correct) undecided |= bit(p);
      continue;
    }
    if (!contains(inputs, d->value)) invalid |= bit(p);
    all_values |= bit(d->value);
    deciders |= bit(p);
    if (correct) {
      correct_values |= bit(d->value);
      correct_deciders |= bit(p);
    }
  }
  const int k = a.params.k;
  if (invalid) report.validity = fail(a, invalid, "decided value absent from the inputs");
  if (undecided) report.decision = fail(a, undecided, "correct process never decides");
  if (popcount(correct_values) > k)
    report.agreement = fail(a, correct_deciders, std::to_string(popcount(correct_values)) + " values decided by correct processes");
  if (uniform && popcount(all_values) > k)
    report.uniform_agreement = fail(a, deciders, std::to_string(popcount(all_values)) + " values decided overall");
  return report;
}

PropertyReport check_properties(const RunTrace& trace, bool uniform) {
  return check_decisions(trace.adversary, trace.decisions, uniform);
}

PropertyResult check_decision_times(const Adversary& a, const DecisionVector& decisions, TimeBound bound) {
  const int limit = time_bound(bound, a.params, count_faulty(a.pattern));
  ProcessSet late = 0;
  for (int p = 0; p < a.n(); ++p)
    if (!a.pattern.is_faulty(p) && time_of(decisions[static_cast<std::size_t>(p)]) > limit) late |= bit(p);
  if (late) return fail(a, late, "correct process decides after time " + std::to_string(limit));
  return {};
}

PropertyResult check_time_bound(const RunTrace& trace, TimeBound bound) {
  return check_decision_times(trace.adversary, trace.decisions, bound);
}

void PropertyTally::add(const PropertyResult& r) {
  if (r.pass) return;
  if (failures++ == 0) {
    first_counterexample = r.counterexample;
    offenders = r.offenders;
    detail = r.detail;
  }
}

bool AggregateReport::ok() const {
  return std::all_of(properties.begin(), properties.end(), [](const auto& kv) { return kv.second.failures == 0; });
}

AggregateReport check_enumeration(const Enumerator& adversaries, const DecisionRule& rule, const CheckOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  AggregateReport report;
  report.protocol = rule.name();
  report.spec = adversaries.spec().describe();
  report.properties["validity"];
  report.properties["decision"];
  report.properties["agreement"];
  if (options.uniform) report.properties["uniform-agreement"];
  if (options.bound) report.properties["time-bound"];
  struct Outcome {
    PropertyReport props;
    PropertyResult time;
  };
  run_batched<Outcome>(
      adversaries, options.jobs,
      [&](const Adversary& a) {
        const DecisionVector d = decide(rule, RunAnalysis(a, options.horizon));
        Outcome o{check_decisions(a, d, options.uniform), {}};
        if (options.bound) o.time = check_decision_times(a, d, *options.bound);
        return o;
      },
      [&](const Adversary&, Outcome&& o) {
        ++report.runs;
        report.properties["validity"].add(o.props.validity);
        report.properties["decision"].add(o.props.decision);
        report.properties["agreement"].add(o.props.agreement);
        if (options.uniform) report.properties["uniform-agreement"].add(o.props.uniform_agreement);
        if (options.bound) report.properties["time-bound"].add(o.time);
      });
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

// ------------------------------------------------------------- domination

int last_correct_decision(const Adversary& a, const DecisionVector& decisions) {
  int last = -1;
  for (int p = 0; p < a.n(); ++p)
    if (!a.pattern.is_faulty(p)) last = std::max(last, time_of(decisions[static_cast<std::size_t>(p)]));
  return last;
}

DominationMatrix::DominationMatrix(std::vector<std::string> protocols, std::size_t keep_witnesses)
    : protocols_(std::move(protocols)), keep_(keep_witnesses) {
  const std::size_t n = protocols_.size();
  standard_.resize(n * n);
  last_.resize(n * n);
  for (std::size_t q = 0; q < n; ++q)
    for (std::size_t p = 0; p < n; ++p) {
      for (auto* r : {&standard_[q * n + p], &last_[q * n + p]}) {
        r->q = protocols_[q];
        r->p = protocols_[p];
      }
      last_[q * n + p].last_decider = true;
    }
}

void DominationMatrix::add(const Adversary& a, const std::vector<DecisionVector>& decisions) {
  const std::size_t n = protocols_.size();
  std::vector<int> last(n);
  for (std::size_t x = 0; x < n; ++x) last[x] = last_correct_decision(a, decisions[x]);
  for (std::size_t q = 0; q < n; ++q)
    for (std::size_t p = 0; p < n; ++p) {
      DominationReport& std_report = standard_[q * n + p];
      ++std_report.runs;
      bool strict_here = false;
      for (int i = 0; i < a.n(); ++i) {
        const int tq = time_of(decisions[q][static_cast<std::size_t>(i)]);
        const int tp = time_of(decisions[p][static_cast<std::size_t>(i)]);
        if (tp != kNever && tq > tp) {
          if (std_report.violations.size() < keep_) std_report.violations.push_back({a, i, shown(tq), shown(tp)});
          ++std_report.violation_count;
        } else if (tq < tp && !strict_here) {
          strict_here = true;
          if (std_report.strict_witnesses.size() < keep_) std_report.strict_witnesses.push_back({a, i, shown(tq), shown(tp)});
          ++std_report.strict_count;
        }
      }
      DominationReport& ld = last_[q * n + p];
      ++ld.runs;
      if (last[p] != kNever && last[q] > last[p]) {
        if (ld.violations.size() < keep_) ld.violations.push_back({a, -1, shown(last[q]), shown(last[p])});
        ++ld.violation_count;
      } else if (last[q] < last[p]) {
        if (ld.strict_witnesses.size() < keep_) ld.strict_witnesses.push_back({a, -1, shown(last[q]), shown(last[p])});
        ++ld.strict_count;
      }
    }
}

std::size_t DominationMatrix::index(const std::string& name) const {
  const auto it = std::find(protocols_.begin(), protocols_.end(), name);
  if (it == protocols_.end()) throw std::out_of_range("protocol not in matrix: " + name);
  return static_cast<std::size_t>(it - protocols_.begin());
}

const DominationReport& DominationMatrix::report(std::size_t q, std::size_t p, bool last_decider) const {
  const std::size_t n = protocols_.size();
  return last_decider ? last_.at(q * n + p) : standard_.at(q * n + p);
}

const DominationReport& DominationMatrix::report(const std::string& q, const std::string& p, bool last_decider) const {
  return report(index(q), index(p), last_decider);
}

DominationMatrix domination_matrix(const Enumerator& adversaries, const std::vector<std::string>& protocols,
                                   int horizon, int jobs) {
  std::vector<std::unique_ptr<DecisionRule>> rules;
  for (const auto& name : protocols) rules.push_back(make_protocol(name));
  DominationMatrix matrix(protocols);
  run_batched<std::vector<DecisionVector>>(
      adversaries, jobs,
      [&](const Adversary& a) {
        const RunAnalysis run(a, horizon);
        std::vector<DecisionVector> out;
        out.reserve(rules.size());
        for (const auto& rule : rules) out.push_back(decide(*rule, run));
        return out;
      },
      [&](const Adversary& a, std::vector<DecisionVector>&& d) { matrix.add(a, d); });
  return matrix;
}

DominationReport compare_domination(const std::string& q, const std::string& p, const Enumerator& adversaries,
                                    int horizon, bool last_decider, int jobs) {
  return domination_matrix(adversaries, {q, p}, horizon, jobs).report(0, 1, last_decider);
}

// ------------------------------------------------ unbeatability certificate

void CertificateReport::merge(const CertificateReport& other) {
  runs += other.runs;
  undecided_nodes += other.undecided_nodes;
  certified_nodes += other.certified_nodes;
  if (other.failures > 0 && failures == 0) {
    first_failure = other.first_failure;
    failed_node = other.failed_node;
    detail = other.detail;
  }
  failures += other.failures;
}

CertificateReport unbeatability_certificate(const RunTrace& trace) {
  CertificateReport report;
  report.runs = 1;
  const Adversary& a = trace.adversary;
  const int k = a.params.k;
  std::vector<Value> lows;
  for (Value v = 0; v < k; ++v) lows.push_back(v);
  std::shared_ptr<const CommGraph> graph;
  auto record_failure = [&](NodeId node, std::string why) {
    if (report.failures++ == 0) {
      report.first_failure = a;
      report.failed_node = node;
      report.detail = std::move(why);
    }
  };
  for (int p = 0; p < a.n(); ++p) {
    const auto& d = trace.decisions[static_cast<std::size_t>(p)];
    for (int m = 0; m <= trace.horizon; ++m) {
      const NodeRecord& row = trace.at(NodeId{p, m});
      if (!row.active || (d && d->time <= m)) break;
      ++report.undecided_nodes;
      const NodeId node{p, m};
      if (row.low || row.hc < k) {
        record_failure(node, "undecided node is low or has hidden capacity below k");
        continue;
      }
      if (!graph) graph = std::make_shared<const CommGraph>(a, trace.horizon);
      try {
        const HiddenChannels h = build_hidden_channels_run(View(graph, node), lows);
        if (!h.check.ok()) {
          record_failure(node, "hidden channel run failed verification: " + h.check.detail);
          continue;
        }
      } catch (const AdversaryError& e) {
        record_failure(node, e.what());
        continue;
      }
      ++report.certified_nodes;
    }
  }
  return report;
}

CertificateReport certify_enumeration(const Enumerator& adversaries, int horizon, int jobs) {
  const auto rule = make_protocol("optmink");
  CertificateReport total;
  run_batched<CertificateReport>(
      adversaries, jobs, [&](const Adversary& a) { return unbeatability_certificate(execute(*rule, a, horizon)); },
      [&](const Adversary&, CertificateReport&& r) { total.merge(r); });
  return total;
}

}  // namespace kset
