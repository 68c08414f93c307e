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

#include "kset/adversaries.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "kset/knowledge.hpp"

namespace kset {

namespace {

using Wide = unsigned __int128;
constexpr std::uint64_t kSaturated = ~std::uint64_t{0};

std::uint64_t saturate(Wide x) { return x > Wide{kSaturated} ? kSaturated : static_cast<std::uint64_t>(x); }

Wide sat_mul(Wide a, Wide b) {
  if (a == 0 || b == 0) return 0;
  const Wide cap = Wide{kSaturated} + 1;
  if (a >= cap || b >= cap || a > cap / b) return cap;
  return a * b;
}

Wide binomial(int n, int r) {
  Wide out = 1;
  for (int i = 1; i <= r; ++i) out = out * static_cast<Wide>(n - r + i) / static_cast<Wide>(i);
  return out;
}

// Spreads the bits of `index` over the processes other than `self`.
ProcessSet expand_subset(std::uint32_t index, int self, int n) {
  ProcessSet out = 0;
  for (int q = 0, b = 0; q < n; ++q) {
    if (q == self) continue;
    if ((index >> b) & 1u) out |= bit(q);
    ++b;
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------- enumeration

std::uint64_t count_patterns(int n, int t, int horizon, std::optional<int> per_round_cap) {
  const int cap = per_round_cap.value_or(n);
  const Wide subsets = Wide{1} << (n - 1);
  Wide total = 0;
  for (int f = 0; f <= t; ++f) {
    // Labeled assignments of f processes to rounds 1..horizon with at most
    // `cap` processes per round.
    std::vector<Wide> ways(static_cast<std::size_t>(f + 1), 0);
    ways[0] = 1;
    for (int r = 0; r < horizon; ++r) {
      std::vector<Wide> next(static_cast<std::size_t>(f + 1), 0);
      for (int j = 0; j <= f; ++j)
        for (int c = 0; c <= std::min(cap, j); ++c)
          next[static_cast<std::size_t>(j)] += binomial(j, c) * ways[static_cast<std::size_t>(j - c)];
      ways = std::move(next);
    }
    Wide term = sat_mul(binomial(n, f), ways[static_cast<std::size_t>(f)]);
    for (int i = 0; i < f; ++i) term = sat_mul(term, subsets);
    total += term;
    if (total > Wide{kSaturated}) return kSaturated;
  }
  return saturate(total);
}

bool is_canonical_values(const std::vector<Value>& values, const SystemParams& params) {
  ValueSet used = 0;
  for (Value v : values) used |= bit(v);
  const ValueSet low_mask = all_processes(params.k);
  const ValueSet low = used & low_mask;
  const ValueSet high = used >> params.k;
  auto is_prefix = [](ValueSet s) { return (s & (s + 1)) == 0; };
  return is_prefix(low) && is_prefix(high);
}

std::string EnumSpec::describe() const {
  std::ostringstream out;
  out << "n=" << params.n << " t=" << params.t << " k=" << params.k << " d=" << params.d_vals
      << " horizon=" << params.horizon << " cap=";
  if (per_round_cap) out << *per_round_cap; else out << "none";
  out << " values=" << (filter == ValueFilter::kAll ? "all" : filter == ValueFilter::kCanonical ? "canonical" : "explicit");
  out << " max=";
  if (max_adversaries) out << *max_adversaries; else out << "none";
  out << " seed=" << seed;
  return out.str();
}

Enumerator::Enumerator(EnumSpec spec) : spec_(std::move(spec)) {
  const SystemParams& p = spec_.params;
  p.validate();
  if (spec_.per_round_cap && *spec_.per_round_cap < 0) throw AdversaryError("per-round cap must be >= 0");
  pattern_count_ = count_patterns(p.n, p.t, p.horizon, spec_.per_round_cap);

  if (spec_.filter == ValueFilter::kExplicit) {
    for (const auto& v : spec_.explicit_values) {
      Adversary(p, v, FailurePattern(p.n));  // validates the vector
      value_vectors_.push_back(v);
    }
  } else {
    Wide all = 1;
    for (int i = 0; i < p.n; ++i) all = sat_mul(all, static_cast<Wide>(p.d_vals + 1));
    if (all > Wide{spec_.ceiling}) throw AdversaryError("value space exceeds the enumeration ceiling");
    std::vector<Value> v(static_cast<std::size_t>(p.n), 0);
    while (true) {
      if (spec_.filter == ValueFilter::kAll || is_canonical_values(v, p)) value_vectors_.push_back(v);
      int pos = p.n - 1;
      while (pos >= 0 && v[static_cast<std::size_t>(pos)] == p.d_vals) v[static_cast<std::size_t>(pos--)] = 0;
      if (pos < 0) break;
      ++v[static_cast<std::size_t>(pos)];
    }
  }
  const std::uint64_t total = exact_count();
  if (spec_.max_adversaries && total > *spec_.max_adversaries) {
    sampled_ = true;
  } else if (total > spec_.ceiling) {
    throw AdversaryError("adversary space of size " + std::to_string(total) + " exceeds the ceiling " +
                         std::to_string(spec_.ceiling) + "; set a sampling cap or raise the ceiling");
  }
}

std::uint64_t Enumerator::exact_count() const {
  return saturate(sat_mul(pattern_count_, value_vectors_.size()));
}

std::uint64_t Enumerator::stream_size() const { return sampled_ ? *spec_.max_adversaries : exact_count(); }

void Enumerator::for_each_pattern(const std::function<bool(const FailurePattern&)>& visit) const {
  const SystemParams& p = spec_.params;
  const int n = p.n;
  const int cap = spec_.per_round_cap.value_or(n);
  const std::uint32_t subsets = 1u << (n - 1);
  FailurePattern pattern(n);
  std::vector<int> faulty;
  std::vector<int> rounds;
  std::vector<int> per_round(static_cast<std::size_t>(p.horizon + 2), 0);
  bool stop = false;

  // Delivery subsets, lexicographic over the faulty processes.
  std::function<void(std::size_t)> deliveries = [&](std::size_t idx) {
    if (stop) return;
    if (idx == faulty.size()) {
      if (!visit(pattern)) stop = true;
      return;
    }
    const int proc = faulty[idx];
    for (std::uint32_t s = 0; s < subsets && !stop; ++s) {
      pattern.set_crash(proc, CrashSpec{rounds[idx], expand_subset(s, proc, n)});
      deliveries(idx + 1);
    }
  };
  std::function<void(std::size_t)> assign_rounds = [&](std::size_t idx) {
    if (stop) return;
    if (idx == faulty.size()) {
      deliveries(0);
      return;
    }
    for (int r = 1; r <= p.horizon && !stop; ++r) {
      if (per_round[static_cast<std::size_t>(r)] >= cap) continue;
      ++per_round[static_cast<std::size_t>(r)];
      rounds[idx] = r;
      assign_rounds(idx + 1);
      --per_round[static_cast<std::size_t>(r)];
    }
  };
  for (ProcessSet set = 0; set <= all_processes(n) && !stop; ++set) {
    if (popcount(set) > p.t) continue;
    pattern = FailurePattern(n);
    faulty = to_ids(set);
    rounds.assign(faulty.size(), 1);
    assign_rounds(0);
  }
}

void Enumerator::for_each(const std::function<bool(const Adversary&)>& visit) const {
  const SystemParams& p = spec_.params;
  if (!sampled_) {
    for_each_pattern([&](const FailurePattern& pattern) {
      for (const auto& values : value_vectors_)
        if (!visit(Adversary(p, values, pattern))) return false;
      return true;
    });
    return;
  }
  // Rejection sampling: every process independently picks "correct" or one
  // (round, delivery set); draws outside the failure bound or the cap are
  // redrawn, which keeps the distribution uniform over valid patterns.
  std::mt19937_64 rng(spec_.seed);
  const int n = p.n;
  const std::uint64_t subsets = std::uint64_t{1} << (n - 1);
  std::uniform_int_distribution<std::uint64_t> option(0, static_cast<std::uint64_t>(p.horizon) * subsets);
  std::uniform_int_distribution<std::size_t> pick_values(0, value_vectors_.size() - 1);
  const int cap = spec_.per_round_cap.value_or(n);
  for (std::uint64_t produced = 0; produced < *spec_.max_adversaries;) {
    FailurePattern pattern(n);
    std::vector<int> per_round(static_cast<std::size_t>(p.horizon + 1), 0);
    int faulty = 0;
    bool valid = true;
    for (int q = 0; q < n; ++q) {
      const std::uint64_t o = option(rng);
      if (o == 0) continue;
      const int round = static_cast<int>((o - 1) / subsets) + 1;
      const auto subset = static_cast<std::uint32_t>((o - 1) % subsets);
      pattern.set_crash(q, CrashSpec{round, expand_subset(subset, q, n)});
      ++faulty;
      if (++per_round[static_cast<std::size_t>(round)] > cap) valid = false;
    }
    if (!valid || faulty > p.t) continue;
    ++produced;
    if (!visit(Adversary(p, value_vectors_[pick_values(rng)], pattern))) return;
  }
}

// ------------------------------------------------------ hidden channel runs

std::vector<std::vector<ProcessId>> choose_chains(const View& view, int c) {
  if (c < 0) throw AdversaryError("channel count must be >= 0");
  const HiddenCapacity hc = hidden_capacity(view);
  if (hc.hc < c)
    throw AdversaryError("hidden capacity " + std::to_string(hc.hc) + " at " + to_string(view.owner()) +
                         " is below " + std::to_string(c));
  const int m = view.time();
  std::vector<std::vector<ProcessId>> chains(static_cast<std::size_t>(c), std::vector<ProcessId>(static_cast<std::size_t>(m + 1)));
  for (int l = 0; l <= m; ++l) {
    const std::vector<ProcessId> ids = to_ids(hc.hidden[static_cast<std::size_t>(l)]);
    for (int b = 0; b < c; ++b) chains[static_cast<std::size_t>(b)][static_cast<std::size_t>(l)] = ids[static_cast<std::size_t>(b)];
  }
  return chains;
}

HiddenChannels build_hidden_channels_run(const View& view, const std::vector<Value>& values) {
  const Adversary& original = view.graph().adversary();
  const SystemParams& params = original.params;
  const int c = static_cast<int>(values.size());
  for (Value v : values)
    if (v < 0 || v > params.d_vals) throw AdversaryError("channel value out of range");
  const int m = view.time();
  const ProcessId i = view.owner().process;

  HiddenChannels out{original, view.owner(), values, choose_chains(view, c), {}};
  if (c == 0) {
    out.check = verify_hidden_channels(view, out);
    return out;
  }
  std::vector<Value> vals = original.values;
  FailurePattern f = original.pattern;
  ProcessSet previous_level = 0;  // chain processes at level l-1
  for (int b = 0; b < c; ++b) {
    const auto& chain = out.chains[static_cast<std::size_t>(b)];
    vals[static_cast<std::size_t>(chain[0])] = values[static_cast<std::size_t>(b)];
    for (int l = 0; l < m; ++l)
      f.set_crash(chain[static_cast<std::size_t>(l)], CrashSpec{l + 1, bit(chain[static_cast<std::size_t>(l + 1)])});
    f.set_crash(chain[static_cast<std::size_t>(m)], std::nullopt);
  }
  // At its own level every chain node hears what i hears (plus i and its
  // chain predecessor), so it learns nothing i does not know at that level.
  for (int l = 1; l <= m; ++l) {
    previous_level = 0;
    for (int b = 0; b < c; ++b) previous_level |= bit(out.chains[static_cast<std::size_t>(b)][static_cast<std::size_t>(l - 1)]);
    for (int b = 0; b < c; ++b) {
      const ProcessId x = out.chains[static_cast<std::size_t>(b)][static_cast<std::size_t>(l)];
      for (int j = 0; j < params.n; ++j) {
        if (j == x || j == i || contains(previous_level, j)) continue;
        const auto& spec = f.crash(j);
        if (!spec || spec->round != l) continue;
        CrashSpec next = *spec;
        next.delivers = contains(next.delivers, i) ? (next.delivers | bit(x)) : (next.delivers & ~bit(x));
        f.set_crash(j, next);
      }
    }
  }
  try {
    out.adversary = Adversary(params, std::move(vals), std::move(f));
  } catch (const ModelError& e) {
    throw AdversaryError(std::string("hidden channel construction produced an invalid run: ") + e.what());
  }
  out.check = verify_hidden_channels(view, out);
  if (!out.check.ok()) throw AdversaryError("hidden channel construction failed verification: " + out.check.detail);
  return out;
}

ChannelCheck verify_hidden_channels(const View& original, const HiddenChannels& channels) {
  ChannelCheck check;
  const int m = original.time();
  const ProcessId i = original.owner().process;
  const auto graph = std::make_shared<const CommGraph>(channels.adversary, m);
  if (!graph->active(original.owner())) {
    check.view_equal = false;
    check.detail = "observer inactive in the constructed run";
    return check;
  }
  check.view_equal = View(graph, original.owner()) == original;
  if (!check.view_equal) check.detail = "view of " + to_string(original.owner()) + " changed";
  const int c = static_cast<int>(channels.values.size());
  for (int b = 0; b < c; ++b) {
    const Value vb = channels.values[static_cast<std::size_t>(b)];
    for (int l = 0; l <= m; ++l) {
      const NodeId node{channels.chains[static_cast<std::size_t>(b)][static_cast<std::size_t>(l)], l};
      if (!graph->active(node)) {
        check.carries_value = check.values_bounded = check.mutually_hidden = false;
        check.detail = "chain node " + to_string(node) + " inactive";
        return check;
      }
      const ValueSet vals = graph->vals(node);
      if (!contains(vals, vb)) {
        check.carries_value = false;
        check.detail = "chain node " + to_string(node) + " lacks its value";
      }
      if ((vals & ~bit(vb) & ~graph->vals(NodeId{i, l})) != 0) {
        check.values_bounded = false;
        check.detail = "chain node " + to_string(node) + " knows values unknown to the observer";
      }
      const View view(graph, node);
      if (hidden_capacity(view).hc < c - 1) check.mutually_hidden = false;
      for (int b2 = 0; b2 < c; ++b2) {
        if (b2 == b) continue;
        for (int l2 = 0; l2 <= l; ++l2) {
          const NodeId other{channels.chains[static_cast<std::size_t>(b2)][static_cast<std::size_t>(l2)], l2};
          if (classify(view, other) != NodeStatus::kHidden) {
            check.mutually_hidden = false;
            check.detail = to_string(other) + " is not hidden from " + to_string(node);
          }
        }
      }
    }
  }
  return check;
}

// ------------------------------------------------------------ run surgery

std::optional<std::string> surgery_precondition_failure(const RunAnalysis& run, ProcessId i, int m,
                                                        const std::vector<ProcessId>& targets) {
  const SystemParams& p = run.adversary().params;
  const int k = p.k;
  if (m < 1) return "surgery needs m >= 1";
  if (m > run.horizon()) return "time beyond the analysed horizon";
  const NodeKnowledge* now = run.knowledge(NodeId{i, m});
  if (now == nullptr) return "observer inactive at m";
  const NodeKnowledge* before = run.knowledge(NodeId{i, m - 1});
  if (static_cast<int>(targets.size()) != k) return "need exactly k targets";
  ProcessSet seen_targets = 0;
  for (ProcessId j : targets) {
    if (j < 0 || j >= run.n() || j == i || contains(seen_targets, j)) return "targets must be distinct processes other than i";
    seen_targets |= bit(j);
  }
  if (!now->summary.low || before->summary.low) return "observer is not low for the first time at m";
  if (popcount(now->summary.vals & all_processes(k)) != 1) return "observer has not seen exactly one low value";
  if (now->summary.hc < k - 1) return "observer hidden capacity below k-1";
  const View view = run.view(NodeId{i, m});
  for (ProcessId j : targets) {
    const NodeKnowledge* prev = run.knowledge(NodeId{j, m - 1});
    if (prev == nullptr || prev->summary.low) return "target " + std::to_string(j) + " is not high at m-1";
    if (classify(view, NodeId{j, m}) != NodeStatus::kHidden) return "target " + std::to_string(j) + " is not hidden at m";
    for (int l = 0; l < m; ++l)
      if (run.knowledge(NodeId{j, l})->summary.hc < k)
        return "target " + std::to_string(j) + " already decides under optmink before m";
  }
  return std::nullopt;
}

SurgeryResult surgery_collective_low(const Adversary& adversary, ProcessId i, int m,
                                     const std::vector<ProcessId>& targets) {
  const SystemParams& p = adversary.params;
  const int k = p.k;
  const RunAnalysis run(adversary, std::max(m, 0));
  if (auto why = surgery_precondition_failure(run, i, m, targets)) throw AdversaryError("surgery precondition: " + *why);

  const View view = run.view(NodeId{i, m});
  const Value v = std::countr_zero(run.knowledge(NodeId{i, m})->summary.vals);
  std::vector<Value> others;
  for (Value w = 0; w < k; ++w)
    if (w != v) others.push_back(w);

  SurgeryResult out{adversary, build_hidden_channels_run(view, others), v, {}, false, false, false, false};
  const Adversary& rp = out.channels.adversary;
  const CommGraph mid(rp, m);

  // Holder of every low value at time m-1: the chain processes for the
  // values i has not seen, and i's lowest-id informant for v.
  std::vector<ProcessId> holder(static_cast<std::size_t>(k), -1);
  for (std::size_t b = 0; b < others.size(); ++b)
    holder[static_cast<std::size_t>(others[b])] = out.channels.chains[b][static_cast<std::size_t>(m - 1)];
  for (ProcessSet s = mid.in_senders(NodeId{i, m}); s; s &= s - 1) {
    const int x = std::countr_zero(s);
    if (contains(mid.vals(NodeId{x, m - 1}), v)) {
      holder[static_cast<std::size_t>(v)] = x;
      break;
    }
  }
  if (holder[static_cast<std::size_t>(v)] < 0) throw AdversaryError("no informant of the low value found");

  FailurePattern f = rp.pattern;
  f.set_crash(i, std::nullopt);
  for (ProcessId j : targets) f.set_crash(j, std::nullopt);
  const ProcessSet everyone = all_processes(p.n);
  const ValueSet low_mask = all_processes(k);

  // Changes k..1: target b must hear exactly the low values {k-b, ..., k-1}.
  for (int b = k; b >= 1; --b) {
    const ProcessId j = targets[static_cast<std::size_t>(b - 1)];
    const ValueSet excluded = all_processes(k - b);
    ProcessSet required = 0;
    for (Value w = k - b; w < k; ++w) required |= bit(holder[static_cast<std::size_t>(w)]);
    for (int x = 0; x < p.n; ++x) {
      if (x == j || !mid.active(NodeId{x, m - 1})) continue;
      const auto& spec = f.crash(x);
      if (contains(required, x)) {
        if (spec && spec->round == m) f.set_crash(x, CrashSpec{m, spec->delivers | bit(j)});
        continue;
      }
      if ((mid.vals(NodeId{x, m - 1}) & low_mask & excluded) == 0) continue;
      if (spec && spec->round == m)
        f.set_crash(x, CrashSpec{m, spec->delivers & ~bit(j)});
      else
        f.set_crash(x, CrashSpec{m, everyone & ~bit(x) & ~bit(j)});
    }
  }
  try {
    out.adversary = Adversary(p, rp.values, f);
  } catch (const ModelError& e) {
    throw AdversaryError(std::string("surgery exceeds the failure bound: ") + e.what());
  }

  const RunAnalysis after(out.adversary, m);
  const auto rule = make_protocol("optmink");
  const DecisionVector decisions = decide(*rule, after);
  ValueSet decided = 0;
  out.collective = true;
  for (ProcessId j : targets) {
    const auto& d = decisions[static_cast<std::size_t>(j)];
    out.target_decisions.push_back(d);
    if (!d || d->time != m) out.collective = false;
    if (d) decided |= bit(d->value);
  }
  out.collective = out.collective && decided == low_mask;
  out.view_unchanged = after.view(NodeId{i, m}) == view;
  out.prefix_unchanged = true;
  const auto mid_ptr = std::make_shared<const CommGraph>(rp, m);
  for (int l = 0; l < m; ++l)
    for (int x = 0; x < p.n; ++x) {
      const NodeId node{x, l};
      if (mid_ptr->active(node) != after.graph().active(node)) {
        out.prefix_unchanged = false;
        continue;
      }
      if (mid_ptr->active(node) && !(View(mid_ptr, node) == after.view(node))) out.prefix_unchanged = false;
    }
  const auto& di = decisions[static_cast<std::size_t>(i)];
  out.observer_decides_low = di && di->value == v && di->time == m;
  return out;
}

std::vector<SurgeryInstance> find_surgery_instances(const SystemParams& params, int max_time, int wanted,
                                                    std::uint64_t seed, std::uint64_t budget) {
  std::vector<SurgeryInstance> found;
  std::mt19937_64 rng(seed);
  const int n = params.n;
  const int k = params.k;
  std::uniform_int_distribution<int> value(0, params.d_vals);
  std::uniform_int_distribution<int> high_value(k, params.d_vals);
  std::uniform_int_distribution<int> round(1, max_time);
  std::uniform_int_distribution<std::uint32_t> subset(0, all_processes(n));
  std::uniform_int_distribution<int> faulty_count(1, params.t);
  std::bernoulli_distribution mostly_high(0.7);
  for (std::uint64_t trial = 0; trial < budget && static_cast<int>(found.size()) < wanted; ++trial) {
    std::vector<Value> values(static_cast<std::size_t>(n));
    for (auto& x : values) x = mostly_high(rng) ? high_value(rng) : value(rng);
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q) order[static_cast<std::size_t>(q)] = q;
    std::shuffle(order.begin(), order.end(), rng);
    FailurePattern f(n);
    const int faulty = std::min(faulty_count(rng), params.t);
    for (int q = 0; q < faulty; ++q) {
      const int x = order[static_cast<std::size_t>(q)];
      f.set_crash(x, CrashSpec{round(rng), subset(rng) & all_processes(n) & ~bit(x)});
    }
    const Adversary a(params, values, f);
    const RunAnalysis run(a, max_time);
    bool accepted = false;
    for (int m = 1; m <= max_time && !accepted; ++m)
      for (int i = 0; i < n && !accepted; ++i) {
        const NodeKnowledge* now = run.knowledge(NodeId{i, m});
        if (now == nullptr || !now->summary.low) continue;
        std::vector<ProcessId> targets;
        for (int j = 0; j < n && static_cast<int>(targets.size()) < k; ++j) {
          if (j == i) continue;
          const View view = run.view(NodeId{i, m});
          const NodeKnowledge* prev = run.knowledge(NodeId{j, m - 1});
          if (prev == nullptr || prev->summary.low || classify(view, NodeId{j, m}) != NodeStatus::kHidden) continue;
          bool undecided = true;
          for (int l = 0; l < m; ++l) undecided = undecided && run.knowledge(NodeId{j, l})->summary.hc >= k;
          if (undecided) targets.push_back(j);
        }
        if (static_cast<int>(targets.size()) < k) continue;
        if (surgery_precondition_failure(run, i, m, targets)) continue;
        try {
          const SurgeryResult r = surgery_collective_low(a, i, m, targets);
          if (!r.ok()) continue;
        } catch (const AdversaryError&) {
          continue;
        }
        found.push_back(SurgeryInstance{a, i, m, targets});
        accepted = true;
      }
  }
  return found;
}

// ------------------------------------------------------- margin scenarios

bool is_margin_witness(const Adversary& adversary, const std::string& baseline, int target_time, int horizon) {
  const RunAnalysis run(adversary, horizon);
  const DecisionVector up = decide(*make_protocol("upmink"), run);
  const DecisionVector base = decide(*make_protocol(baseline), run);
  for (int p = 0; p < adversary.n(); ++p) {
    if (is_active(adversary.pattern, p, target_time)) {
      const auto& d = up[static_cast<std::size_t>(p)];
      if (!d || d->time > target_time) return false;
    }
    if (!adversary.pattern.is_faulty(p)) {
      const auto& d = base[static_cast<std::size_t>(p)];
      if (d && d->time <= target_time) return false;
    }
  }
  return true;
}

MarginSearch find_margin_scenario(const SystemParams& params, const std::string& baseline, int target_time,
                                  std::uint64_t seed, std::uint64_t budget) {
  if (baseline != "earlystop" && baseline != "floodmin") throw AdversaryError("baseline must be earlystop or floodmin");
  if (target_time < 0) throw AdversaryError("target time must be >= 0");
  const int horizon = std::max(params.t / params.k + 2, target_time + 1);
  MarginSearch out;
  out.seed = seed;
  out.budget = budget;
  auto finish = [&](const Adversary& a) {
    out.status = SearchStatus::kFound;
    out.witness = a;
    const RunAnalysis run(a, horizon);
    const DecisionVector up = decide(*make_protocol("upmink"), run);
    const DecisionVector base = decide(*make_protocol(baseline), run);
    out.baseline_first_correct = horizon + 1;
    for (int p = 0; p < a.n(); ++p) {
      const auto& d = up[static_cast<std::size_t>(p)];
      if (is_active(a.pattern, p, target_time) && d) out.upmink_last_decision = std::max(out.upmink_last_decision, d->time);
      const auto& e = base[static_cast<std::size_t>(p)];
      if (!a.pattern.is_faulty(p)) out.baseline_first_correct = std::min(out.baseline_first_correct, e ? e->time : horizon + 1);
    }
    return out;
  };

  // Small spaces are searched exhaustively, so "none" is a proof.
  EnumSpec spec;
  spec.params = params;
  spec.params.horizon = horizon;
  spec.ceiling = budget;
  Wide values = 1;
  for (int i = 0; i < params.n; ++i) values = sat_mul(values, static_cast<Wide>(params.d_vals + 1));
  const Wide space = sat_mul(count_patterns(params.n, params.t, horizon, std::nullopt), values);
  if (space <= Wide{budget}) {
    out.exhaustive = true;
    std::optional<Adversary> hit;
    Enumerator(spec).for_each([&](const Adversary& a) {
      ++out.tried;
      if (!is_margin_witness(a, baseline, target_time, horizon)) return true;
      hit = a;
      return false;
    });
    if (hit) return finish(*hit);
    out.status = SearchStatus::kNone;
    return out;
  }

  // Guided phase: k fresh crashes in each of the first rounds, each crasher
  // reaching only other faulty processes, so correct processes discover k
  // failures per round while information flows along hidden chains.
  std::mt19937_64 rng(seed);
  const int n = params.n;
  const int k = params.k;
  std::uniform_int_distribution<int> value(0, params.d_vals);
  std::uniform_int_distribution<std::uint32_t> subset(0, all_processes(n));
  std::uniform_int_distribution<int> late_round(1, horizon);
  std::bernoulli_distribution all_high(0.5);
  const std::uint64_t guided_budget = budget / 2;
  while (out.tried < budget) {
    ++out.tried;
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q) order[static_cast<std::size_t>(q)] = q;
    std::shuffle(order.begin(), order.end(), rng);
    const ProcessSet faulty_set = to_set(std::vector<int>(order.begin(), order.begin() + params.t));
    FailurePattern f(n);
    if (out.tried <= guided_budget) {
      int next = 0;
      for (int r = 1; next < params.t; ++r) {
        for (int c = 0; c < k && next < params.t; ++c, ++next) {
          const int x = order[static_cast<std::size_t>(next)];
          const int rr = std::min(r, horizon);
          f.set_crash(x, CrashSpec{rr, subset(rng) & faulty_set & ~bit(x)});
        }
      }
    } else {
      for (int c = 0; c < params.t; ++c) {
        const int x = order[static_cast<std::size_t>(c)];
        f.set_crash(x, CrashSpec{late_round(rng), subset(rng) & all_processes(n) & ~bit(x)});
      }
    }
    std::vector<Value> vals(static_cast<std::size_t>(n));
    const bool high = all_high(rng);
    for (auto& x : vals) x = high ? k : value(rng);
    const Adversary a(params, vals, f);
    if (is_margin_witness(a, baseline, target_time, horizon)) return finish(a);
  }
  out.status = SearchStatus::kBudgetExhausted;
  return out;
}

// ------------------------------------------------------- figure scenarios

std::vector<std::string> scenario_names() { return {"hidden-path", "hidden-capacity", "collective-low"}; }

Scenario make_scenario(const std::string& name) {
  if (name == "hidden-path") {
    // 0 holds value 0 and reaches only 1 in round 1; 1 reaches only 2 in
    // round 2. Observer 3 cannot rule out a 0 at time 2.
    const SystemParams p = SystemParams::make(4, 2, 1);
    return {name, "a value kept from the observer by a chain of crashing processes",
            make_adversary(p, {0, 1, 1, 1}, {{0, 1, {1}}, {1, 2, {2}}}), NodeId{3, 2}, {}};
  }
  if (name == "hidden-capacity") {
    // Three disjoint chains 0->3->6, 1->4->7, 2->5->8 carrying 0, 1, 2.
    const SystemParams p = SystemParams::make(10, 6, 3);
    return {name, "three disjoint hidden chains against the observer",
            make_adversary(p, {0, 1, 2, 3, 3, 3, 3, 3, 3, 3},
                           {{0, 1, {3}}, {1, 1, {4}}, {2, 1, {5}}, {3, 2, {6}}, {4, 2, {7}}, {5, 2, {8}}}),
            NodeId{9, 2}, {}};
  }
  if (name == "collective-low") {
    // i = 0 first sees the low value 0 at time 2 through 2, which heard it
    // from 1 in round 1. Processes 3-5 vanish in round 1 and 6-8 in round 2,
    // leaving capacity k-1 = 3; 9-12 are the hidden high targets.
    SystemParams p = SystemParams::make(13, 8, 4, 4);
    std::vector<Value> vals(13, 4);
    vals[1] = 0;
    return {name, "first-time low observer with four hidden high neighbours",
            make_adversary(p, vals,
                           {{1, 1, {2}}, {3, 1, {}}, {4, 1, {}}, {5, 1, {}}, {6, 2, {}}, {7, 2, {}}, {8, 2, {}}}),
            NodeId{0, 2}, {9, 10, 11, 12}};
  }
  throw AdversaryError("unknown scenario '" + name + "'");
}

}  // namespace kset
