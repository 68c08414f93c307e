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

// Compact transport. Instead of forwarding whole views, every process keeps
// a small knowledge state and broadcasts only what changed since its last
// message. Receivers keep a replica of each sender's state, which stays
// exact because a sender that reaches a receiver in round r reached it in
// every earlier round as well.

#include <algorithm>
#include <array>

#include "kset/engine.hpp"

namespace kset {

namespace {

constexpr int kInf = kNever;

struct State {
  std::array<int, kMaxProcesses> seen;   // latest time at which the process is seen, -1 if never
  std::array<int, kMaxProcesses> crash;  // earliest round with evidence of a crash, kInf if none
  std::array<int, kMaxProcesses> value;  // initial value if known, -1 otherwise

  State() {
    seen.fill(-1);
    crash.fill(kInf);
    value.fill(-1);
  }

  ValueSet vals(int n) const {
    ValueSet out = 0;
    for (int x = 0; x < n; ++x)
      if (value[static_cast<std::size_t>(x)] >= 0) out |= bit(value[static_cast<std::size_t>(x)]);
    return out;
  }
};

struct Message {
  enum Kind { kValue, kFailedAt, kAliveAt } kind;
  int subject;
  int payload;
};

// Messages sent in `round` by `sender`, moving a replica from `before` (its
// state one step earlier) to `after`.
std::vector<Message> diff(const State& before, const State& after, int sender, int round, int n) {
  std::vector<Message> out;
  for (int x = 0; x < n; ++x) {
    const auto i = static_cast<std::size_t>(x);
    if (after.crash[i] < before.crash[i]) out.push_back({Message::kFailedAt, x, after.crash[i]});
    if (x != sender) {
      if (after.crash[i] == kInf) {
        if (after.seen[i] != round - 2) throw EngineError("compact transport: default seen rule violated");
      } else if (after.seen[i] > before.seen[i]) {
        out.push_back({Message::kAliveAt, x, after.seen[i]});
      }
    }
    if (before.value[i] < 0 && after.value[i] >= 0) out.push_back({Message::kValue, x, after.value[i]});
  }
  return out;
}

void apply(State& replica, const std::vector<Message>& msgs, int sender, int round, int n) {
  const State before = replica;
  for (const Message& m : msgs)
    if (m.kind == Message::kFailedAt) replica.crash[static_cast<std::size_t>(m.subject)] = m.payload;
  for (int x = 0; x < n; ++x) {
    const auto i = static_cast<std::size_t>(x);
    if (x == sender)
      replica.seen[i] = round - 1;
    else if (replica.crash[i] == kInf)
      replica.seen[i] = round - 2;
    else
      replica.seen[i] = before.seen[i];
  }
  for (const Message& m : msgs) {
    if (m.kind == Message::kAliveAt) replica.seen[static_cast<std::size_t>(m.subject)] = m.payload;
    if (m.kind == Message::kValue) replica.value[static_cast<std::size_t>(m.subject)] = m.payload;
  }
}

}  // namespace

CompactRun execute_compact(const DecisionRule& rule, const Adversary& adversary, int horizon) {
  check_horizon(rule, adversary.params, horizon);
  const int n = adversary.n();
  const auto un = static_cast<std::size_t>(n);
  const FailurePattern& pattern = adversary.pattern;
  const SystemParams& params = adversary.params;

  CompactRun out;
  BitAccounting& bits = out.bits;
  bits.n = n;
  bits.id_bits = ceil_log2(n);
  bits.value_bits = ceil_log2(params.d_vals + 1);
  bits.round_bits = ceil_log2(horizon + 1);
  bits.pair_bits.assign(un * un, 0);
  std::vector<int> failed_at_count(un * un, 0);
  std::vector<int> alive_at_count(un * un, 0);

  // states[m][p] is p's state at time m (meaningful only while active).
  std::vector<std::vector<State>> states(static_cast<std::size_t>(horizon + 1), std::vector<State>(un));
  std::vector<State> replica(un * un);  // [receiver * n + sender]
  std::vector<ValueSet> replica_vals_prev(un * un, 0);
  out.knowledge.assign(static_cast<std::size_t>(horizon + 1) * un, std::nullopt);

  for (int p = 0; p < n; ++p) {
    State& s = states[0][static_cast<std::size_t>(p)];
    s.seen[static_cast<std::size_t>(p)] = 0;
    s.value[static_cast<std::size_t>(p)] = adversary.values[static_cast<std::size_t>(p)];
  }

  auto knowledge_of = [&](NodeId node, const State& st, ProcessSet senders,
                          const NodeKnowledge* prev) {
    NodeKnowledge k;
    KnowledgeSummary& sum = k.summary;
    sum.observer = node;
    sum.vals = st.vals(n);
    sum.minval = std::countr_zero(sum.vals);
    sum.low = sum.minval < params.k;
    sum.hc = n;
    for (int l = 0; l <= node.time; ++l) {
      ProcessSet hidden = 0;
      for (int x = 0; x < n; ++x) {
        const auto i = static_cast<std::size_t>(x);
        if (st.seen[i] < l && l < st.crash[i]) hidden |= bit(x);
      }
      sum.hidden[static_cast<std::size_t>(l)] = hidden;
      sum.hc = std::min(sum.hc, popcount(hidden));
    }
    for (int x = 0; x < n; ++x) sum.known_failures += st.crash[static_cast<std::size_t>(x)] < kInf ? 1 : 0;
    const Value v = sum.minval;
    if (node.time > 0 && prev != nullptr && prev->summary.knows(v)) {
      k.minval_persists = true;
    } else {
      int holders = 0;
      if (node.time > 0)
        for (ProcessSet s = senders; s; s &= s - 1) {
          const auto from = static_cast<std::size_t>(std::countr_zero(s));
          holders += contains(replica_vals_prev[static_cast<std::size_t>(node.process) * un + from], v) ? 1 : 0;
        }
      k.minval_persists = holders >= params.t - sum.known_failures;
    }
    k.new_failures = sum.known_failures - (prev ? prev->summary.known_failures : 0);
    return k;
  };

  for (int p = 0; p < n; ++p)
    out.knowledge[static_cast<std::size_t>(p)] = knowledge_of(NodeId{p, 0}, states[0][static_cast<std::size_t>(p)], 0, nullptr);

  const State empty;
  for (int round = 1; round <= horizon; ++round) {
    // Sending phase: each process active at round-1 broadcasts its delta.
    std::vector<std::vector<Message>> outbox(un);
    for (int s = 0; s < n; ++s) {
      if (!is_active(pattern, s, round - 1)) continue;
      const State& before = round >= 2 ? states[static_cast<std::size_t>(round - 2)][static_cast<std::size_t>(s)] : empty;
      outbox[static_cast<std::size_t>(s)] = diff(before, states[static_cast<std::size_t>(round - 1)][static_cast<std::size_t>(s)], s, round, n);
      std::int64_t cost = 0;
      for (const Message& m : outbox[static_cast<std::size_t>(s)]) {
        const auto slot = static_cast<std::size_t>(s) * un + static_cast<std::size_t>(m.subject);
        switch (m.kind) {
          case Message::kValue: cost += bits.id_bits + bits.value_bits; break;
          case Message::kFailedAt: cost += bits.id_bits + bits.round_bits; ++failed_at_count[slot]; break;
          case Message::kAliveAt: cost += bits.id_bits + bits.round_bits; ++alive_at_count[slot]; break;
        }
      }
      const bool filler = outbox[static_cast<std::size_t>(s)].empty();
      if (filler) cost = 1;
      for (int r = 0; r < n; ++r) {
        if (r == s || !edge_exists(pattern, s, r, round)) continue;
        bits.pair_bits[static_cast<std::size_t>(s) * un + static_cast<std::size_t>(r)] += cost;
        if (filler) {
          ++bits.im_alive_messages;
          continue;
        }
        for (const Message& m : outbox[static_cast<std::size_t>(s)]) {
          if (m.kind == Message::kValue) ++bits.value_messages;
          if (m.kind == Message::kFailedAt) ++bits.failed_at_messages;
          if (m.kind == Message::kAliveAt) ++bits.alive_at_messages;
        }
      }
    }
    // Receiving phase.
    for (int p = 0; p < n; ++p) {
      if (!is_active(pattern, p, round)) continue;
      State next = states[static_cast<std::size_t>(round - 1)][static_cast<std::size_t>(p)];
      ProcessSet senders = 0;
      for (int s = 0; s < n; ++s) {
        if (s == p) continue;
        const auto slot = static_cast<std::size_t>(p) * un + static_cast<std::size_t>(s);
        if (!edge_exists(pattern, s, p, round)) {
          auto& c = next.crash[static_cast<std::size_t>(s)];
          c = std::min(c, round);
          continue;
        }
        senders |= bit(s);
        apply(replica[slot], outbox[static_cast<std::size_t>(s)], s, round, n);
        replica_vals_prev[slot] = replica[slot].vals(n);
        for (int x = 0; x < n; ++x) {
          const auto i = static_cast<std::size_t>(x);
          next.seen[i] = std::max(next.seen[i], replica[slot].seen[i]);
          next.crash[i] = std::min(next.crash[i], replica[slot].crash[i]);
          if (next.value[i] < 0) next.value[i] = replica[slot].value[i];
        }
      }
      next.seen[static_cast<std::size_t>(p)] = round;
      states[static_cast<std::size_t>(round)][static_cast<std::size_t>(p)] = next;
      const auto& prev = out.knowledge[static_cast<std::size_t>(round - 1) * un + static_cast<std::size_t>(p)];
      out.knowledge[static_cast<std::size_t>(round) * un + static_cast<std::size_t>(p)] =
          knowledge_of(NodeId{p, round}, next, senders, prev ? &*prev : nullptr);
    }
  }

  for (std::size_t i = 0; i < un * un; ++i) {
    bits.max_failed_at_per_subject = std::max(bits.max_failed_at_per_subject, failed_at_count[i]);
    bits.max_alive_at_per_subject = std::max(bits.max_alive_at_per_subject, alive_at_count[i]);
  }

  out.trace = run_rule(rule, adversary, horizon, [&](NodeId node) -> const NodeKnowledge* {
    const auto& slot = out.knowledge[static_cast<std::size_t>(node.time) * un + static_cast<std::size_t>(node.process)];
    return slot ? &*slot : nullptr;
  });
  return out;
}

}  // namespace kset
