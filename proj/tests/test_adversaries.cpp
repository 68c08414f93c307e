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

#include <map>
#include <set>

#include "doctest.h"
#include "kset/adversaries.hpp"
#include "kset/knowledge.hpp"

using namespace kset;

namespace {

// Counts patterns by brute force over per-process options, independently of
// the enumerator's recursion.
std::uint64_t brute_force_patterns(int n, int t, int horizon, std::optional<int> cap) {
  const int options = 1 + horizon * (1 << (n - 1));
  std::uint64_t total = 0;
  std::vector<int> choice(static_cast<std::size_t>(n), 0);
  while (true) {
    int faulty = 0;
    std::map<int, int> per_round;
    bool ok = true;
    for (int c : choice)
      if (c > 0) {
        ++faulty;
        const int r = 1 + (c - 1) / (1 << (n - 1));
        if (cap && ++per_round[r] > *cap) ok = false;
      }
    if (ok && faulty <= t) ++total;
    int pos = 0;
    while (pos < n && ++choice[static_cast<std::size_t>(pos)] == options) choice[static_cast<std::size_t>(pos++)] = 0;
    if (pos == n) break;
  }
  return total;
}

EnumSpec spec_for(int n, int t, int k, int d, int horizon) {
  EnumSpec s;
  s.params = SystemParams::make(n, t, k, d, horizon);
  return s;
}

std::string key(const Adversary& a) {
  std::string out;
  for (Value v : a.values) out += std::to_string(v) + ",";
  for (int p = 0; p < a.n(); ++p) {
    const auto& c = a.pattern.crash(p);
    out += c ? "|" + std::to_string(c->round) + ":" + std::to_string(c->delivers) : "|-";
  }
  return out;
}

}  // namespace

TEST_CASE("enumeration sizes match hand counts") {
  Enumerator a(spec_for(2, 0, 1, 1, 1));
  CHECK(a.exact_count() == 4);
  Enumerator b(spec_for(3, 1, 1, 1, 1));
  CHECK(b.pattern_count() == 13);
  CHECK(b.exact_count() == 104);
  std::uint64_t seen = 0;
  b.for_each([&](const Adversary&) { return ++seen, true; });
  CHECK(seen == 104);
}

TEST_CASE("closed-form pattern counts agree with brute force") {
  for (int n = 2; n <= 4; ++n)
    for (int t = 0; t < n; ++t)
      for (int h = 1; h <= 3; ++h)
        for (std::optional<int> cap : {std::optional<int>{}, std::optional<int>{1}, std::optional<int>{2}}) {
          if (n == 4 && h == 3 && t == 3) continue;  // brute force too slow
          CAPTURE(n);
          CAPTURE(t);
          CAPTURE(h);
          CHECK(count_patterns(n, t, h, cap) == brute_force_patterns(n, t, h, cap));
        }
}

TEST_CASE("enumeration is duplicate free, bounded and deterministic") {
  EnumSpec s = spec_for(3, 2, 1, 1, 2);
  Enumerator e(s);
  std::set<std::string> keys;
  std::vector<std::string> order;
  e.for_each([&](const Adversary& a) {
    CHECK(count_faulty(a.pattern) <= 2);
    for (int p = 0; p < 3; ++p) CHECK(a.pattern.crash_round(p) >= 1);
    order.push_back(key(a));
    keys.insert(order.back());
    return true;
  });
  CHECK(keys.size() == order.size());
  CHECK(order.size() == e.exact_count());
  CHECK(order.size() == brute_force_patterns(3, 2, 2, std::nullopt) * 8);
  std::vector<std::string> again;
  Enumerator(s).for_each([&](const Adversary& a) { return again.push_back(key(a)), true; });
  CHECK(again == order);
}

TEST_CASE("per-round cap is respected") {
  EnumSpec s = spec_for(4, 3, 2, 2, 2);
  s.per_round_cap = 1;
  s.filter = ValueFilter::kExplicit;
  s.explicit_values = {{2, 2, 2, 2}};
  Enumerator e(s);
  std::uint64_t n = 0;
  e.for_each([&](const Adversary& a) {
    std::map<int, int> rounds;
    for (int p = 0; p < 4; ++p)
      if (a.pattern.is_faulty(p)) CHECK(++rounds[a.pattern.crash_round(p)] <= 1);
    return ++n, true;
  });
  CHECK(n == brute_force_patterns(4, 3, 2, 1));
}

TEST_CASE("canonical value filter") {
  const SystemParams p = SystemParams::make(3, 1, 2, 3);
  CHECK(is_canonical_values({0, 2, 2}, p));
  CHECK(is_canonical_values({1, 0, 3, 2}, SystemParams::make(4, 1, 2, 3)));
  CHECK_FALSE(is_canonical_values({1, 2, 2}, p));
  CHECK_FALSE(is_canonical_values({0, 3, 3}, p));
  EnumSpec s = spec_for(3, 0, 2, 3, 1);
  s.filter = ValueFilter::kCanonical;
  Enumerator e(s);
  // Low part: {}, {0}, {0,1}; high part: {}, {2}, {2,3}.
  std::uint64_t brute = 0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) brute += is_canonical_values({a, b, c}, s.params) ? 1 : 0;
  CHECK(e.value_vector_count() == brute);
  CHECK(brute < 64);
}

TEST_CASE("sampling is seeded, valid and sized") {
  EnumSpec s = spec_for(5, 3, 2, 2, 3);
  s.max_adversaries = 500;
  s.seed = 99;
  s.per_round_cap = 2;
  Enumerator e(s);
  CHECK(e.sampled());
  CHECK(e.stream_size() == 500);
  std::vector<std::string> first;
  e.for_each([&](const Adversary& a) {
    CHECK(count_faulty(a.pattern) <= 3);
    std::map<int, int> rounds;
    for (int p = 0; p < 5; ++p)
      if (a.pattern.is_faulty(p)) CHECK(++rounds[a.pattern.crash_round(p)] <= 2);
    first.push_back(key(a));
    return true;
  });
  CHECK(first.size() == 500);
  std::vector<std::string> second;
  Enumerator(s).for_each([&](const Adversary& a) { return second.push_back(key(a)), true; });
  CHECK(first == second);
}

TEST_CASE("overflow guard without sampling") {
  EnumSpec s = spec_for(6, 5, 1, 1, 3);
  s.ceiling = 1000;
  CHECK_THROWS_AS(Enumerator{s}, AdversaryError);
}

TEST_CASE("hidden channels: zero channels leave the run alone") {
  const Scenario sc = make_scenario("hidden-capacity");
  const View v = *build_views(sc.adversary, 2).at(sc.focus);
  const HiddenChannels h = build_hidden_channels_run(v, {});
  CHECK(h.adversary == sc.adversary);
  CHECK(h.check.ok());
}

TEST_CASE("hidden channels on the three-chain scenario") {
  const Scenario sc = make_scenario("hidden-capacity");
  const View v = *build_views(sc.adversary, 2).at(sc.focus);
  CHECK(hidden_capacity(v).hc == 3);
  const HiddenChannels h = build_hidden_channels_run(v, {2, 0, 1});
  CHECK(h.check.ok());
  CHECK(h.chains.size() == 3);
  CHECK(count_faulty(h.adversary.pattern) <= count_faulty(sc.adversary.pattern));
  CHECK_THROWS_AS(build_hidden_channels_run(v, {0, 1, 2, 3}), AdversaryError);
}

TEST_CASE("hidden channels: one chain at time 1") {
  const SystemParams p = SystemParams::make(4, 2, 1);
  const Adversary a = make_adversary(p, {1, 1, 1, 1}, {{3, 1, {2}}});
  const View v = *build_views(a, 1).at(NodeId{0, 1});
  const HiddenChannels h = build_hidden_channels_run(v, {0});
  CHECK(h.check.ok());
  const auto g = build_views(h.adversary, 1);
  CHECK(contains(g.at(NodeId{h.chains[0][1], 1})->values(), 0));
}

TEST_CASE("hidden channels verified over enumerated runs") {
  std::uint64_t verified = 0;
  for (int n : {3, 4}) {
    EnumSpec s = spec_for(n, n - 1, 1, 2, 2);
    s.filter = ValueFilter::kCanonical;
    if (n == 4) {
      s.max_adversaries = 20000;
      s.seed = 5;
    }
    Enumerator(s).for_each([&](const Adversary& a) {
      const ViewTable views = build_views(a, 2);
      for (int m = 0; m <= 2; ++m)
        for (int i = 0; i < n; ++i) {
          const auto v = views.at(NodeId{i, m});
          if (!v) continue;
          const int hc = hidden_capacity(*v).hc;
          for (int c = 0; c <= std::min(hc, 2); ++c) {
            std::vector<Value> vals;
            for (int b = 0; b < c; ++b) vals.push_back((b + m) % 3);
            const HiddenChannels h = build_hidden_channels_run(*v, vals);
            CHECK(h.check.ok());
            CHECK(count_faulty(h.adversary.pattern) <= count_faulty(a.pattern));
            ++verified;
          }
        }
      return true;
    });
  }
  CHECK(verified > 10000);
}

TEST_CASE("surgery on the four-target scenario") {
  const Scenario sc = make_scenario("collective-low");
  const RunAnalysis run(sc.adversary, 2);
  CHECK_FALSE(surgery_precondition_failure(run, 0, 2, sc.targets).has_value());
  const SurgeryResult r = surgery_collective_low(sc.adversary, 0, 2, sc.targets);
  CHECK(r.ok());
  CHECK(r.observer_decides_low);
  for (const auto& d : r.target_decisions) CHECK(d->time == 2);
}

TEST_CASE("surgery with k = 1") {
  // 3 holds 0 and reaches only 2 in round 1; observer 0 hears of it from 2
  // in round 2. Target 1 is high at time 1 and hidden from <0,2>.
  const SystemParams p = SystemParams::make(4, 2, 1, 1);
  const Adversary a = make_adversary(p, {1, 1, 1, 0}, {{3, 1, {2}}});
  const SurgeryResult r = surgery_collective_low(a, 0, 2, {1});
  CHECK(r.ok());
  REQUIRE(r.target_decisions[0].has_value());
  CHECK(*r.target_decisions[0] == Decision{0, 2});
}

TEST_CASE("surgery rejects violated hypotheses") {
  const Scenario sc = make_scenario("collective-low");
  CHECK_THROWS_AS(surgery_collective_low(sc.adversary, 0, 1, sc.targets), AdversaryError);
  CHECK_THROWS_AS(surgery_collective_low(sc.adversary, 0, 2, {9, 10, 11}), AdversaryError);
  CHECK_THROWS_AS(surgery_collective_low(sc.adversary, 0, 0, sc.targets), AdversaryError);
}

TEST_CASE("seeded search finds verified surgery instances for k = 2") {
  const SystemParams p = SystemParams::make(6, 5, 2, 3);
  const auto found = find_surgery_instances(p, 1, 3, 17, 20000);
  REQUIRE(found.size() == 3);
  for (const auto& inst : found) {
    const SurgeryResult r = surgery_collective_low(inst.adversary, inst.observer, inst.time, inst.targets);
    CHECK(r.ok());
    ValueSet decided = 0;
    for (const auto& d : r.target_decisions) decided |= bit(d->value);
    CHECK(decided == 0b11u);
  }
}

TEST_CASE("margin search") {
  const MarginSearch found = find_margin_scenario(SystemParams::make(6, 4, 2), "earlystop", 2, 1, 200000);
  REQUIRE(found.status == SearchStatus::kFound);
  CHECK(is_margin_witness(*found.witness, "earlystop", 2, 4));
  CHECK(found.upmink_last_decision <= 2);
  CHECK(found.baseline_first_correct == 3);
  const MarginSearch none = find_margin_scenario(SystemParams::make(3, 0, 1), "earlystop", 2, 1, 100000);
  CHECK(none.status == SearchStatus::kNone);
  CHECK(none.exhaustive);
  const MarginSearch binary = find_margin_scenario(SystemParams::make(4, 2, 1), "floodmin", 2, 1, 200000);
  CHECK(binary.status == SearchStatus::kFound);
}

TEST_CASE("scenario catalogue") {
  for (const auto& name : scenario_names()) CHECK(make_scenario(name).name == name);
  CHECK_THROWS_AS(make_scenario("nope"), AdversaryError);
}
