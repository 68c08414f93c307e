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

#include <set>

#include "doctest.h"
#include "kset/engine.hpp"
#include "test_util.hpp"

using namespace kset;

namespace {

// Independent reachability oracle: walk delivered edges backwards from the
// observer using only the failure pattern.
std::set<NodeId> reachable_from(const FailurePattern& f, NodeId observer) {
  std::set<NodeId> seen{observer};
  std::vector<NodeId> frontier{observer};
  while (!frontier.empty()) {
    const NodeId cur = frontier.back();
    frontier.pop_back();
    if (cur.time == 0) continue;
    for (int j = 0; j < f.n(); ++j) {
      const bool linked = j == cur.process || edge_exists(f, j, cur.process, cur.time);
      const NodeId pred{j, cur.time - 1};
      if (linked && seen.insert(pred).second) frontier.push_back(pred);
    }
  }
  return seen;
}

}  // namespace

TEST_CASE("failure-free views are complete after one round") {
  const SystemParams p = SystemParams::make(3, 1, 1);
  const ViewTable views = build_views(Adversary(p, {0, 1, 1}, FailurePattern(3)), 2);
  const View v = *views.at(NodeId{1, 1});
  for (int j = 0; j < 3; ++j) {
    CHECK(v.contains(NodeId{j, 0}));
    CHECK(v.initial_value(j).has_value());
  }
  CHECK(v.values() == 0b11u);
  CHECK(views.size() == 9);
}

TEST_CASE("a round-1 crasher reaching one process is seen only there") {
  const SystemParams p = SystemParams::make(3, 1, 1);
  const ViewTable views = build_views(make_adversary(p, {1, 1, 0}, {{2, 1, {0}}}), 2);
  CHECK(views.at(NodeId{0, 1})->contains(NodeId{2, 0}));
  CHECK(views.at(NodeId{0, 1})->initial_value(2) == 0);
  CHECK_FALSE(views.at(NodeId{1, 1})->contains(NodeId{2, 0}));
  CHECK_FALSE(views.at(NodeId{1, 1})->initial_value(2).has_value());
  CHECK_FALSE(views.at(NodeId{2, 1}).has_value());
  // The relay reaches process 1 one round later.
  CHECK(views.at(NodeId{1, 2})->initial_value(2) == 0);
}

TEST_CASE("hidden path keeps a value away from the observer") {
  // j0 (value 0) crashes in round 1 reaching only j1; j1 crashes in round 2
  // reaching only j2. Observer i = 3 never hears of value 0 by time 2.
  const SystemParams p = SystemParams::make(4, 2, 1);
  const Adversary a = make_adversary(p, {0, 1, 1, 1}, {{0, 1, {1}}, {1, 2, {2}}});
  const ViewTable views = build_views(a, 2);
  const View vi = *views.at(NodeId{3, 2});
  CHECK_FALSE(contains(vi.values(), 0));
  CHECK_FALSE(vi.contains(NodeId{0, 0}));
  CHECK_FALSE(vi.contains(NodeId{1, 1}));
  CHECK(contains(views.at(NodeId{2, 2})->values(), 0));
}

TEST_CASE("view node sets match message-chain reachability") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const SystemParams p = SystemParams::make(5, 3, 1);
    const Adversary a = testing::random_adversary(rng, p, 3);
    const ViewTable views = build_views(a, 4);
    for (int m = 0; m <= 4; ++m)
      for (int i = 0; i < 5; ++i) {
        const auto v = views.at(NodeId{i, m});
        CHECK(v.has_value() == is_active(a.pattern, i, m));
        if (!v) continue;
        const auto oracle = reachable_from(a.pattern, NodeId{i, m});
        for (int l = 0; l <= m; ++l)
          for (int j = 0; j < 5; ++j) CHECK(v->contains(NodeId{j, l}) == (oracle.count(NodeId{j, l}) == 1));
      }
  }
}

TEST_CASE("views grow monotonically along a process") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const SystemParams p = SystemParams::make(4, 3, 1);
    const Adversary a = testing::random_adversary(rng, p, 3);
    const ViewTable views = build_views(a, 4);
    for (int i = 0; i < 4; ++i)
      for (int m = 0; m < 4; ++m) {
        const auto now = views.at(NodeId{i, m});
        const auto next = views.at(NodeId{i, m + 1});
        if (!now || !next) continue;
        for (int l = 0; l <= m; ++l) CHECK((now->seen_at(l) & ~next->seen_at(l)) == 0u);
      }
  }
}

TEST_CASE("view equality is structural and crosses runs") {
  const SystemParams p = SystemParams::make(3, 1, 1);
  // Process 2 crashes silently in round 1; its value differs between runs.
  const Adversary a = make_adversary(p, {1, 1, 0}, {{2, 1, {}}});
  const Adversary b = make_adversary(p, {1, 1, 1}, {{2, 1, {}}});
  const ViewTable va = build_views(a, 2);
  const ViewTable vb = build_views(b, 2);
  CHECK(*va.at(NodeId{0, 2}) == *vb.at(NodeId{0, 2}));
  CHECK(va.at(NodeId{0, 2})->key() == vb.at(NodeId{0, 2})->key());
  CHECK(va.at(NodeId{0, 2})->hash() == vb.at(NodeId{0, 2})->hash());
  // At time 0 the crashed process itself has different views.
  CHECK_FALSE(*va.at(NodeId{2, 0}) == *vb.at(NodeId{2, 0}));
  CHECK_FALSE(*va.at(NodeId{0, 1}) == *va.at(NodeId{1, 1}));
}

TEST_CASE("delivered edges are part of the view") {
  const SystemParams p = SystemParams::make(3, 1, 1);
  const Adversary a = make_adversary(p, {1, 1, 1}, {{2, 1, {0}}});
  const Adversary b = make_adversary(p, {1, 1, 1}, {{2, 1, {0, 1}}});
  const View x = *build_views(a, 2).at(NodeId{0, 2});
  const View y = *build_views(b, 2).at(NodeId{0, 2});
  CHECK_FALSE(x == y);
  CHECK(x.delivered_to(NodeId{1, 1}) == bit(0));
  CHECK(y.delivered_to(NodeId{1, 1}) == (bit(0) | bit(2)));
  CHECK_THROWS_AS(x.delivered_to(NodeId{2, 1}), EngineError);
}

TEST_CASE("execute is deterministic and records decisions once") {
  std::mt19937_64 rng(3);
  const auto rule = make_protocol("optmink");
  for (int trial = 0; trial < 100; ++trial) {
    const SystemParams p = SystemParams::make(4, 2, 2);
    const Adversary a = testing::random_adversary(rng, p, 2);
    const RunTrace first = execute(*rule, a, 3);
    const RunTrace second = execute(*rule, a, 3);
    CHECK(first == second);
    for (int i = 0; i < 4; ++i) {
      int marks = 0;
      for (int m = 0; m <= 3; ++m) marks += first.at(NodeId{i, m}).decision.has_value() ? 1 : 0;
      CHECK(marks == (first.decisions[static_cast<std::size_t>(i)] ? 1 : 0));
    }
    CHECK(decide(*rule, RunAnalysis(a, 3)) == first.decisions);
  }
}

TEST_CASE("optmink decides k at time 1 when everyone holds k") {
  const SystemParams p = SystemParams::make(3, 1, 2);
  const RunTrace tr = execute(*make_protocol("optmink"), Adversary(p, {2, 2, 2}, FailurePattern(3)), 2);
  for (const auto& d : tr.decisions) CHECK(d == Decision{2, 1});
  CHECK(tr.at(NodeId{0, 0}).hc == 2);
  CHECK(tr.at(NodeId{0, 1}).hc == 0);
}

TEST_CASE("optmink lets a low process decide at time 0") {
  const SystemParams p = SystemParams::make(3, 1, 1);
  const RunTrace tr = execute(*make_protocol("optmink"), Adversary(p, {1, 0, 1}, FailurePattern(3)), 2);
  CHECK(tr.decisions[1] == Decision{0, 0});
}

TEST_CASE("floodmin decides exactly at the worst-case time") {
  std::mt19937_64 rng(5);
  const SystemParams p = SystemParams::make(5, 4, 2);
  const auto rule = make_protocol("floodmin");
  for (int trial = 0; trial < 50; ++trial) {
    const Adversary a = testing::random_adversary(rng, p, 4);
    const RunTrace tr = execute(*rule, a, 4);
    for (int i = 0; i < 5; ++i)
      if (!a.pattern.is_faulty(i)) CHECK(tr.decisions[static_cast<std::size_t>(i)]->time == 3);
  }
}

TEST_CASE("engine rejects bad horizons") {
  const SystemParams p = SystemParams::make(3, 2, 1);
  const Adversary a(p, {0, 1, 1}, FailurePattern(3));
  CHECK_THROWS_AS(build_views(a, -1), EngineError);
  CHECK_THROWS_AS(execute(*make_protocol("optmink"), a, -1), EngineError);
  CHECK_THROWS_AS(execute(*make_protocol("upmink"), a, 3), EngineError);
  CHECK_NOTHROW(execute(*make_protocol("upmink"), a, 4));
}
