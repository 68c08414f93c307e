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

#include "doctest.h"
#include "kset/model.hpp"

using namespace kset;

TEST_CASE("system params defaults and validation") {
  const SystemParams p = SystemParams::make(4, 2, 2);
  CHECK(p.d_vals == 2);
  CHECK(p.horizon == 3);
  CHECK(p.worst_case_time() == 2);
  CHECK_THROWS_AS(SystemParams::make(1, 0, 1), ModelError);
  CHECK_THROWS_AS(SystemParams::make(3, 3, 1), ModelError);
  CHECK_THROWS_AS(SystemParams::make(3, 1, 0), ModelError);
  CHECK_THROWS_AS(SystemParams::make(3, 1, 2, 1), ModelError);
}

TEST_CASE("is_active boundaries") {
  FailurePattern f(3);
  for (int p = 0; p < 3; ++p)
    for (int m = 0; m < 5; ++m) CHECK(is_active(f, p, m));
  f.set_crash(1, CrashSpec{2, 0});
  CHECK(is_active(f, 1, 1));
  CHECK_FALSE(is_active(f, 1, 2));
  f.set_crash(2, CrashSpec{1, 0});
  CHECK(is_active(f, 2, 0));
  CHECK_FALSE(is_active(f, 2, 1));
  CHECK_THROWS_AS(is_active(f, 3, 0), ModelError);
}

TEST_CASE("edge_exists follows the delivery set") {
  FailurePattern f(3);
  for (int s = 0; s < 3; ++s)
    for (int r = 0; r < 3; ++r)
      if (s != r)
        for (int m = 1; m < 5; ++m) CHECK(edge_exists(f, s, r, m));
  f.set_crash(0, CrashSpec{3, bit(1)});
  CHECK(edge_exists(f, 0, 1, 2));
  CHECK(edge_exists(f, 0, 1, 3));
  CHECK_FALSE(edge_exists(f, 0, 2, 3));
  CHECK_FALSE(edge_exists(f, 0, 1, 4));
  CHECK_FALSE(edge_exists(f, 0, 2, 4));
  CHECK_THROWS_AS(edge_exists(f, 0, 0, 1), ModelError);
  CHECK_THROWS_AS(edge_exists(f, 0, 1, 0), ModelError);
}

TEST_CASE("edges vanish after the crash round for every receiver") {
  FailurePattern f(4);
  f.set_crash(2, CrashSpec{2, bit(0) | bit(3)});
  for (int m = 3; m < 8; ++m)
    for (int r = 0; r < 4; ++r)
      if (r != 2) CHECK_FALSE(edge_exists(f, 2, r, m));
}

TEST_CASE("count_faulty and the t bound") {
  CHECK(count_faulty(FailurePattern::failure_free(3)) == 0);
  FailurePattern f(4);
  f.set_crash(0, CrashSpec{1, 0});
  f.set_crash(3, CrashSpec{2, bit(1)});
  CHECK(count_faulty(f) == 2);
  CHECK_NOTHROW(f.validate(2));
  CHECK_THROWS_AS(f.validate(1), ModelError);
  CHECK_THROWS_AS(f.set_crash(1, CrashSpec{0, 0}), ModelError);
  CHECK_THROWS_AS(f.set_crash(1, CrashSpec{1, bit(1)}), ModelError);
}

TEST_CASE("adversary validation") {
  const SystemParams p = SystemParams::make(3, 1, 1);
  CHECK_NOTHROW(Adversary(p, {0, 1, 1}, FailurePattern(3)));
  CHECK_THROWS_AS(Adversary(p, {0, 1}, FailurePattern(3)), ModelError);
  CHECK_THROWS_AS(Adversary(p, {0, 2, 1}, FailurePattern(3)), ModelError);
  const Adversary a = make_adversary(p, {1, 1, 0}, {{2, 1, {0}}});
  CHECK(a.pattern.crash_round(2) == 1);
  CHECK(a.pattern.crash(2)->delivers == bit(0));
  CHECK_THROWS_AS(make_adversary(p, {1, 1, 0}, {{2, 1, {0}}, {1, 1, {}}}), ModelError);
}

TEST_CASE("set conversions round trip") {
  CHECK(to_set({0, 3}) == 9u);
  CHECK(to_ids(9u) == std::vector<ProcessId>{0, 3});
  CHECK(to_string(NodeId{2, 5}) == "<2,5>");
}
