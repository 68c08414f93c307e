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

#include "kset/json_io.hpp"

#include <random>
#include <sstream>

#include "doctest.h"
#include "test_util.hpp"

using namespace kset;

TEST_CASE("adversary JSON round trips") {
  std::mt19937_64 rng(8);
  const SystemParams p = SystemParams::make(6, 4, 2, 3);
  for (int trial = 0; trial < 200; ++trial) {
    const Adversary a = testing::random_adversary(rng, p, 3);
    const Adversary b = parse_adversary(adversary_to_json(a).dump());
    CHECK(b.values == a.values);
    CHECK(b.pattern == a.pattern);
    CHECK(b.params == a.params);
  }
}

TEST_CASE("adversary schema accepts any field order and rejects strays") {
  const Adversary a = parse_adversary(
      R"({"crashes":[{"delivers":[1],"round":1,"proc":0}],"values":[0,1,1,1],"d":1,"k":1,"t":2,"n":4})");
  CHECK(a.pattern.crash_round(0) == 1);
  CHECK(a.pattern.crash(0)->delivers == bit(1));
  CHECK_THROWS_AS(parse_adversary(R"({"n":2,"t":0,"k":1,"d":1,"values":[0,1],"crashes":[],"extra":1})"), SchemaError);
  CHECK_THROWS_AS(parse_adversary(R"({"n":2,"t":0,"k":1,"d":1,"values":[0,1]})"), SchemaError);
  CHECK_THROWS_AS(parse_adversary(R"({"n":2,"t":1,"k":1,"d":1,"values":[0,1],
      "crashes":[{"proc":0,"round":1,"delivers":[],"when":3}]})"), SchemaError);
  CHECK_THROWS_AS(parse_adversary(R"({"n":2,"t":1,"k":1,"d":1,"values":[0,1],
      "crashes":[{"proc":5,"round":1,"delivers":[]}]})"), SchemaError);
  CHECK_THROWS_AS(parse_adversary(R"({"n":2,"t":0,"k":1,"d":1,"values":[0,1],
      "crashes":[{"proc":0,"round":1,"delivers":[]}]})"), SchemaError);  // too many faults
  CHECK_THROWS_AS(parse_adversary(R"({"n":2,"t":0,"k":1,"d":1,"values":[0,7],"crashes":[]})"), SchemaError);
  CHECK_THROWS_AS(parse_adversary(R"({"n":"2"})"), SchemaError);
  CHECK_THROWS_AS(parse_adversary("{not json"), SchemaError);
}

TEST_CASE("trace exports") {
  const SystemParams p = SystemParams::make(4, 2, 1);
  const Adversary hp = make_adversary(p, {0, 1, 1, 1}, {{0, 1, {1}}, {1, 2, {2}}});
  const RunTrace tr = execute(*make_protocol("opt0"), hp, 3);
  const Json j = trace_to_json(tr);
  CHECK(j["processes"].size() == 4);
  CHECK(j["processes"][0]["at"] == 0);  // knows 0 from its own input
  CHECK(j["processes"][3]["at"] == 3);  // the hidden path delays it past time 2
  CHECK(j["processes"][2]["decided"] == 0);
  CHECK(j["processes"][2]["at"] == 2);

  const std::string csv = trace_to_csv(tr);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "time,process,active,minval,hc,low,decision");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 4 * 4);
  CHECK(csv.find("\n2,2,1,0,") != std::string::npos);
  CHECK(csv.find("\n2,0,0,,,,\n") != std::string::npos);
}

TEST_CASE("report JSON carries replay information") {
  EnumSpec spec;
  spec.params = SystemParams::make(3, 1, 1, 1, 2);
  spec.seed = 77;
  CheckOptions o;
  o.horizon = 2;
  const AggregateReport r = check_enumeration(Enumerator(spec), *make_protocol("eager"), o);
  const Json j = report_to_json(r, spec);
  CHECK(j["spec"]["seed"] == 77);
  CHECK(j["ok"] == false);
  CHECK(j["properties"]["agreement"]["failures"].get<int>() > 0);
  const Adversary replay = adversary_from_json(j["properties"]["agreement"]["first_counterexample"]);
  CHECK_FALSE(check_properties(execute(*make_protocol("eager"), replay, 2), false).agreement.pass);
}

TEST_CASE("complex export lists vertices and facets") {
  const Json j = complex_to_json(boundary({"a", "b", "c"}));
  CHECK(j["vertices"].size() == 3);
  CHECK(j["facets"].size() == 3);
  CHECK(j["dimension"] == 1);
}
