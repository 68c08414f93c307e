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

// JSON and CSV serialization of adversaries and traces, plus report export.

#ifndef KSET_JSON_IO_HPP_
#define KSET_JSON_IO_HPP_

#include <filesystem>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "kset/adversaries.hpp"
#include "kset/engine.hpp"
#include "kset/topology.hpp"
#include "kset/verify.hpp"

namespace kset {

using Json = nlohmann::ordered_json;

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// {"n","t","k","d","values","crashes":[{"proc","round","delivers"}]}. The
// horizon is not part of an adversary; parse_adversary uses the default.
Json adversary_to_json(const Adversary& a);
Adversary adversary_from_json(const Json& j);
Adversary parse_adversary(const std::string& text);
Adversary load_adversary(const std::filesystem::path& path);

Json trace_to_json(const RunTrace& trace);
// Columns: time,process,active,minval,hc,low,decision.
std::string trace_to_csv(const RunTrace& trace);

Json bits_to_json(const BitAccounting& bits);
Json enum_spec_to_json(const EnumSpec& spec);
Json report_to_json(const PropertyReport& report);
Json report_to_json(const AggregateReport& report, const EnumSpec& spec);
Json report_to_json(const DominationReport& report);
Json report_to_json(const CertificateReport& report);
Json report_to_json(const MarginSearch& search);
Json report_to_json(const SurgeryResult& result);
Json report_to_json(const HomologyProxyReport& report);
Json complex_to_json(const SimplicialComplex& complex);
Json scenario_to_json(const Scenario& scenario);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const Json& j);

}  // namespace kset

#endif  // KSET_JSON_IO_HPP_
