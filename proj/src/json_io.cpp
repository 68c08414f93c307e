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

#include <fstream>
#include <set>
#include <sstream>

namespace kset {

namespace {

const char* status_name(SearchStatus s) {
  switch (s) {
    case SearchStatus::kFound: return "found";
    case SearchStatus::kNone: return "none";
    case SearchStatus::kBudgetExhausted: return "budget-exhausted";
  }
  return "?";
}

Json process_list(ProcessSet set) {
  Json out = Json::array();
  for (ProcessId p : to_ids(set)) out.push_back(p);
  return out;
}

Json optional_adversary(const std::optional<Adversary>& a) { return a ? adversary_to_json(*a) : Json(nullptr); }

Json decision_json(const std::optional<Decision>& d) {
  Json j;
  j["decided"] = d ? Json(d->value) : Json(nullptr);
  j["at"] = d ? Json(d->time) : Json(nullptr);
  return j;
}

void require_only(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw SchemaError(where + " must be an object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw SchemaError("unknown field '" + key + "' in " + where);
  for (const auto& key : allowed)
    if (!j.contains(key)) throw SchemaError("missing field '" + key + "' in " + where);
}

int get_int(const Json& j, const char* key) {
  const Json& v = j.at(key);
  if (!v.is_number_integer()) throw SchemaError(std::string("field '") + key + "' must be an integer");
  return v.get<int>();
}

}  // namespace

Json adversary_to_json(const Adversary& a) {
  Json j;
  j["n"] = a.params.n;
  j["t"] = a.params.t;
  j["k"] = a.params.k;
  j["d"] = a.params.d_vals;
  j["values"] = a.values;
  j["crashes"] = Json::array();
  for (int p = 0; p < a.n(); ++p)
    if (const auto& c = a.pattern.crash(p))
      j["crashes"].push_back(Json{{"proc", p}, {"round", c->round}, {"delivers", process_list(c->delivers)}});
  return j;
}

Adversary adversary_from_json(const Json& j) {
  require_only(j, {"n", "t", "k", "d", "values", "crashes"}, "adversary");
  try {
    const int n = get_int(j, "n");
    const int t = get_int(j, "t");
    const int k = get_int(j, "k");
    const int d = get_int(j, "d");
    if (!j.at("values").is_array()) throw SchemaError("field 'values' must be an array");
    std::vector<Value> values;
    for (const auto& v : j.at("values")) {
      if (!v.is_number_integer()) throw SchemaError("initial values must be integers");
      values.push_back(v.get<int>());
    }
    if (!j.at("crashes").is_array()) throw SchemaError("field 'crashes' must be an array");
    const SystemParams params = SystemParams::make(n, t, k, d);
    FailurePattern pattern(n);
    for (const auto& c : j.at("crashes")) {
      require_only(c, {"proc", "round", "delivers"}, "crash entry");
      const int p = get_int(c, "proc");
      if (p < 0 || p >= n) throw SchemaError("crash entry names process " + std::to_string(p));
      if (pattern.is_faulty(p)) throw SchemaError("process " + std::to_string(p) + " crashes twice");
      if (!c.at("delivers").is_array()) throw SchemaError("field 'delivers' must be an array");
      std::vector<ProcessId> delivers;
      for (const auto& r : c.at("delivers")) {
        if (!r.is_number_integer()) throw SchemaError("delivery targets must be integers");
        const int q = r.get<int>();
        if (q < 0 || q >= n) throw SchemaError("delivery target " + std::to_string(q) + " out of range");
        delivers.push_back(q);
      }
      pattern.set_crash(p, CrashSpec{get_int(c, "round"), to_set(delivers)});
    }
    return Adversary(params, std::move(values), std::move(pattern));
  } catch (const ModelError& e) {
    throw SchemaError(e.what());
  }
}

Adversary parse_adversary(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw SchemaError(std::string("malformed JSON: ") + e.what());
  }
  return adversary_from_json(j);
}

Adversary load_adversary(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_adversary(buf.str());
}

Json trace_to_json(const RunTrace& trace) {
  Json j;
  j["protocol"] = trace.protocol;
  j["horizon"] = trace.horizon;
  j["adversary"] = adversary_to_json(trace.adversary);
  j["processes"] = Json::array();
  for (int p = 0; p < trace.adversary.n(); ++p) {
    Json row = decision_json(trace.decisions[static_cast<std::size_t>(p)]);
    row["process"] = p;
    row["correct"] = !trace.adversary.pattern.is_faulty(p);
    j["processes"].push_back(std::move(row));
  }
  return j;
}

std::string trace_to_csv(const RunTrace& trace) {
  std::ostringstream out;
  out << "time,process,active,minval,hc,low,decision\n";
  for (int m = 0; m <= trace.horizon; ++m)
    for (int p = 0; p < trace.adversary.n(); ++p) {
      const NodeRecord& r = trace.at(NodeId{p, m});
      out << m << ',' << p << ',' << (r.active ? 1 : 0) << ',';
      if (r.active) out << r.minval << ',' << r.hc << ',' << (r.low ? 1 : 0) << ',';
      else out << ",,,";
      if (r.decision) out << *r.decision;
      out << '\n';
    }
  return out.str();
}

Json bits_to_json(const BitAccounting& b) {
  return Json{{"n", b.n},
              {"id_bits", b.id_bits},
              {"value_bits", b.value_bits},
              {"round_bits", b.round_bits},
              {"max_pair_bits", b.max_pair_bits()},
              {"constant", b.constant()},
              {"messages",
               {{"value", b.value_messages},
                {"failed_at", b.failed_at_messages},
                {"alive_at", b.alive_at_messages},
                {"im_alive", b.im_alive_messages}}},
              {"max_failed_at_per_subject", b.max_failed_at_per_subject},
              {"max_alive_at_per_subject", b.max_alive_at_per_subject}};
}

Json enum_spec_to_json(const EnumSpec& s) {
  Json j{{"n", s.params.n}, {"t", s.params.t}, {"k", s.params.k}, {"d", s.params.d_vals}, {"horizon", s.params.horizon}};
  j["per_round_cap"] = s.per_round_cap ? Json(*s.per_round_cap) : Json(nullptr);
  j["values"] = s.filter == ValueFilter::kAll ? "all" : s.filter == ValueFilter::kCanonical ? "canonical" : "explicit";
  j["max_adversaries"] = s.max_adversaries ? Json(*s.max_adversaries) : Json(nullptr);
  j["seed"] = s.seed;
  j["describe"] = s.describe();
  return j;
}

namespace {

Json result_json(const PropertyResult& r) {
  Json j{{"pass", r.pass}};
  if (!r.pass) {
    j["offenders"] = process_list(r.offenders);
    j["detail"] = r.detail;
    j["counterexample"] = optional_adversary(r.counterexample);
  }
  return j;
}

Json witness_json(const DominationWitness& w) {
  return Json{{"adversary", adversary_to_json(w.adversary)},
              {"process", w.process < 0 ? Json(nullptr) : Json(w.process)},
              {"time_q", w.time_q < 0 ? Json(nullptr) : Json(w.time_q)},
              {"time_p", w.time_p < 0 ? Json(nullptr) : Json(w.time_p)}};
}

}  // namespace

Json report_to_json(const PropertyReport& r) {
  Json j{{"ok", r.ok()},
         {"validity", result_json(r.validity)},
         {"decision", result_json(r.decision)},
         {"agreement", result_json(r.agreement)}};
  if (r.uniform_checked) j["uniform-agreement"] = result_json(r.uniform_agreement);
  return j;
}

Json report_to_json(const AggregateReport& r, const EnumSpec& spec) {
  Json j{{"protocol", r.protocol}, {"spec", enum_spec_to_json(spec)}, {"runs", r.runs}, {"ok", r.ok()},
         {"seconds", r.seconds}};
  Json props = Json::object();
  for (const auto& [name, tally] : r.properties) {
    Json t{{"failures", tally.failures}};
    if (tally.failures) {
      t["offenders"] = process_list(tally.offenders);
      t["detail"] = tally.detail;
      t["first_counterexample"] = optional_adversary(tally.first_counterexample);
    }
    props[name] = std::move(t);
  }
  j["properties"] = std::move(props);
  return j;
}

Json report_to_json(const DominationReport& r) {
  Json j{{"q", r.q},
         {"p", r.p},
         {"order", r.last_decider ? "last-decider" : "per-process"},
         {"runs", r.runs},
         {"holds", r.holds()},
         {"strict", r.strict()},
         {"strict_count", r.strict_count},
         {"violation_count", r.violation_count}};
  j["strict_witnesses"] = Json::array();
  for (const auto& w : r.strict_witnesses) j["strict_witnesses"].push_back(witness_json(w));
  j["violations"] = Json::array();
  for (const auto& w : r.violations) j["violations"].push_back(witness_json(w));
  return j;
}

Json report_to_json(const CertificateReport& r) {
  Json j{{"ok", r.ok()},
         {"runs", r.runs},
         {"undecided_nodes", r.undecided_nodes},
         {"certified_nodes", r.certified_nodes},
         {"failures", r.failures}};
  if (r.failures) {
    j["first_failure"] = optional_adversary(r.first_failure);
    j["failed_node"] = to_string(r.failed_node);
    j["detail"] = r.detail;
  }
  return j;
}

Json report_to_json(const MarginSearch& s) {
  return Json{{"status", status_name(s.status)},
              {"seed", s.seed},
              {"budget", s.budget},
              {"tried", s.tried},
              {"exhaustive", s.exhaustive},
              {"witness", optional_adversary(s.witness)},
              {"upmink_last_decision", s.upmink_last_decision},
              {"baseline_first_correct", s.baseline_first_correct}};
}

Json report_to_json(const SurgeryResult& r) {
  Json targets = Json::array();
  for (const auto& d : r.target_decisions) targets.push_back(decision_json(d));
  return Json{{"ok", r.ok()},
              {"low_value", r.low_value},
              {"collective", r.collective},
              {"view_unchanged", r.view_unchanged},
              {"prefix_unchanged", r.prefix_unchanged},
              {"observer_decides_low", r.observer_decides_low},
              {"target_decisions", std::move(targets)},
              {"intermediate", adversary_to_json(r.channels.adversary)},
              {"adversary", adversary_to_json(r.adversary)}};
}

Json report_to_json(const HomologyProxyReport& r) {
  return Json{{"label", "homology proxy"},
              {"ok", r.ok()},
              {"vertices", r.vertices},
              {"qualifying", r.qualifying},
              {"star_failures", r.star_failures},
              {"qualifying_link_acyclic", r.qualifying_link_acyclic},
              {"other", r.other},
              {"other_link_acyclic", r.other_link_acyclic}};
}

Json complex_to_json(const SimplicialComplex& c) {
  Json j;
  j["vertices"] = Json::array();
  for (int v = 0; v < c.vertex_count(); ++v) j["vertices"].push_back(c.label(v));
  j["facets"] = Json::array();
  for (const auto& f : c.facets()) j["facets"].push_back(f);
  j["dimension"] = c.dimension();
  j["f_vector"] = c.f_vector();
  return j;
}

Json scenario_to_json(const Scenario& s) {
  return Json{{"name", s.name},
              {"description", s.description},
              {"focus", {{"process", s.focus.process}, {"time", s.focus.time}}},
              {"targets", s.targets},
              {"adversary", adversary_to_json(s.adversary)}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_json(const std::filesystem::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

}  // namespace kset
