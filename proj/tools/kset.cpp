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

// kset: command-line front end for running and checking
// k-set agreement protocols in the synchronous crash model.
//
// Exit codes: 0 success, 1 verification failure, 2 usage or schema error.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kset/adversaries.hpp"
#include "kset/engine.hpp"
#include "kset/json_io.hpp"
#include "kset/protocols.hpp"
#include "kset/topology.hpp"
#include "kset/verify.hpp"

namespace fs = std::filesystem;
using namespace kset;

namespace {

constexpr int kOk = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SpaceOptions {
  int n = 3, t = 1, k = 1, d = -1, horizon = -1, cap = -1;
  std::string values = "all";
  std::uint64_t sample = 0;
  std::uint64_t seed = 1;
  bool force = false;

  void attach(CLI::App* app) {
    app->add_option("--n", n, "number of processes")->capture_default_str();
    app->add_option("--t", t, "crash bound")->capture_default_str();
    app->add_option("--k", k, "agreement parameter")->capture_default_str();
    app->add_option("--d", d, "largest input value (default k)")->capture_default_str();
    app->add_option("--horizon", horizon, "last crash round (default t/k+2)")->capture_default_str();
    app->add_option("--cap", cap, "max crashes per round (-1: none)")->capture_default_str();
    app->add_option("--values", values, "input vectors: all or canonical")
        ->check(CLI::IsMember({"all", "canonical"}))
        ->capture_default_str();
    app->add_option("--sample", sample, "sample this many adversaries when the space is larger (0: never)")
        ->capture_default_str();
    app->add_option("--seed", seed, "sampling seed")->capture_default_str();
    app->add_flag("--force", force, "enumerate even beyond the desk-scale ceiling");
  }

  EnumSpec spec() const {
    EnumSpec s;
    s.params = SystemParams::make(n, t, k, d, horizon);
    if (cap >= 0) s.per_round_cap = cap;
    s.filter = values == "canonical" ? ValueFilter::kCanonical : ValueFilter::kAll;
    if (sample > 0) s.max_adversaries = sample;
    s.seed = seed;
    if (force) s.ceiling = std::numeric_limits<std::uint64_t>::max();
    return s;
  }

  Enumerator enumerator() const {
    const EnumSpec s = spec();
    const std::uint64_t patterns = count_patterns(s.params.n, s.params.t, s.params.horizon, s.per_round_cap);
    std::cout << "estimate: ";
    if (patterns == std::numeric_limits<std::uint64_t>::max()) std::cout << "more than 2^64";
    else std::cout << patterns;
    std::cout << " failure patterns";
    try {
      Enumerator e(s);
      std::cout << ", " << e.stream_size() << " adversaries" << (e.sampled() ? " (sampled)" : "") << "\n";
      return e;
    } catch (const AdversaryError& err) {
      std::cout << "\n";
      throw UsageError(std::string(err.what()) + " (use --sample N or --force)");
    }
  }
};

// Prints a replayable line built from the parsed options of one subcommand.
void print_config(const CLI::App* sub, const std::string& out_flag) {
  std::ostringstream line;
  line << "config: kset " << sub->get_name();
  if (!out_flag.empty()) line << " --out " << out_flag;
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_name(false, true);
    if (name.empty() || name == "-h,--help" || name == "--help") continue;
    const std::string flag = opt->get_lnames().empty() ? name : "--" + opt->get_lnames().front();
    if (opt->get_expected_min() == 0) {
      if (opt->count() > 0) line << ' ' << flag;
      continue;
    }
    std::vector<std::string> vals = opt->results();
    if (vals.empty() && !opt->get_default_str().empty()) vals.push_back(opt->get_default_str());
    for (const auto& v : vals) line << ' ' << flag << ' ' << v;
  }
  std::cout << line.str() << "\n";
}

fs::path out_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("KSET_OUT_DIR"); env && *env) return env;
  return "kset-out";
}

std::string decision_text(const std::optional<Decision>& d) {
  return d ? std::to_string(d->value) + "@" + std::to_string(d->time) : "undecided";
}

int execution_horizon(const DecisionRule& rule, const SystemParams& p, int at_least) {
  return std::max(at_least, rule.uniform() ? p.t / p.k + 2 : p.t / p.k + 1);
}

// ------------------------------------------------------------------ commands

struct RunArgs {
  std::string adversary, protocol = "optmink";
  int horizon = -1;
  bool compact = false, check = false, uniform = false;
};

int cmd_run(const RunArgs& args, const fs::path& out) {
  const Adversary a = load_adversary(args.adversary);
  const auto rule = make_protocol(args.protocol);
  int max_round = 0;
  for (int p = 0; p < a.n(); ++p)
    if (a.pattern.is_faulty(p)) max_round = std::max(max_round, a.pattern.crash_round(p));
  const int horizon = args.horizon >= 0 ? args.horizon : execution_horizon(*rule, a.params, max_round);
  RunTrace trace;
  Json summary;
  if (args.compact) {
    const CompactRun run = execute_compact(*rule, a, horizon);
    trace = run.trace;
    summary["bits"] = bits_to_json(run.bits);
    std::cout << "bits: max per ordered pair " << run.bits.max_pair_bits() << ", C = " << run.bits.constant() << "\n";
  } else {
    trace = execute(*rule, a, horizon);
  }
  write_json(out / "trace.json", trace_to_json(trace));
  write_text(out / "trace.csv", trace_to_csv(trace));
  for (int p = 0; p < a.n(); ++p)
    std::cout << "process " << p << (a.pattern.is_faulty(p) ? " (faulty)" : "") << ": "
              << decision_text(trace.decisions[static_cast<std::size_t>(p)]) << "\n";
  std::cout << "wrote " << (out / "trace.json").string() << " and " << (out / "trace.csv").string() << "\n";
  if (!args.check) return kOk;
  const PropertyReport report = check_properties(trace, args.uniform || rule->uniform());
  write_json(out / "properties.json", report_to_json(report));
  std::cout << "properties: " << (report.ok() ? "PASS" : "FAIL") << "\n";
  return report.ok() ? kOk : kFail;
}

struct CheckArgs {
  std::string protocol = "optmink";
  bool uniform = false, no_bound = false;
  int jobs = 1;
};

int cmd_enumerate_check(const SpaceOptions& space, const CheckArgs& args, const fs::path& out) {
  const auto rule = make_protocol(args.protocol);
  const Enumerator e = space.enumerator();
  CheckOptions o;
  o.uniform = args.uniform;
  if (!args.no_bound) o.bound = args.uniform ? TimeBound::kUniform : TimeBound::kNonuniform;
  o.horizon = execution_horizon(*rule, e.spec().params, e.spec().params.horizon);
  o.jobs = args.jobs;
  const AggregateReport r = check_enumeration(e, *rule, o);
  write_json(out / "report.json", report_to_json(r, e.spec()));
  std::cout << args.protocol << ": " << r.runs << " runs, " << (r.ok() ? "PASS" : "FAIL") << " (" << r.seconds
            << " s)\n";
  for (const auto& [name, tally] : r.properties) {
    std::cout << "  " << name << ": " << (tally.failures ? "FAIL" : "PASS");
    if (tally.failures) {
      const fs::path replay = out / ("counterexample-" + name + ".json");
      write_json(replay, adversary_to_json(*tally.first_counterexample));
      std::cout << " (" << tally.failures << " runs; first counterexample " << replay.string() << ")";
    }
    std::cout << "\n";
  }
  return r.ok() ? kOk : kFail;
}

struct DominateArgs {
  std::string q = "upmink", p = "floodmin";
  bool last_decider = false;
  int jobs = 1;
};

int cmd_dominate(const SpaceOptions& space, const DominateArgs& args, const fs::path& out) {
  const Enumerator e = space.enumerator();
  const auto rq = make_protocol(args.q), rp = make_protocol(args.p);
  const SystemParams& params = e.spec().params;
  const int horizon = std::max(execution_horizon(*rq, params, params.horizon), execution_horizon(*rp, params, 0));
  const DominationReport r = compare_domination(args.q, args.p, e, horizon, args.last_decider, args.jobs);
  write_json(out / "domination.json", report_to_json(r));
  std::cout << args.q << (r.strict() ? " dominates strictly " : r.holds() ? " dominates " : " does not dominate ")
            << args.p << (args.last_decider ? " (last decider)" : "") << " over " << r.runs << " runs";
  auto describe = [&](const DominationWitness& w) {
    auto when = [](int time) { return time < 0 ? std::string("never") : std::to_string(time); };
    const std::string who = w.process < 0 ? "last correct decision" : "process " + std::to_string(w.process) + " decides";
    return who + " at " + when(w.time_q) + " versus " + when(w.time_p);
  };
  if (r.strict()) std::cout << "; witness: " << describe(r.strict_witnesses.front());
  else if (!r.holds()) std::cout << "; violation: " << describe(r.violations.front());
  std::cout << "\n";
  return r.holds() ? kOk : kFail;
}

int cmd_certify(const SpaceOptions& space, int jobs, const fs::path& out) {
  const Enumerator e = space.enumerator();
  const SystemParams& params = e.spec().params;
  const CertificateReport r = certify_enumeration(e, std::max(params.horizon, params.t / params.k + 1), jobs);
  write_json(out / "certificate.json", report_to_json(r));
  if (r.ok())
    std::cout << "certificate: PASS at all undecided nodes (" << r.certified_nodes << " nodes, " << r.runs
              << " runs)\n";
  else
    std::cout << "certificate: FAIL at " << to_string(r.failed_node) << ": " << r.detail << "\n";
  return r.ok() ? kOk : kFail;
}

struct ScenarioArgs {
  std::string name, baseline = "earlystop";
  bool list = false, find_margin = false, surgery = false;
  int target = 2, max_time = 2, count = 20;
  std::uint64_t budget = 200000;
};

int cmd_scenario(const SpaceOptions& space, const ScenarioArgs& args, const fs::path& out) {
  if (args.list) {
    for (const auto& name : scenario_names()) std::cout << name << ": " << make_scenario(name).description << "\n";
    return kOk;
  }
  const SystemParams params = SystemParams::make(space.n, space.t, space.k, space.d, space.horizon);
  if (args.find_margin) {
    const MarginSearch s = find_margin_scenario(params, args.baseline, args.target, space.seed, args.budget);
    write_json(out / "margin.json", report_to_json(s));
    if (s.witness) write_json(out / "margin-adversary.json", adversary_to_json(*s.witness));
    std::cout << "margin search against " << args.baseline << ": " << report_to_json(s)["status"].get<std::string>()
              << " after " << s.tried << " candidates";
    if (s.witness)
      std::cout << "; upmink done by " << s.upmink_last_decision << ", " << args.baseline << " first correct at "
                << s.baseline_first_correct;
    std::cout << "\n";
    return s.status == SearchStatus::kFound ? kOk : kFail;
  }
  if (args.surgery) {
    const auto found = find_surgery_instances(params, args.max_time, args.count, space.seed, args.budget);
    Json list = Json::array();
    int good = 0;
    for (const auto& inst : found) {
      const SurgeryResult r = surgery_collective_low(inst.adversary, inst.observer, inst.time, inst.targets);
      Json entry = report_to_json(r);
      entry["input"] = adversary_to_json(inst.adversary);
      entry["observer"] = to_string(NodeId{inst.observer, inst.time});
      entry["targets"] = inst.targets;
      list.push_back(std::move(entry));
      good += r.ok() ? 1 : 0;
    }
    write_json(out / "surgery.json", list);
    std::cout << "surgery: " << good << "/" << found.size() << " instances verified\n";
    return good == static_cast<int>(found.size()) && good > 0 ? kOk : kFail;
  }
  if (args.name.empty()) throw UsageError("scenario needs --name, --list, --find-margin or --surgery");
  const Scenario s = make_scenario(args.name);
  write_json(out / (s.name + ".json"), adversary_to_json(s.adversary));
  write_json(out / (s.name + "-scenario.json"), scenario_to_json(s));
  std::cout << s.name << ": " << s.description << "; focus " << to_string(s.focus) << "; wrote "
            << (out / (s.name + ".json")).string() << "\n";
  return kOk;
}

struct TopologyArgs {
  int time = 1, threshold = -1;
  std::string protocol = "optmink";
  bool betti = false;
};

int cmd_topology(const SpaceOptions& space, const TopologyArgs& args, const fs::path& out) {
  const Enumerator e = space.enumerator();
  const ProtocolComplex pc = protocol_complex(e, args.time, args.protocol);
  const int threshold = args.threshold >= 0 ? args.threshold : e.spec().params.k;
  const HomologyProxyReport r = homology_proxy(pc, threshold, threshold - 1);
  Json report = report_to_json(r);
  report["threshold"] = threshold;
  report["f_vector"] = pc.complex.f_vector();
  report["spec"] = enum_spec_to_json(e.spec());
  if (args.betti) report["betti_mod2"] = betti_mod2(pc.complex, pc.complex.dimension());
  write_json(out / "homology-proxy.json", report);
  write_json(out / "complex.json", complex_to_json(pc.complex));
  std::cout << "protocol complex at time " << args.time << ": " << pc.complex.vertex_count() << " vertices, "
            << pc.complex.facets().size() << " facets; homology proxy " << (r.ok() ? "PASS" : "FAIL") << " on "
            << r.qualifying << " vertices with hidden capacity >= " << threshold << "\n";
  return r.ok() ? kOk : kFail;
}

struct SpernerArgs {
  int k = 2, trials = 100;
  std::uint64_t seed = 1;
  std::string subdivision = "cone";
};

int cmd_sperner(const SpernerArgs& args, const fs::path& out) {
  const Subdivision sub = args.subdivision == "cone" ? subdivide_cone(args.k) : subdivide_barycentric(args.k);
  std::mt19937_64 rng(args.seed);
  int odd = 0;
  Json counts = Json::array();
  for (int i = 0; i < args.trials; ++i) {
    const SpernerResult r = sperner_check(sub, random_sperner_coloring(sub, rng));
    counts.push_back(r.fully_colored);
    odd += (r.is_sperner && r.fully_colored % 2 == 1) ? 1 : 0;
  }
  write_json(out / "sperner.json", Json{{"k", args.k},
                                        {"subdivision", args.subdivision},
                                        {"seed", args.seed},
                                        {"trials", args.trials},
                                        {"odd", odd},
                                        {"fully_colored", counts},
                                        {"complex", complex_to_json(sub.complex)}});
  std::cout << "parity: " << odd << "/" << args.trials << " odd\n";
  return odd == args.trials ? kOk : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"k-set agreement workbench"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string out_flag;
  app.add_option("--out", out_flag, "output directory (default $KSET_OUT_DIR or ./kset-out)");

  int jobs = 1;
  auto add_jobs = [&](CLI::App* sub) {
    sub->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  };

  RunArgs run_args;
  CLI::App* run = app.add_subcommand("run", "run one adversary");
  run->add_option("--adversary", run_args.adversary, "adversary JSON file")->required();
  run->add_option("--protocol", run_args.protocol, "decision rule")->capture_default_str();
  run->add_option("--horizon", run_args.horizon, "last simulated time (default: enough to decide)");
  run->add_flag("--compact", run_args.compact, "use the compact message transport");
  run->add_flag("--check", run_args.check, "check validity, decision and agreement");
  run->add_flag("--uniform", run_args.uniform, "also check uniform agreement");

  SpaceOptions space;
  CheckArgs check_args;
  CLI::App* check = app.add_subcommand("enumerate-check", "check a protocol over an adversary space");
  space.attach(check);
  check->add_option("--protocol", check_args.protocol, "decision rule")->capture_default_str();
  check->add_flag("--uniform", check_args.uniform, "check uniform agreement and the uniform time bound");
  check->add_flag("--no-bound", check_args.no_bound, "skip the decision-time bound");
  add_jobs(check);

  DominateArgs dom_args;
  CLI::App* dom = app.add_subcommand("dominate", "compare decision times of two protocols");
  space.attach(dom);
  dom->add_option("--q", dom_args.q, "protocol claimed to be faster")->capture_default_str();
  dom->add_option("--p", dom_args.p, "protocol compared against")->capture_default_str();
  dom->add_flag("--last-decider", dom_args.last_decider, "compare last correct decision times");
  add_jobs(dom);

  CLI::App* cert = app.add_subcommand("certify", "hidden-channel certificates for optmink's undecided nodes");
  space.attach(cert);
  add_jobs(cert);

  ScenarioArgs sc_args;
  CLI::App* sc = app.add_subcommand("scenario", "named scenarios, margin search, surgery instances");
  space.attach(sc);
  sc->add_option("--name", sc_args.name, "named scenario");
  sc->add_flag("--list", sc_args.list, "list named scenarios");
  sc->add_flag("--find-margin", sc_args.find_margin, "search for an upmink margin scenario");
  sc->add_option("--baseline", sc_args.baseline, "baseline protocol for the margin search")->capture_default_str();
  sc->add_option("--target", sc_args.target, "time by which upmink must be done")->capture_default_str();
  sc->add_option("--budget", sc_args.budget, "search budget")->capture_default_str();
  sc->add_flag("--surgery", sc_args.surgery, "search for and verify collective-low surgery instances");
  sc->add_option("--max-time", sc_args.max_time, "latest surgery time")->capture_default_str();
  sc->add_option("--count", sc_args.count, "surgery instances wanted")->capture_default_str();

  TopologyArgs topo_args;
  CLI::App* topo = app.add_subcommand("topology", "protocol complex and homology proxy");
  space.attach(topo);
  topo->add_option("--time", topo_args.time, "time of the protocol complex")->capture_default_str();
  topo->add_option("--threshold", topo_args.threshold, "hidden capacity threshold (default k)");
  topo->add_option("--protocol", topo_args.protocol, "decision rule for vertex annotations")->capture_default_str();
  topo->add_flag("--betti", topo_args.betti, "also compute Betti numbers of the whole complex");

  SpernerArgs sp_args;
  CLI::App* sp = app.add_subcommand("sperner", "Sperner parity on random colorings");
  sp->add_option("--k", sp_args.k, "dimension")->check(CLI::Range(0, 8))->capture_default_str();
  sp->add_option("--trials", sp_args.trials, "colorings")->capture_default_str();
  sp->add_option("--seed", sp_args.seed, "coloring seed")->capture_default_str();
  sp->add_option("--subdivision", sp_args.subdivision, "cone or barycentric")
      ->check(CLI::IsMember({"cone", "barycentric"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  const fs::path out = out_dir(out_flag);
  try {
    for (CLI::App* sub : app.get_subcommands()) {
      print_config(sub, out_flag);
      std::cout << "output: " << out.string() << "\n";
      if (sub == run) return cmd_run(run_args, out);
      if (sub == check) return cmd_enumerate_check(space, {check_args.protocol, check_args.uniform, check_args.no_bound, jobs}, out);
      if (sub == dom) return cmd_dominate(space, {dom_args.q, dom_args.p, dom_args.last_decider, jobs}, out);
      if (sub == cert) return cmd_certify(space, jobs, out);
      if (sub == sc) return cmd_scenario(space, sc_args, out);
      if (sub == topo) return cmd_topology(space, topo_args, out);
      if (sub == sp) return cmd_sperner(sp_args, out);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kUsage;
  } catch (const ModelError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const AdversaryError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const TopologyError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const EngineError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
