#include "alignguard_cli.hpp"

#include <iostream>

#include <CLI11.hpp>

#include "alignguard/campaign.hpp"
#include "alignguard/corpus.hpp"
#include "alignguard/errors.hpp"
#include "alignguard/extractor.hpp"
#include "alignguard/json.hpp"
#include "alignguard/knowledge.hpp"
#include "alignguard/mutator.hpp"
#include "alignguard/synthesizer.hpp"
#include "alignguard/triage.hpp"

namespace alignguard::cli {

namespace fs = std::filesystem;

namespace {

GatewayConfig gateway_from_flags(const std::string& mode, const std::string& cassette,
                                 const std::string& endpoint, const std::string& model,
                                 double temperature) {
  GatewayConfig cfg;
  auto parsed = gateway_mode_from_string(mode);
  if (!parsed) throw ConfigError("unknown gateway mode: " + mode);
  cfg.mode = *parsed;
  cfg.cassette_path = cassette;
  cfg.endpoint = endpoint;
  if (!model.empty()) cfg.model_name = model;
  cfg.temperature = temperature;
  return cfg;
}

ExecutionBackend backend_from_file(const std::string& path) {
  return ExecutionBackend::from_json(load_json_file(path));
}

int cmd_stats(const std::string& kb_path, const std::string& format) {
  BugRecordSet set = load_knowledge_base(kb_path);
  CategoryDistribution dist = taxonomy_stats(set);
  if (format == "structured") {
    std::cout << canonical_dump(dist.to_json());
  } else {
    std::cout << dist.to_table();
  }
  return 0;
}

int cmd_ingest(const std::string& source, const std::string& out_dir,
               const std::string& render_dir) {
  IngestReport report = ingest_seeds(source);
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    for (const auto& tc : report.cases)
      save_test_case(tc, fs::path(out_dir) / (tc.id + ".json"));
    save_json_file(fs::path(out_dir) / "ingest_report.json", report.to_json());
  }
  if (!render_dir.empty()) {
    fs::create_directories(render_dir);
    for (const auto& tc : report.cases)
      atomic_write_file(fs::path(render_dir) / (tc.id + ".py"), render_test_file(tc));
  }
  std::cout << "accepted " << report.cases.size() << ", rejected "
            << report.rejections.size() << "\n";
  for (const auto& r : report.rejections)
    std::cout << "  rejected " << r.file << ": " << r.reason << " (" << r.detail
              << ")\n";
  return 0;
}

int cmd_extract(const std::string& kb_path, const std::vector<std::string>& bug_ids,
                const std::string& patterns_dir, const GatewayConfig& gw_cfg) {
  BugRecordSet kb = load_knowledge_base(kb_path);
  auto gateway = Gateway::configure(gw_cfg);
  int failures = 0;
  for (const auto& id : bug_ids) {
    const BugRecord* record = kb.find(id);
    if (!record) throw ConfigError("unknown bug id: " + id);
    try {
      TriggerPattern pattern = extract_pattern(*record, *gateway);
      save_pattern(pattern, patterns_dir);
      std::cout << "extracted " << id << "\n";
    } catch (const StageError& e) {
      std::cerr << "stage failure for " << id << ": " << e.what() << "\n";
      ++failures;
    }
  }
  return failures == 0 ? 0 : 2;
}

int cmd_synthesize(const std::string& kb_path, const std::vector<std::string>& bug_ids,
                   const std::string& patterns_dir, const std::string& rules_dir,
                   const GatewayConfig& gw_cfg, bool allow_low_confidence) {
  BugRecordSet kb = load_knowledge_base(kb_path);
  auto gateway = Gateway::configure(gw_cfg);
  int failures = 0;
  for (const auto& id : bug_ids) {
    const BugRecord* record = kb.find(id);
    if (!record) throw ConfigError("unknown bug id: " + id);
    try {
      TriggerPattern pattern = load_pattern(patterns_dir, id);
      SynthesisOutcome outcome =
          synthesize_rules(pattern, *record, *gateway, allow_low_confidence);
      for (const auto& rule : outcome.rules) save_rule(rule, rules_dir);
      std::cout << "synthesized " << outcome.rules.size() << " rules from " << id;
      if (!outcome.dropped.empty())
        std::cout << " (dropped " << outcome.dropped.size() << ")";
      std::cout << "\n";
      for (const auto& [key, why] : outcome.dropped)
        std::cout << "  dropped " << key << ": " << why << "\n";
    } catch (const StageError& e) {
      std::cerr << "stage failure for " << id << ": " << e.what() << "\n";
      ++failures;
    }
  }
  return failures == 0 ? 0 : 2;
}

int cmd_mutate(const std::string& seeds_dir, const std::string& rules_dir,
               bool use_builtin, const std::vector<std::string>& family_names,
               const std::string& out_dir, size_t budget, std::uint64_t campaign_seed) {
  std::vector<MutationRule> rules;
  if (use_builtin) {
    if (family_names.empty()) {
      rules = builtin_rules();
    } else {
      std::set<TriggerFamily> families;
      for (const auto& name : family_names) {
        auto f = trigger_family_from_string(name);
        if (!f) throw ConfigError("unknown trigger family: " + name);
        families.insert(*f);
      }
      rules = builtin_rules(families);
    }
  }
  if (!rules_dir.empty()) {
    auto loaded = load_rules_dir(rules_dir);
    rules.insert(rules.end(), loaded.begin(), loaded.end());
  }
  if (rules.empty()) throw ConfigError("no rules selected (use --builtin or --rules)");

  std::vector<TestCase> seeds = load_cases_dir(seeds_dir);
  BatchResult batch = batch_mutate(rules, seeds, budget, campaign_seed);
  fs::create_directories(out_dir);
  for (const auto& m : batch.mutants) {
    save_json_file(fs::path(out_dir) / (m.test_case.id + ".json"), m.to_json());
    atomic_write_file(fs::path(out_dir) / (m.test_case.id + ".diff"), m.diff);
  }
  Json log = Json::array();
  for (const auto& e : batch.log)
    log.push_back({{"rule_id", e.rule_id},
                   {"seed_id", e.seed_id},
                   {"event", e.event},
                   {"detail", e.detail}});
  save_json_file(fs::path(out_dir) / "log.json", log);
  std::cout << "produced " << batch.mutants.size() << " valid mutants ("
            << batch.log.size() << " pairs considered)\n";
  return 0;
}

int cmd_run(const std::string& case_path, const std::string& cases_dir,
            const std::string& backend_path, const std::string& out_dir,
            double timeout) {
  ExecutionBackend backend = backend_from_file(backend_path);
  RunOptions opts;
  opts.timeout_seconds = timeout;
  ToleranceSpec tol = ToleranceSpec::defaults();

  std::vector<TestCase> cases;
  if (!case_path.empty()) cases.push_back(load_test_case(case_path));
  if (!cases_dir.empty()) {
    auto dir_cases = load_cases_dir(cases_dir);
    cases.insert(cases.end(), dir_cases.begin(), dir_cases.end());
  }
  if (cases.empty()) throw ConfigError("run: no cases given");

  if (!out_dir.empty()) fs::create_directories(out_dir);
  size_t mismatches = 0;
  for (const auto& tc : cases) {
    ExecutionResult res = run_test(tc, backend, tol, opts);
    Verdict v = classify(tc, res);
    std::cout << tc.id << ": " << to_string(v.classification);
    if (res.mismatch) {
      std::cout << " (iteration " << res.mismatch->iteration_index << ", path "
                << res.mismatch->first_mismatch_path << ")";
    }
    std::cout << "\n";
    if (v.classification == Classification::CorrectnessBugCandidate) ++mismatches;
    if (!out_dir.empty())
      save_json_file(fs::path(out_dir) / (tc.id + ".json"), res.to_json());
  }
  std::cout << mismatches << " candidate(s) out of " << cases.size() << " case(s)\n";
  return 0;
}

int cmd_campaign(const std::string& config_path,
                 const std::vector<std::pair<std::string, std::string>>& overrides) {
  Json doc = load_json_file(config_path);
  for (const auto& [key, value] : overrides) {
    Json parsed = Json::parse(value, nullptr, false);
    doc[key] = parsed.is_discarded() ? Json(value) : parsed;
  }
  CampaignConfig config = CampaignConfig::from_json(doc);
  CampaignSummary summary = run_campaign(config);
  std::cout << canonical_dump(summary.to_json());
  return 0;
}

int cmd_eval_detection(const std::string& tests_dir, const std::string& env_buggy,
                       const std::string& env_fixed, const std::string& format,
                       double timeout) {
  std::vector<TestCase> tests;
  if (fs::exists(tests_dir)) tests = load_cases_dir(tests_dir);
  ExecutionBackend buggy = backend_from_file(env_buggy);
  ExecutionBackend fixed = backend_from_file(env_fixed);
  RunOptions opts;
  opts.timeout_seconds = timeout;
  DetectionReport report =
      evaluate_detection(tests, buggy, fixed, ToleranceSpec::defaults(), opts);
  if (format == "structured") {
    std::cout << canonical_dump(report.to_json());
  } else {
    std::cout << report.to_table();
  }
  return 0;
}

int cmd_rules_dump(const std::vector<std::string>& family_names,
                   const std::string& out_dir) {
  std::vector<MutationRule> rules;
  if (family_names.empty()) {
    rules = builtin_rules();
  } else {
    std::set<TriggerFamily> families;
    for (const auto& name : family_names) {
      auto f = trigger_family_from_string(name);
      if (!f) throw ConfigError("unknown trigger family: " + name);
      families.insert(*f);
    }
    rules = builtin_rules(families);
  }
  if (!out_dir.empty()) {
    for (const auto& rule : rules) save_rule(rule, out_dir);
  }
  for (const auto& rule : rules) {
    std::cout << rule.rule_id << "  [" << to_string(rule.provenance.family) << " -> "
              << to_string(rule.target_component) << "]\n";
    std::cout << "  when:   " << rule.condition.description << "\n";
    std::cout << "  action: " << rule.action << "\n";
  }
  std::cout << rules.size() << " builtin rules\n";
  return 0;
}

int cmd_replay_verify(const std::string& cassette_path, const std::string& kb_path,
                      std::vector<std::string> bug_ids) {
  Cassette cassette = Cassette::load(cassette_path);
  BugRecordSet kb = load_knowledge_base(kb_path);
  GatewayConfig cfg;  // defaults mirror the bundled cassette recording setup

  if (bug_ids.empty()) {
    for (const auto& rec : kb.records)
      if (!rec.synthetic_text) bug_ids.push_back(rec.issue_id);
  }
  size_t missing = 0;
  for (const auto& id : bug_ids) {
    const BugRecord* record = kb.find(id);
    if (!record) throw ConfigError("unknown bug id: " + id);
    CompletionRequest extract_req = build_extraction_prompt(*record, cfg);
    bool has_extract = cassette.contains(extract_req);
    bool has_synth = false;
    if (has_extract) {
      // The synthesis prompt depends on the extraction output; replay it.
      try {
        std::vector<std::string> required = {"Key Trigger Components",
                                             "Pattern Rationale"};
        for (const auto& key : component_keys())
          required.push_back(std::string("Key Trigger Components.") + key.title);
        Json doc = parse_structured(cassette.lookup(extract_req), required);
        TriggerPattern pattern;
        pattern.bug_id = record->issue_id;
        for (const auto& key : component_keys()) {
          const auto& v = doc["Key Trigger Components"].at(key.title);
          pattern.components[key.snake] =
              v.is_string() ? v.get<std::string>() : v.dump();
        }
        pattern.rationale = doc["Pattern Rationale"].is_string()
                                ? doc["Pattern Rationale"].get<std::string>()
                                : doc["Pattern Rationale"].dump();
        pattern.bug_type = record->bug_type;
        pattern.root_cause = record->root_cause;
        pattern.trigger_family = record->trigger_family;
        pattern.low_confidence = record->synthetic_text;
        CompletionRequest synth_req = build_rule_prompt(pattern, *record, cfg, true);
        has_synth = cassette.contains(synth_req);
      } catch (const Error&) {
        has_synth = false;
      }
    }
    std::cout << id << ": extraction " << (has_extract ? "ok" : "MISSING")
              << ", synthesis " << (has_synth ? "ok" : "MISSING") << "\n";
    if (!has_extract || !has_synth) ++missing;
  }
  std::cout << (bug_ids.size() - missing) << "/" << bug_ids.size()
            << " records fully covered by the cassette\n";
  return missing == 0 ? 0 : 2;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"alignguard: mutation-based correctness-bug fuzzing for DL compilers"};
  app.require_subcommand(1);

  // stats
  std::string kb_path, format = "table";
  auto* stats = app.add_subcommand("stats", "Print knowledge-base category distribution");
  stats->add_option("--kb", kb_path, "Knowledge base directory")->required();
  stats->add_option("--format", format, "table | structured");

  // ingest
  std::string ingest_source, ingest_out, ingest_render;
  auto* ingest = app.add_subcommand("ingest", "Standardize raw test files into cases");
  ingest->add_option("--source", ingest_source, "Raw test file or directory")->required();
  ingest->add_option("--out", ingest_out, "Directory for standardized cases");
  ingest->add_option("--render-dir", ingest_render, "Directory for runnable renders");

  // gateway flags shared by extract/synthesize
  std::string gw_mode = "replay", gw_cassette, gw_endpoint, gw_model;
  double gw_temperature = 0.2;
  auto add_gateway_flags = [&](CLI::App* cmd) {
    cmd->add_option("--gateway-mode", gw_mode, "replay | record | live");
    cmd->add_option("--cassette", gw_cassette, "Cassette file for replay/record");
    cmd->add_option("--endpoint", gw_endpoint, "Chat-completion endpoint URL");
    cmd->add_option("--model", gw_model, "Model name");
    cmd->add_option("--temperature", gw_temperature, "Sampling temperature");
  };

  // extract
  std::vector<std::string> extract_bugs;
  std::string patterns_dir = "patterns";
  auto* extract = app.add_subcommand("extract", "Extract trigger patterns from records");
  extract->add_option("--kb", kb_path, "Knowledge base directory")->required();
  extract->add_option("--bug", extract_bugs, "Bug record ids")->required();
  extract->add_option("--patterns-dir", patterns_dir, "Pattern output directory");
  add_gateway_flags(extract);

  // synthesize
  std::vector<std::string> synth_bugs;
  std::string rules_out = "rules";
  bool allow_low_confidence = false;
  auto* synthesize = app.add_subcommand("synthesize", "Synthesize mutation rules");
  synthesize->add_option("--kb", kb_path, "Knowledge base directory")->required();
  synthesize->add_option("--bug", synth_bugs, "Bug record ids")->required();
  synthesize->add_option("--patterns-dir", patterns_dir, "Pattern input directory");
  synthesize->add_option("--rules-dir", rules_out, "Rule output directory");
  synthesize->add_flag("--allow-low-confidence", allow_low_confidence,
                       "Permit synthesis from synthetic-text patterns");
  add_gateway_flags(synthesize);

  // mutate
  std::string mutate_seeds, mutate_rules_dir, mutate_out = "mutants";
  bool mutate_builtin = false;
  std::vector<std::string> mutate_families;
  size_t mutate_budget = 100;
  std::uint64_t campaign_seed = 1;
  auto* mutate_cmd = app.add_subcommand("mutate", "Apply rules to standardized seeds");
  mutate_cmd->add_option("--seeds", mutate_seeds, "Directory of case documents")
      ->required();
  mutate_cmd->add_flag("--builtin", mutate_builtin, "Use the builtin rule library");
  mutate_cmd->add_option("--families", mutate_families,
                         "Restrict builtin rules to trigger families");
  mutate_cmd->add_option("--rules", mutate_rules_dir, "Directory of rule documents");
  mutate_cmd->add_option("--out", mutate_out, "Mutant output directory");
  mutate_cmd->add_option("--budget", mutate_budget, "Maximum valid mutants");
  mutate_cmd->add_option("--campaign-seed", campaign_seed, "Deterministic seed");

  // run
  std::string run_case, run_cases_dir, run_backend, run_out;
  double run_timeout = 120.0;
  auto* run_cmd = app.add_subcommand("run", "Execute cases on a backend");
  run_cmd->add_option("--case", run_case, "Single case document");
  run_cmd->add_option("--cases", run_cases_dir, "Directory of case documents");
  run_cmd->add_option("--backend", run_backend, "Backend spec document")->required();
  run_cmd->add_option("--out", run_out, "Directory for execution results");
  run_cmd->add_option("--timeout", run_timeout, "Per-execution timeout seconds");

  // campaign
  std::string campaign_config;
  std::vector<std::string> campaign_set;
  auto* campaign = app.add_subcommand("campaign", "Run the full pipeline");
  campaign->add_option("--config", campaign_config, "Campaign config document")
      ->required();
  campaign->add_option("--set", campaign_set,
                       "Override a top-level config key: key=json_value");

  // eval-detection
  std::string tests_dir, env_buggy, env_fixed;
  auto* eval = app.add_subcommand("eval-detection",
                                  "Evaluate the detection criterion over an env pair");
  eval->add_option("--tests", tests_dir, "Directory of case documents")->required();
  eval->add_option("--env-buggy", env_buggy, "Buggy backend spec")->required();
  eval->add_option("--env-fixed", env_fixed, "Fixed backend spec")->required();
  eval->add_option("--format", format, "table | structured");
  eval->add_option("--timeout", run_timeout, "Per-execution timeout seconds");

  // rules dump
  auto* rules_cmd = app.add_subcommand("rules", "Rule library operations");
  rules_cmd->require_subcommand(1);
  std::vector<std::string> dump_families;
  std::string dump_out;
  auto* rules_dump = rules_cmd->add_subcommand("dump", "Print the builtin rule library");
  rules_dump->add_option("--families", dump_families, "Trigger families to include");
  rules_dump->add_option("--out", dump_out, "Directory to persist rule documents");

  // replay verify
  auto* replay = app.add_subcommand("replay", "Cassette operations");
  replay->require_subcommand(1);
  std::string verify_cassette, verify_kb;
  std::vector<std::string> verify_bugs;
  auto* replay_verify =
      replay->add_subcommand("verify", "Check cassette coverage for records");
  replay_verify->add_option("--cassette", verify_cassette, "Cassette file")->required();
  replay_verify->add_option("--kb", verify_kb, "Knowledge base directory")->required();
  replay_verify->add_option("--bug", verify_bugs, "Bug ids (default: non-synthetic)");

  std::vector<const char*> argv;
  argv.push_back("alignguard");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (stats->parsed()) return cmd_stats(kb_path, format);
    if (ingest->parsed()) return cmd_ingest(ingest_source, ingest_out, ingest_render);
    if (extract->parsed()) {
      return cmd_extract(kb_path, extract_bugs, patterns_dir,
                         gateway_from_flags(gw_mode, gw_cassette, gw_endpoint, gw_model,
                                            gw_temperature));
    }
    if (synthesize->parsed()) {
      return cmd_synthesize(kb_path, synth_bugs, patterns_dir, rules_out,
                            gateway_from_flags(gw_mode, gw_cassette, gw_endpoint,
                                               gw_model, gw_temperature),
                            allow_low_confidence);
    }
    if (mutate_cmd->parsed()) {
      return cmd_mutate(mutate_seeds, mutate_rules_dir, mutate_builtin, mutate_families,
                        mutate_out, mutate_budget, campaign_seed);
    }
    if (run_cmd->parsed())
      return cmd_run(run_case, run_cases_dir, run_backend, run_out, run_timeout);
    if (campaign->parsed()) {
      std::vector<std::pair<std::string, std::string>> overrides;
      for (const auto& kv : campaign_set) {
        auto eq = kv.find('=');
        if (eq == std::string::npos)
          throw ConfigError("--set expects key=value, got: " + kv);
        overrides.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
      }
      return cmd_campaign(campaign_config, overrides);
    }
    if (eval->parsed())
      return cmd_eval_detection(tests_dir, env_buggy, env_fixed, format, run_timeout);
    if (rules_dump->parsed()) return cmd_rules_dump(dump_families, dump_out);
    if (replay_verify->parsed())
      return cmd_replay_verify(verify_cassette, verify_kb, verify_bugs);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const StageError& e) {
    std::cerr << "stage failure: " << e.what() << "\n";
    return 2;
  } catch (const InfraError& e) {
    std::cerr << "infrastructure failure: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace alignguard::cli
