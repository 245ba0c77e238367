#include "alignguard/campaign.hpp"

#include <atomic>
#include <chrono>
#include <mutex>
#include <thread>

#include "alignguard/corpus.hpp"
#include "alignguard/errors.hpp"
#include "alignguard/extractor.hpp"
#include "alignguard/json.hpp"
#include "alignguard/knowledge.hpp"
#include "alignguard/mutator.hpp"
#include "alignguard/synthesizer.hpp"
#include "alignguard/triage.hpp"

namespace alignguard {

namespace fs = std::filesystem;

Json CampaignConfig::to_json() const {
  Json doc;
  doc["knowledge_base"] = knowledge_base.string();
  Json sources = Json::array();
  for (const auto& s : seed_sources) sources.push_back(s.string());
  doc["seed_sources"] = sources;
  doc["gateway"] = gateway.to_json();
  doc["use_builtin_rules"] = use_builtin_rules;
  Json families = Json::array();
  for (auto f : builtin_families) families.push_back(to_string(f));
  doc["builtin_families"] = families;
  doc["use_llm_rules"] = use_llm_rules;
  doc["llm_bug_ids"] = llm_bug_ids;
  doc["allow_low_confidence"] = allow_low_confidence;
  doc["backend"] = backend_spec;
  doc["tolerances"] = tolerances.to_json();
  doc["budget"] = {{"max_mutants", budget.max_mutants},
                   {"max_executions", budget.max_executions},
                   {"wall_clock_cap_seconds", budget.wall_clock_cap_seconds}};
  doc["campaign_seed"] = campaign_seed;
  doc["output_dir"] = output_dir.string();
  doc["worker_pool"] = worker_pool;
  doc["timeout_seconds"] = timeout_seconds;
  return doc;
}

CampaignConfig CampaignConfig::from_json(const Json& doc) {
  CampaignConfig cfg;
  cfg.knowledge_base = doc.value("knowledge_base", "");
  for (const auto& s : doc.value("seed_sources", Json::array()))
    cfg.seed_sources.emplace_back(s.get<std::string>());
  if (doc.contains("gateway")) cfg.gateway = GatewayConfig::from_json(doc["gateway"]);
  cfg.use_builtin_rules = doc.value("use_builtin_rules", true);
  for (const auto& f : doc.value("builtin_families", Json::array())) {
    auto family = trigger_family_from_string(f.get<std::string>());
    if (!family) throw ConfigError("unknown trigger family: " + f.dump());
    cfg.builtin_families.insert(*family);
  }
  cfg.use_llm_rules = doc.value("use_llm_rules", false);
  cfg.llm_bug_ids = doc.value("llm_bug_ids", std::vector<std::string>{});
  cfg.allow_low_confidence = doc.value("allow_low_confidence", false);
  cfg.backend_spec = doc.value("backend", Json::object());
  if (doc.contains("tolerances"))
    cfg.tolerances = ToleranceSpec::from_json(doc["tolerances"]);
  if (doc.contains("budget")) {
    const auto& b = doc["budget"];
    cfg.budget.max_mutants = b.value("max_mutants", cfg.budget.max_mutants);
    cfg.budget.max_executions = b.value("max_executions", cfg.budget.max_executions);
    cfg.budget.wall_clock_cap_seconds =
        b.value("wall_clock_cap_seconds", cfg.budget.wall_clock_cap_seconds);
  }
  cfg.campaign_seed = doc.value("campaign_seed", 1ULL);
  cfg.output_dir = doc.value("output_dir", "");
  cfg.worker_pool = doc.value("worker_pool", 2);
  cfg.timeout_seconds = doc.value("timeout_seconds", 120.0);
  return cfg;
}

void CampaignConfig::validate() const {
  if (knowledge_base.empty()) throw ConfigError("campaign: knowledge_base is required");
  if (seed_sources.empty()) throw ConfigError("campaign: seed_sources is required");
  if (output_dir.empty()) throw ConfigError("campaign: output_dir is required");
  if (budget.max_mutants == 0 || budget.max_executions == 0)
    throw ConfigError("campaign: budget must be positive");
  if (worker_pool < 1) throw ConfigError("campaign: worker_pool must be >= 1");
  if (timeout_seconds <= 0) throw ConfigError("campaign: timeout must be positive");
  if (use_llm_rules && llm_bug_ids.empty())
    throw ConfigError("campaign: use_llm_rules requires llm_bug_ids");
}

std::string CampaignConfig::config_hash() const {
  Json doc = to_json();
  doc.erase("output_dir");  // relocating a run directory is allowed
  return short_hash(canonical_dump(doc));
}

Json CampaignSummary::to_json() const {
  Json doc;
  Json cls = Json::object();
  for (const auto& [k, v] : by_classification) cls[k] = v;
  doc["by_classification"] = cls;
  Json fam = Json::object();
  for (const auto& [k, v] : candidates_by_family) fam[k] = v;
  doc["candidates_by_family"] = fam;
  doc["clusters"] = clusters;
  doc["seeds_total"] = seeds_total;
  doc["seeds_healthy"] = seeds_healthy;
  doc["seeds_quarantined"] = seeds_quarantined;
  doc["mutants_total"] = mutants_total;
  doc["executions"] = executions;
  return doc;
}

CampaignSummary CampaignSummary::from_json(const Json& doc) {
  CampaignSummary s;
  for (const auto& [k, v] : doc.value("by_classification", Json::object()).items())
    s.by_classification[k] = v.get<size_t>();
  for (const auto& [k, v] : doc.value("candidates_by_family", Json::object()).items())
    s.candidates_by_family[k] = v.get<size_t>();
  s.clusters = doc.value("clusters", Json::array());
  s.seeds_total = doc.value("seeds_total", 0u);
  s.seeds_healthy = doc.value("seeds_healthy", 0u);
  s.seeds_quarantined = doc.value("seeds_quarantined", 0u);
  s.mutants_total = doc.value("mutants_total", 0u);
  s.executions = doc.value("executions", 0u);
  return s;
}

namespace {

bool stage_done(const fs::path& dir, const std::string& stage) {
  return fs::exists(dir / "stages" / (stage + ".done"));
}

void mark_stage(const fs::path& dir, const std::string& stage) {
  atomic_write_file(dir / "stages" / (stage + ".done"), "done\n");
}

std::optional<TriggerFamily> family_of_rule(const std::vector<MutationRule>& rules,
                                            const std::string& rule_id) {
  for (const auto& rule : rules) {
    if (rule.rule_id == rule_id && rule.is_builtin()) return rule.provenance.family;
  }
  return std::nullopt;
}

}  // namespace

CampaignSummary run_campaign(const CampaignConfig& config) {
  config.validate();
  const fs::path& out = config.output_dir;
  fs::create_directories(out / "stages");

  // Manifest: pins the config; resuming with a different config is refused.
  fs::path manifest_path = out / "manifest.json";
  if (fs::exists(manifest_path)) {
    Json manifest = load_json_file(manifest_path);
    if (manifest.value("config_hash", "") != config.config_hash())
      throw ConfigError("output dir belongs to a campaign with a different config");
  } else {
    Json manifest;
    manifest["config"] = config.to_json();
    manifest["config_hash"] = config.config_hash();
    manifest["campaign_seed"] = config.campaign_seed;
    manifest["artifact"] = "alignguard 0.1.0";
    manifest["worker_protocol"] = 1;
    save_json_file(manifest_path, manifest);
  }

  const auto t_start = std::chrono::steady_clock::now();
  auto wall_exceeded = [&]() {
    if (config.budget.wall_clock_cap_seconds <= 0) return false;
    double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
            .count();
    return elapsed > config.budget.wall_clock_cap_seconds;
  };

  ExecutionBackend backend = config.backend_spec.empty()
                                 ? configure_simulator(std::set<DefectClass>{})
                                 : ExecutionBackend::from_json(config.backend_spec);
  RunOptions run_opts;
  run_opts.timeout_seconds = config.timeout_seconds;

  // Stage 0: knowledge base (loaded fresh each run; cheap and read-only).
  BugRecordSet kb = load_knowledge_base(config.knowledge_base);

  // Stage 1: ingest + verify seeds.
  fs::path seeds_dir = out / "seeds";
  if (!stage_done(out, "seeds")) {
    fs::create_directories(seeds_dir / "cases");
    IngestReport report;
    for (const auto& source : config.seed_sources) {
      IngestReport part = ingest_seeds(source);
      report.cases.insert(report.cases.end(), part.cases.begin(), part.cases.end());
      report.rejections.insert(report.rejections.end(), part.rejections.begin(),
                               part.rejections.end());
    }
    Json health = Json::object();
    for (const auto& tc : report.cases) {
      save_test_case(tc, seeds_dir / "cases" / (tc.id + ".json"));
      SeedVerification v = verify_seed(tc, backend, config.tolerances, run_opts);
      health[tc.id] = {{"healthy", v.healthy},
                       {"status", to_string(v.result.status)}};
    }
    save_json_file(seeds_dir / "ingest_report.json", report.to_json());
    save_json_file(seeds_dir / "health.json", health);
    mark_stage(out, "seeds");
  }
  std::vector<TestCase> seeds_all = load_cases_dir(seeds_dir / "cases");
  Json health = load_json_file(seeds_dir / "health.json");
  std::vector<TestCase> seeds;
  size_t quarantined = 0;
  for (const auto& tc : seeds_all) {
    if (health.value(tc.id, Json::object()).value("healthy", false)) {
      seeds.push_back(tc);
    } else {
      ++quarantined;
    }
  }

  // Stage 2: rules.
  fs::path rules_dir = out / "rules";
  std::shared_ptr<Gateway> gateway;
  if (!stage_done(out, "rules")) {
    fs::create_directories(rules_dir);
    std::vector<MutationRule> rules;
    if (config.use_builtin_rules) {
      rules = config.builtin_families.empty() ? builtin_rules()
                                              : builtin_rules(config.builtin_families);
    }
    if (config.use_llm_rules) {
      gateway = Gateway::configure(config.gateway);
      fs::path patterns_dir = out / "patterns";
      for (const auto& bug_id : config.llm_bug_ids) {
        const BugRecord* record = kb.find(bug_id);
        if (!record) throw ConfigError("campaign: unknown bug id " + bug_id);
        TriggerPattern pattern = extract_pattern(*record, *gateway);
        save_pattern(pattern, patterns_dir);
        SynthesisOutcome synth =
            synthesize_rules(pattern, *record, *gateway, config.allow_low_confidence);
        for (const auto& rule : synth.rules) rules.push_back(rule);
        if (!synth.dropped.empty()) {
          Json dropped = Json::array();
          for (const auto& [key, why] : synth.dropped)
            dropped.push_back({{"rule", key}, {"reason", why}});
          save_json_file(out / "patterns" / (bug_id + ".dropped.json"), dropped);
        }
      }
    }
    for (const auto& rule : rules) save_rule(rule, rules_dir);
    mark_stage(out, "rules");
  }
  std::vector<MutationRule> rules = load_rules_dir(rules_dir);

  // Stage 3: mutants.
  fs::path mutants_dir = out / "mutants";
  if (!stage_done(out, "mutants")) {
    fs::create_directories(mutants_dir);
    if (config.use_llm_rules && !gateway)
      gateway = Gateway::configure(config.gateway);
    BatchResult batch = batch_mutate(rules, seeds, config.budget.max_mutants,
                                     config.campaign_seed, gateway.get());
    Json log = Json::array();
    for (const auto& e : batch.log) {
      log.push_back({{"rule_id", e.rule_id},
                     {"seed_id", e.seed_id},
                     {"event", e.event},
                     {"detail", e.detail}});
    }
    Json order = Json::array();
    for (const auto& m : batch.mutants) {
      save_json_file(mutants_dir / (m.test_case.id + ".json"), m.to_json());
      atomic_write_file(mutants_dir / (m.test_case.id + ".diff"), m.diff);
      order.push_back(m.test_case.id);
    }
    save_json_file(mutants_dir / "log.json", log);
    save_json_file(mutants_dir / "order.json", order);
    mark_stage(out, "mutants");
  }
  std::vector<Mutant> mutants;
  {
    Json order = load_json_file(mutants_dir / "order.json");
    for (const auto& id : order) {
      mutants.push_back(
          Mutant::from_json(load_json_file(mutants_dir / (id.get<std::string>() + ".json"))));
    }
  }

  // Stage 4: executions (per-item resumable; only valid mutants run).
  fs::path results_dir = out / "results";
  fs::create_directories(results_dir);
  {
    std::vector<const Mutant*> pending;
    size_t planned = 0;
    for (const auto& m : mutants) {
      if (m.validity.status != ValidationVerdict::Status::Valid) continue;
      if (planned >= config.budget.max_executions) break;
      ++planned;
      if (!fs::exists(results_dir / (m.test_case.id + ".json")))
        pending.push_back(&m);
    }
    std::mutex io_mutex;
    std::atomic<size_t> cursor{0};
    auto worker = [&]() {
      while (true) {
        if (wall_exceeded()) return;
        size_t i = cursor.fetch_add(1);
        if (i >= pending.size()) return;
        const Mutant& m = *pending[i];
        ExecutionResult res = run_test(m.test_case, backend, config.tolerances, run_opts);
        std::lock_guard<std::mutex> lock(io_mutex);
        save_json_file(results_dir / (m.test_case.id + ".json"), res.to_json());
      }
    };
    int pool = std::max(1, config.worker_pool);
    std::vector<std::thread> threads;
    for (int i = 0; i < pool; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (wall_exceeded())
      throw StageError("execute", "wall clock budget exceeded; rerun to resume");
  }

  // Stage 5: triage + summary.
  std::vector<Verdict> verdicts;
  size_t executions = 0;
  for (const auto& m : mutants) {
    if (m.validity.status != ValidationVerdict::Status::Valid) continue;
    fs::path res_path = results_dir / (m.test_case.id + ".json");
    if (!fs::exists(res_path)) continue;  // beyond the execution budget
    ++executions;
    ExecutionResult res = ExecutionResult::from_json(load_json_file(res_path));
    std::optional<TriggerFamily> family =
        m.test_case.applied_rule_id ? family_of_rule(rules, *m.test_case.applied_rule_id)
                                    : std::nullopt;
    verdicts.push_back(classify(m.test_case, res, family, m.diff));
  }
  std::vector<Cluster> clusters = dedup(verdicts);

  fs::path reports_dir = out / "reports";
  fs::create_directories(reports_dir);
  for (const auto& cluster : clusters) {
    atomic_write_file(reports_dir / (cluster.signature + ".txt"),
                      render_report(cluster));
  }

  CampaignSummary summary;
  summary.seeds_total = seeds_all.size();
  summary.seeds_healthy = seeds.size();
  summary.seeds_quarantined = quarantined;
  summary.mutants_total = mutants.size();
  summary.executions = executions;
  for (const auto& v : verdicts) {
    summary.by_classification[to_string(v.classification)]++;
    if (v.classification == Classification::CorrectnessBugCandidate && v.rule_family)
      summary.candidates_by_family[to_string(*v.rule_family)]++;
  }
  for (const auto& cluster : clusters) {
    std::set<std::string> fired;
    for (const auto& member : cluster.members)
      for (const auto& d : member.result.defects_fired) fired.insert(d);
    Json entry;
    entry["signature"] = cluster.signature;
    entry["size"] = cluster.members.size();
    entry["representative"] = cluster.rep().test_case.id;
    entry["rule_family"] =
        cluster.rep().rule_family ? Json(to_string(*cluster.rep().rule_family)) : Json(nullptr);
    entry["defects_fired"] = std::vector<std::string>(fired.begin(), fired.end());
    summary.clusters.push_back(entry);
  }
  Json verdicts_doc = Json::array();
  for (const auto& v : verdicts) verdicts_doc.push_back(v.to_json());
  save_json_file(out / "verdicts.json", verdicts_doc);
  save_json_file(out / "summary.json", summary.to_json());
  mark_stage(out, "triage");
  return summary;
}

}  // namespace alignguard
