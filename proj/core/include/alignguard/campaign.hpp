#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "alignguard/backend.hpp"
#include "alignguard/llm_gateway.hpp"
#include "alignguard/tensor_value.hpp"
#include "alignguard/util.hpp"

namespace alignguard {

struct CampaignBudget {
  size_t max_mutants = 120;
  size_t max_executions = 500;
  double wall_clock_cap_seconds = 0;  // 0 = unlimited
};

struct CampaignConfig {
  std::filesystem::path knowledge_base;
  std::vector<std::filesystem::path> seed_sources;
  GatewayConfig gateway;
  bool use_builtin_rules = true;
  std::set<TriggerFamily> builtin_families;  // empty = all
  bool use_llm_rules = false;
  std::vector<std::string> llm_bug_ids;
  bool allow_low_confidence = false;
  Json backend_spec;  // ExecutionBackend document; defaults to a clean simulator
  ToleranceSpec tolerances = ToleranceSpec::defaults();
  CampaignBudget budget;
  std::uint64_t campaign_seed = 1;
  std::filesystem::path output_dir;
  int worker_pool = 2;
  double timeout_seconds = 120.0;

  Json to_json() const;
  static CampaignConfig from_json(const Json& doc);
  void validate() const;  // throws ConfigError
  std::string config_hash() const;
};

struct CampaignSummary {
  std::map<std::string, size_t> by_classification;
  std::map<std::string, size_t> candidates_by_family;
  // signature -> {size, representative, defect attribution}
  Json clusters = Json::array();
  size_t seeds_total = 0;
  size_t seeds_healthy = 0;
  size_t seeds_quarantined = 0;
  size_t mutants_total = 0;
  size_t executions = 0;

  Json to_json() const;
  static CampaignSummary from_json(const Json& doc);
};

// Full pipeline: load knowledge -> ingest + verify seeds -> rules (builtin
// and optionally llm) -> batch mutate -> execute -> classify -> dedup ->
// reports. All stage outputs persist under config.output_dir; an
// interrupted campaign resumes without re-executing completed items.
CampaignSummary run_campaign(const CampaignConfig& config);

}  // namespace alignguard
