#include "alignguard/extractor.hpp"

#include <sstream>

#include "alignguard/errors.hpp"
#include "alignguard/json.hpp"

namespace alignguard {

const std::array<ComponentKey, 4>& component_keys() {
  static const std::array<ComponentKey, 4> keys{{
      {"model_structures", "Model Structures"},
      {"input_features", "Input Features"},
      {"compilation_arguments", "Compilation Arguments"},
      {"testing_pipeline", "Testing Pipeline"},
  }};
  return keys;
}

std::vector<std::string> TriggerPattern::validate(const BugRecord& source) const {
  std::vector<std::string> violations;
  size_t applicable = 0;
  for (const auto& key : component_keys()) {
    auto it = components.find(key.snake);
    if (it == components.end()) {
      violations.push_back(std::string("missing component key: ") + key.snake);
      continue;
    }
    if (trim(it->second) != kNotApplicable && !trim(it->second).empty()) ++applicable;
  }
  if (applicable == 0)
    violations.push_back("all four components are not-applicable");
  if (bug_type != source.bug_type || root_cause != source.root_cause ||
      trigger_family != source.trigger_family)
    violations.push_back("echoed labels differ from the source record");
  if (bug_id != source.issue_id) violations.push_back("bug_id mismatch");
  return violations;
}

Json TriggerPattern::to_json() const {
  Json doc;
  doc["bug_id"] = bug_id;
  Json comp = Json::object();
  for (const auto& [key, value] : components) comp[key] = value;
  doc["components"] = comp;
  doc["rationale"] = rationale;
  doc["labels"] = {{"bug_type", to_string(bug_type)},
                   {"root_cause", to_string(root_cause)},
                   {"trigger_family", to_string(trigger_family)}};
  doc["low_confidence"] = low_confidence;
  return doc;
}

TriggerPattern TriggerPattern::from_json(const Json& doc) {
  TriggerPattern p;
  p.bug_id = doc.at("bug_id").get<std::string>();
  for (const auto& [key, value] : doc.at("components").items())
    p.components[key] = value.get<std::string>();
  p.rationale = doc.value("rationale", "");
  const auto& labels = doc.at("labels");
  auto type = bug_type_from_string(labels.value("bug_type", ""));
  auto cause = root_cause_from_string(labels.value("root_cause", ""));
  auto family = trigger_family_from_string(labels.value("trigger_family", ""));
  if (!type || !cause || !family)
    throw FormatError("pattern document with unknown taxonomy labels");
  p.bug_type = *type;
  p.root_cause = *cause;
  p.trigger_family = *family;
  p.low_confidence = doc.value("low_confidence", false);
  return p;
}

CompletionRequest build_extraction_prompt(const BugRecord& record,
                                          const GatewayConfig& config) {
  std::ostringstream user;
  user << "Task: Analyze the historical compiler correctness bug below and "
          "summarize a case-specific bug-triggering pattern for it.\n\n";
  user << "Input:\n";
  user << "Issue Report (verbatim):\n<<<ISSUE\n" << record.issue_text << "\nISSUE\n\n";
  user << "Fixing Commit (verbatim):\n<<<COMMIT\n"
       << (trim(record.fix_commit).empty() ? "unavailable" : record.fix_commit)
       << "\nCOMMIT\n\n";
  user << "Bug Type Category: " << to_string(record.bug_type) << "\n";
  user << "Bug-Triggering Pattern Category: " << to_string(record.trigger_family)
       << "\n";
  user << "Root Cause Category: " << to_string(record.root_cause) << "\n\n";
  user << "Output (a single JSON object):\n";
  user << "{\n  \"Key Trigger Components\": {\n";
  for (size_t i = 0; i < component_keys().size(); ++i) {
    user << "    \"" << component_keys()[i].title << "\": \"...\""
         << (i + 1 < component_keys().size() ? "," : "") << "\n";
  }
  user << "  },\n  \"Pattern Rationale\": \"...\"\n}\n\n";
  user << "Guidelines:\n";
  user << "- Identify the critical components that contribute to this bug and "
          "map them into the provided components.\n";
  user << "- Use \"" << kNotApplicable
       << "\" for a component that plays no role in triggering the bug.\n";
  user << "- Keep each component description concrete and test-writable.\n";

  CompletionRequest req;
  req.model_name = config.model_name;
  req.temperature = config.temperature;
  req.system_text =
      "You are an expert on deep-learning compiler correctness bugs. "
      "You produce precise, structured analyses of bug reports.";
  req.user_text = user.str();
  req.stage = "extract:" + record.issue_id;
  return req;
}

TriggerPattern extract_pattern(const BugRecord& record, Gateway& gateway) {
  CompletionRequest req = build_extraction_prompt(record, gateway.config());

  std::vector<std::string> required = {"Key Trigger Components", "Pattern Rationale"};
  for (const auto& key : component_keys())
    required.push_back(std::string("Key Trigger Components.") + key.title);

  Json doc = gateway.complete_structured(req, required);

  TriggerPattern pattern;
  pattern.bug_id = record.issue_id;
  const auto& comps = doc["Key Trigger Components"];
  for (const auto& key : component_keys()) {
    const auto& v = comps.at(key.title);
    pattern.components[key.snake] = v.is_string() ? v.get<std::string>() : v.dump();
  }
  const auto& rationale = doc["Pattern Rationale"];
  pattern.rationale = rationale.is_string() ? rationale.get<std::string>() : rationale.dump();
  pattern.bug_type = record.bug_type;
  pattern.root_cause = record.root_cause;
  pattern.trigger_family = record.trigger_family;
  pattern.low_confidence = record.synthetic_text;

  auto violations = pattern.validate(record);
  if (!violations.empty())
    throw StageError("extract:" + record.issue_id,
                     violations.front() + " (raw completion attached: " +
                         doc.dump().substr(0, 500) + ")");
  return pattern;
}

void save_pattern(const TriggerPattern& pattern, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  save_json_file(dir / (pattern.bug_id + ".json"), pattern.to_json());
}

TriggerPattern load_pattern(const std::filesystem::path& dir, const std::string& bug_id) {
  return TriggerPattern::from_json(load_json_file(dir / (bug_id + ".json")));
}

}  // namespace alignguard
