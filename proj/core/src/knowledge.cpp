#include "alignguard/knowledge.hpp"

#include <algorithm>
#include <chrono>
#include <set>
#include <sstream>

#include "alignguard/json.hpp"

#include "alignguard/errors.hpp"

namespace alignguard {

namespace fs = std::filesystem;

bool VersionRange::contains(const std::string& version) const {
  if (!min_version.empty() && compare_versions(version, min_version) < 0) return false;
  if (!max_version.empty() && compare_versions(version, max_version) > 0) return false;
  return true;
}

Json BugRecord::to_json() const {
  Json doc;
  doc["issue_id"] = issue_id;
  doc["title"] = title;
  doc["issue_text"] = issue_text;
  doc["fix_commit"] = fix_commit;
  doc["bug_type"] = to_string(bug_type);
  doc["root_cause"] = to_string(root_cause);
  doc["trigger_family"] = to_string(trigger_family);
  if (affected_versions) {
    doc["affected_versions"] = {{"min", affected_versions->min_version},
                                {"max", affected_versions->max_version}};
  } else {
    doc["affected_versions"] = nullptr;
  }
  doc["provenance_url"] = provenance_url ? Json(*provenance_url) : Json(nullptr);
  doc["synthetic_text"] = synthetic_text;
  return doc;
}

BugRecord BugRecord::from_json(const Json& doc, const std::string& what) {
  BugRecord rec;
  auto need = [&](const char* field) -> const Json& {
    if (!doc.contains(field))
      throw FormatError(what + ": missing field '" + field + "'");
    return doc.at(field);
  };
  rec.issue_id = need("issue_id").get<std::string>();
  rec.title = doc.value("title", "");
  rec.issue_text = need("issue_text").get<std::string>();
  rec.fix_commit = doc.value("fix_commit", "");

  auto type_str = need("bug_type").get<std::string>();
  auto cause_str = need("root_cause").get<std::string>();
  auto family_str = need("trigger_family").get<std::string>();
  auto type = bug_type_from_string(type_str);
  if (!type) throw TaxonomyError(what + ": unknown bug_type '" + type_str + "'");
  auto cause = root_cause_from_string(cause_str);
  if (!cause) throw TaxonomyError(what + ": unknown root_cause '" + cause_str + "'");
  auto family = trigger_family_from_string(family_str);
  if (!family)
    throw TaxonomyError(what + ": unknown trigger_family '" + family_str + "'");
  rec.bug_type = *type;
  rec.root_cause = *cause;
  rec.trigger_family = *family;

  if (doc.contains("affected_versions") && !doc["affected_versions"].is_null()) {
    VersionRange range;
    range.min_version = doc["affected_versions"].value("min", "");
    range.max_version = doc["affected_versions"].value("max", "");
    rec.affected_versions = range;
  }
  if (doc.contains("provenance_url") && !doc["provenance_url"].is_null())
    rec.provenance_url = doc["provenance_url"].get<std::string>();
  rec.synthetic_text = doc.value("synthetic_text", false);
  return rec;
}

const BugRecord* BugRecordSet::find(const std::string& issue_id) const {
  for (const auto& r : records)
    if (r.issue_id == issue_id) return &r;
  return nullptr;
}

std::vector<std::string> validate_record(const BugRecord& record,
                                         const Taxonomy& taxonomy) {
  std::vector<std::string> violations;
  if (record.issue_id.empty()) violations.push_back("issue_id is empty");
  if (trim(record.issue_text).empty()) violations.push_back("issue_text is empty");
  if (!taxonomy.cause_allowed(record.bug_type, record.root_cause)) {
    violations.push_back("root_cause '" + to_string(record.root_cause) +
                         "' is not legal under bug_type '" +
                         to_string(record.bug_type) + "'");
  }
  if (!taxonomy.family_allowed(record.bug_type, record.trigger_family)) {
    violations.push_back("trigger_family '" + to_string(record.trigger_family) +
                         "' is not legal under bug_type '" +
                         to_string(record.bug_type) + "'");
  }
  return violations;
}

BugRecordSet load_knowledge_base(const fs::path& path) {
  if (!fs::exists(path))
    throw ConfigError("knowledge base path does not exist: " + path.string());

  BugRecordSet set;
  set.source_path = path;
  {
    auto now = std::chrono::system_clock::now();
    auto t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    set.load_timestamp = buf;
  }

  fs::path index_path = path / "index.json";
  std::vector<std::string> ids;
  if (fs::exists(index_path)) {
    Json index = load_json_file(index_path);
    if (!index.contains("records") || !index["records"].is_array())
      throw FormatError("index.json: expected a 'records' array");
    for (const auto& id : index["records"]) ids.push_back(id.get<std::string>());
  } else {
    // No index: an empty directory is an empty set; records/ without an
    // index is loaded in filename order.
    fs::path records_dir = path / "records";
    if (fs::exists(records_dir)) {
      for (const auto& entry : fs::directory_iterator(records_dir)) {
        if (entry.path().extension() == ".json")
          ids.push_back(entry.path().stem().string());
      }
      std::sort(ids.begin(), ids.end());
    }
  }

  const auto& taxonomy = Taxonomy::instance();
  std::set<std::string> seen;
  size_t idx = 0;
  for (const auto& id : ids) {
    fs::path rec_path = path / "records" / (id + ".json");
    std::string what = "record #" + std::to_string(idx) + " (" + id + ")";
    if (!fs::exists(rec_path))
      throw FormatError(what + ": file missing: " + rec_path.string());
    BugRecord rec = BugRecord::from_json(load_json_file(rec_path), what);
    if (rec.issue_id != id)
      throw FormatError(what + ": issue_id '" + rec.issue_id +
                        "' does not match filename");
    if (!seen.insert(rec.issue_id).second)
      throw FormatError(what + ": duplicate issue_id");
    auto violations = validate_record(rec, taxonomy);
    if (!violations.empty())
      throw TaxonomyError(what + ": " + violations.front());
    set.records.push_back(std::move(rec));
    ++idx;
  }
  return set;
}

void save_knowledge_base(const BugRecordSet& set, const fs::path& path) {
  fs::create_directories(path / "records");
  Json index;
  index["records"] = Json::array();
  for (const auto& rec : set.records) {
    index["records"].push_back(rec.issue_id);
    save_json_file(path / "records" / (rec.issue_id + ".json"), rec.to_json());
  }
  save_json_file(path / "index.json", index);
}

double CategoryDistribution::fraction(BugType t) const {
  auto it = by_type.find(t);
  if (it == by_type.end() || total == 0) return 0.0;
  return static_cast<double>(it->second) / static_cast<double>(total);
}

Json CategoryDistribution::to_json() const {
  Json doc;
  doc["total"] = total;
  Json types = Json::object();
  for (const auto& [t, n] : by_type) {
    types[to_string(t)] = {{"count", n},
                           {"fraction", fraction(t)}};
  }
  doc["bug_types"] = types;
  Json groups = Json::object();
  for (const auto& [g, n] : by_group) groups[to_string(g)] = n;
  doc["groups"] = groups;
  Json families = Json::object();
  for (const auto& [f, n] : by_family) families[to_string(f)] = n;
  doc["trigger_families"] = families;
  return doc;
}

std::string CategoryDistribution::to_table() const {
  std::ostringstream out;
  const auto& tax = Taxonomy::instance();
  out << "bug type       count  fraction  group\n";
  out << "---------      -----  --------  -----\n";
  for (BugType t : tax.bug_types()) {
    auto it = by_type.find(t);
    size_t n = it == by_type.end() ? 0 : it->second;
    char frac[16];
    std::snprintf(frac, sizeof(frac), "%.4f", fraction(t));
    out << to_string(t);
    for (size_t i = to_string(t).size(); i < 15; ++i) out << ' ';
    std::string count = std::to_string(n);
    for (size_t i = count.size(); i < 5; ++i) out << ' ';
    out << count << "  " << frac << "    " << to_string(tax.group_of(t)) << "\n";
  }
  out << "\ngroup totals: ";
  bool first = true;
  for (const auto& [g, n] : by_group) {
    if (!first) out << ", ";
    out << to_string(g) << " = " << n;
    first = false;
  }
  out << "\ntotal records: " << total << "\n";
  return out.str();
}

CategoryDistribution taxonomy_stats(const BugRecordSet& set) {
  if (set.records.empty())
    throw PreconditionError("taxonomy_stats: empty record set");
  const auto& tax = Taxonomy::instance();
  CategoryDistribution dist;
  dist.total = set.records.size();
  for (const auto& rec : set.records) {
    dist.by_type[rec.bug_type]++;
    dist.by_group[tax.group_of(rec.bug_type)]++;
    dist.by_family[rec.trigger_family]++;
  }
  return dist;
}

}  // namespace alignguard
