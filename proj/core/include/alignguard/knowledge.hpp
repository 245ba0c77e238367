#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "alignguard/taxonomy.hpp"
#include "alignguard/util.hpp"

namespace alignguard {

struct VersionRange {
  std::string min_version;  // inclusive; empty = unbounded
  std::string max_version;  // inclusive; empty = unbounded
  bool contains(const std::string& version) const;
};

// One historical correctness bug: issue text, fix diff, taxonomy labels.
struct BugRecord {
  std::string issue_id;
  std::string title;
  std::string issue_text;
  std::string fix_commit;  // unified diff, possibly empty
  BugType bug_type = BugType::GSC;
  RootCause root_cause = RootCause::IncompleteSymbolicTracing;
  TriggerFamily trigger_family = TriggerFamily::NonComputationalOps;
  std::optional<VersionRange> affected_versions;
  std::optional<std::string> provenance_url;
  // True when the body is a curated summary rather than a quotable record.
  bool synthetic_text = false;

  Json to_json() const;
  static BugRecord from_json(const Json& doc, const std::string& what);
};

struct BugRecordSet {
  std::vector<BugRecord> records;
  std::filesystem::path source_path;
  std::string load_timestamp;

  const BugRecord* find(const std::string& issue_id) const;
  size_t size() const { return records.size(); }
};

struct CategoryDistribution {
  std::map<BugType, size_t> by_type;
  std::map<BugGroup, size_t> by_group;
  std::map<TriggerFamily, size_t> by_family;
  size_t total = 0;

  double fraction(BugType t) const;
  Json to_json() const;
  std::string to_table() const;
};

// Violations found by validate_record; empty means the record is well formed.
std::vector<std::string> validate_record(const BugRecord& record,
                                         const Taxonomy& taxonomy);

// Loads `records/<issue_id>.json` per the index file. Throws ConfigError on
// missing paths, FormatError on malformed records, TaxonomyError when a
// record's label pair violates the compatibility map.
BugRecordSet load_knowledge_base(const std::filesystem::path& path);

// Re-serialize a set into the directory layout load_knowledge_base reads.
void save_knowledge_base(const BugRecordSet& set, const std::filesystem::path& path);

// Exact per-category counts. Throws PreconditionError on an empty set.
CategoryDistribution taxonomy_stats(const BugRecordSet& set);

}  // namespace alignguard
