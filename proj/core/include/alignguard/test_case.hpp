#pragma once

#include <optional>
#include <string>

#include "alignguard/tensor_value.hpp"
#include "alignguard/util.hpp"

namespace alignguard {

struct PipelineSpec {
  enum class Kind { SingleRunDifferential, RepeatedExecution, Custom };

  Kind kind = Kind::SingleRunDifferential;
  int repeat_count = 0;               // >= 2 when kind == RepeatedExecution
  std::string state_mutation_hook;    // optional python source, defines mutate_state
  std::string custom_source;          // required iff kind == Custom
  std::optional<ToleranceSpec> tolerance_override;

  Json to_json() const;
  static PipelineSpec from_json(const Json& doc);
  std::vector<std::string> validate() const;
};

std::string to_string(PipelineSpec::Kind kind);
std::optional<PipelineSpec::Kind> pipeline_kind_from_string(const std::string& s);

struct CaseOrigin {
  std::string file;
  std::string test_name;
};

// Standardized four-component test program. Immutable once built; id is
// the first 16 hex chars of a content hash over the canonical payload.
struct TestCase {
  std::string id;
  std::string model_source;  // defines class Model
  std::string input_spec;    // defines gen_input() -> tuple of model args
  Json compile_args = Json::object();
  PipelineSpec pipeline;
  std::optional<CaseOrigin> origin;
  std::optional<std::string> parent_id;
  std::optional<std::string> applied_rule_id;

  // Serialization round-trips byte-identically via canonical_dump.
  Json to_json() const;
  static TestCase from_json(const Json& doc);

  std::string canonical_payload() const;  // everything except id
  void assign_id();

  // Fast structural checks (components present). Parse/lint checks live in
  // the corpus module because they need the python bridge.
  std::vector<std::string> shallow_validate() const;
};

// Standalone runnable test file: model class, input generator, compiler
// argument declaration, and a self-checking pipeline driver.
std::string render_test_file(const TestCase& tc);

// compile_args / json -> python literal (True/False/None, dict syntax).
std::string json_to_python_literal(const Json& doc);

}  // namespace alignguard
