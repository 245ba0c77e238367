#pragma once

#include <optional>
#include <string>
#include <vector>

namespace alignguard {

// Correctness-bug subcategories, keyed by the compiler stage they infect.
enum class BugType {
  GSC,            // graph semantic capturing
  GCB,            // graph caching
  OTB,            // operator transformation
  LCG,            // low-level code generation
  IPO,            // in-place operation handling
  MLC,            // memory layout conflict
  PRECISION,      // precision casting in numerical pipelines
  CONFIGURATION,  // backend toolchain configuration
  EXTERNAL_LIB,   // defects inherited from external dependencies
};

// Coarse groups used for distribution reporting.
enum class BugGroup { Graph, Operator, Memory, Other };

enum class RootCause {
  IncompleteSymbolicTracing,
  AggressiveOptimization,
  MissingFallbackHandling,
  IncorrectGuardCondition,
  ComputationalSemanticMismatch,
  AggressiveOptimizationNumericalInstability,
  TransformationIncompatibility,
  MissingBoundaryCaseHandling,
  NumericalInstability,
  LowLevelLanguageIncompatibility,
  IncorrectAliasTracking,
  IncorrectInplaceOptimization,
  IncorrectLayoutMetadataTracking,
  MissingLayoutCompatibilityCheck,
  IncorrectPrecisionCasting,
  IncorrectToolchainConfiguration,
  ExternalDependencyDefect,
};

enum class TriggerFamily {
  NonComputationalOps,
  ExecutionContextMutation,
  CornerCase,
  RepeatedExecutionState,
  NondefaultParamsEdgeInputs,
  OptimizationSequence,
  ExtremeValues,
  UnhandledBoundary,
  AliasThenInplace,
  LayoutMutationSequence,
};

struct Taxonomy {
  static const Taxonomy& instance();

  std::vector<BugType> bug_types() const;
  std::vector<RootCause> root_causes() const;
  std::vector<TriggerFamily> trigger_families() const;

  bool cause_allowed(BugType type, RootCause cause) const;
  bool family_allowed(BugType type, TriggerFamily family) const;

  // Types a family may trigger (never empty: the map is total).
  std::vector<BugType> types_for_family(TriggerFamily family) const;
  // Canonical type used when inferring a suspected label from a rule.
  BugType primary_type_for_family(TriggerFamily family) const;

  BugGroup group_of(BugType type) const;
};

std::string to_string(BugType t);
std::string to_string(BugGroup g);
std::string to_string(RootCause c);
std::string to_string(TriggerFamily f);

std::optional<BugType> bug_type_from_string(const std::string& s);
std::optional<RootCause> root_cause_from_string(const std::string& s);
std::optional<TriggerFamily> trigger_family_from_string(const std::string& s);

}  // namespace alignguard
