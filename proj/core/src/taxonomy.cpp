#include "alignguard/taxonomy.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <stdexcept>

namespace alignguard {

namespace {

struct BugTypeName {
  BugType type;
  const char* name;
};

constexpr std::array<BugTypeName, 9> kBugTypes{{
    {BugType::GSC, "GSC"},
    {BugType::GCB, "GCB"},
    {BugType::OTB, "OTB"},
    {BugType::LCG, "LCG"},
    {BugType::IPO, "IPO"},
    {BugType::MLC, "MLC"},
    {BugType::PRECISION, "PRECISION"},
    {BugType::CONFIGURATION, "CONFIGURATION"},
    {BugType::EXTERNAL_LIB, "EXTERNAL_LIB"},
}};

struct RootCauseName {
  RootCause cause;
  const char* name;
};

constexpr std::array<RootCauseName, 17> kRootCauses{{
    {RootCause::IncompleteSymbolicTracing, "incomplete-symbolic-tracing"},
    {RootCause::AggressiveOptimization, "aggressive-optimization"},
    {RootCause::MissingFallbackHandling, "missing-fallback-handling"},
    {RootCause::IncorrectGuardCondition, "incorrect-guard-condition"},
    {RootCause::ComputationalSemanticMismatch, "computational-semantic-mismatch"},
    {RootCause::AggressiveOptimizationNumericalInstability,
     "aggressive-optimization-numerical-instability"},
    {RootCause::TransformationIncompatibility, "transformation-incompatibility"},
    {RootCause::MissingBoundaryCaseHandling, "missing-boundary-case-handling"},
    {RootCause::NumericalInstability, "numerical-instability"},
    {RootCause::LowLevelLanguageIncompatibility, "low-level-language-incompatibility"},
    {RootCause::IncorrectAliasTracking, "incorrect-alias-tracking"},
    {RootCause::IncorrectInplaceOptimization, "incorrect-inplace-optimization"},
    {RootCause::IncorrectLayoutMetadataTracking, "incorrect-layout-metadata-tracking"},
    {RootCause::MissingLayoutCompatibilityCheck, "missing-layout-compatibility-check"},
    {RootCause::IncorrectPrecisionCasting, "incorrect-precision-casting"},
    {RootCause::IncorrectToolchainConfiguration, "incorrect-toolchain-configuration"},
    {RootCause::ExternalDependencyDefect, "external-dependency-defect"},
}};

struct TriggerFamilyName {
  TriggerFamily family;
  const char* name;
};

constexpr std::array<TriggerFamilyName, 10> kTriggerFamilies{{
    {TriggerFamily::NonComputationalOps, "non-computational-ops"},
    {TriggerFamily::ExecutionContextMutation, "execution-context-mutation"},
    {TriggerFamily::CornerCase, "corner-case"},
    {TriggerFamily::RepeatedExecutionState, "repeated-execution-state"},
    {TriggerFamily::NondefaultParamsEdgeInputs, "nondefault-params-edge-inputs"},
    {TriggerFamily::OptimizationSequence, "optimization-sequence"},
    {TriggerFamily::ExtremeValues, "extreme-values"},
    {TriggerFamily::UnhandledBoundary, "unhandled-boundary"},
    {TriggerFamily::AliasThenInplace, "alias-then-inplace"},
    {TriggerFamily::LayoutMutationSequence, "layout-mutation-sequence"},
}};

// bug type -> legal root causes
const std::map<BugType, std::vector<RootCause>> kCauseMap = {
    {BugType::GSC,
     {RootCause::IncompleteSymbolicTracing, RootCause::AggressiveOptimization,
      RootCause::MissingFallbackHandling}},
    {BugType::GCB, {RootCause::IncorrectGuardCondition}},
    {BugType::OTB,
     {RootCause::ComputationalSemanticMismatch,
      RootCause::AggressiveOptimizationNumericalInstability,
      RootCause::TransformationIncompatibility,
      RootCause::MissingBoundaryCaseHandling}},
    {BugType::LCG,
     {RootCause::NumericalInstability, RootCause::MissingBoundaryCaseHandling,
      RootCause::LowLevelLanguageIncompatibility}},
    {BugType::IPO,
     {RootCause::IncorrectAliasTracking, RootCause::IncorrectInplaceOptimization}},
    {BugType::MLC,
     {RootCause::IncorrectLayoutMetadataTracking,
      RootCause::MissingLayoutCompatibilityCheck}},
    {BugType::PRECISION, {RootCause::IncorrectPrecisionCasting}},
    {BugType::CONFIGURATION, {RootCause::IncorrectToolchainConfiguration}},
    {BugType::EXTERNAL_LIB, {RootCause::ExternalDependencyDefect}},
};

// bug type -> legal trigger families
const std::map<BugType, std::vector<TriggerFamily>> kFamilyMap = {
    {BugType::GSC,
     {TriggerFamily::NonComputationalOps, TriggerFamily::ExecutionContextMutation,
      TriggerFamily::CornerCase}},
    {BugType::GCB, {TriggerFamily::RepeatedExecutionState}},
    {BugType::OTB,
     {TriggerFamily::NondefaultParamsEdgeInputs, TriggerFamily::OptimizationSequence,
      TriggerFamily::CornerCase}},
    {BugType::LCG, {TriggerFamily::ExtremeValues, TriggerFamily::UnhandledBoundary}},
    {BugType::IPO, {TriggerFamily::AliasThenInplace}},
    {BugType::MLC, {TriggerFamily::LayoutMutationSequence}},
    {BugType::PRECISION,
     {TriggerFamily::ExtremeValues, TriggerFamily::OptimizationSequence}},
    {BugType::CONFIGURATION,
     {TriggerFamily::ExtremeValues, TriggerFamily::OptimizationSequence}},
    {BugType::EXTERNAL_LIB,
     {TriggerFamily::OptimizationSequence, TriggerFamily::UnhandledBoundary}},
};

const std::map<TriggerFamily, BugType> kPrimaryType = {
    {TriggerFamily::NonComputationalOps, BugType::GSC},
    {TriggerFamily::ExecutionContextMutation, BugType::GSC},
    {TriggerFamily::CornerCase, BugType::GSC},
    {TriggerFamily::RepeatedExecutionState, BugType::GCB},
    {TriggerFamily::NondefaultParamsEdgeInputs, BugType::OTB},
    {TriggerFamily::OptimizationSequence, BugType::OTB},
    {TriggerFamily::ExtremeValues, BugType::LCG},
    {TriggerFamily::UnhandledBoundary, BugType::LCG},
    {TriggerFamily::AliasThenInplace, BugType::IPO},
    {TriggerFamily::LayoutMutationSequence, BugType::MLC},
};

}  // namespace

const Taxonomy& Taxonomy::instance() {
  static Taxonomy tax;
  return tax;
}

std::vector<BugType> Taxonomy::bug_types() const {
  std::vector<BugType> out;
  for (const auto& e : kBugTypes) out.push_back(e.type);
  return out;
}

std::vector<RootCause> Taxonomy::root_causes() const {
  std::vector<RootCause> out;
  for (const auto& e : kRootCauses) out.push_back(e.cause);
  return out;
}

std::vector<TriggerFamily> Taxonomy::trigger_families() const {
  std::vector<TriggerFamily> out;
  for (const auto& e : kTriggerFamilies) out.push_back(e.family);
  return out;
}

bool Taxonomy::cause_allowed(BugType type, RootCause cause) const {
  const auto& allowed = kCauseMap.at(type);
  return std::find(allowed.begin(), allowed.end(), cause) != allowed.end();
}

bool Taxonomy::family_allowed(BugType type, TriggerFamily family) const {
  const auto& allowed = kFamilyMap.at(type);
  return std::find(allowed.begin(), allowed.end(), family) != allowed.end();
}

std::vector<BugType> Taxonomy::types_for_family(TriggerFamily family) const {
  std::vector<BugType> out;
  for (const auto& [type, families] : kFamilyMap) {
    if (std::find(families.begin(), families.end(), family) != families.end())
      out.push_back(type);
  }
  return out;
}

BugType Taxonomy::primary_type_for_family(TriggerFamily family) const {
  return kPrimaryType.at(family);
}

BugGroup Taxonomy::group_of(BugType type) const {
  switch (type) {
    case BugType::GSC:
    case BugType::GCB:
      return BugGroup::Graph;
    case BugType::OTB:
    case BugType::LCG:
      return BugGroup::Operator;
    case BugType::IPO:
    case BugType::MLC:
      return BugGroup::Memory;
    default:
      return BugGroup::Other;
  }
}

std::string to_string(BugType t) {
  for (const auto& e : kBugTypes)
    if (e.type == t) return e.name;
  throw std::logic_error("unknown BugType");
}

std::string to_string(BugGroup g) {
  switch (g) {
    case BugGroup::Graph:
      return "graph";
    case BugGroup::Operator:
      return "operator";
    case BugGroup::Memory:
      return "memory";
    case BugGroup::Other:
      return "other";
  }
  throw std::logic_error("unknown BugGroup");
}

std::string to_string(RootCause c) {
  for (const auto& e : kRootCauses)
    if (e.cause == c) return e.name;
  throw std::logic_error("unknown RootCause");
}

std::string to_string(TriggerFamily f) {
  for (const auto& e : kTriggerFamilies)
    if (e.family == f) return e.name;
  throw std::logic_error("unknown TriggerFamily");
}

std::optional<BugType> bug_type_from_string(const std::string& s) {
  for (const auto& e : kBugTypes)
    if (s == e.name) return e.type;
  return std::nullopt;
}

std::optional<RootCause> root_cause_from_string(const std::string& s) {
  for (const auto& e : kRootCauses)
    if (s == e.name) return e.cause;
  return std::nullopt;
}

std::optional<TriggerFamily> trigger_family_from_string(const std::string& s) {
  for (const auto& e : kTriggerFamilies)
    if (s == e.name) return e.family;
  return std::nullopt;
}

}  // namespace alignguard
