#include "alignguard/backend.hpp"

#include <algorithm>

#include "alignguard/json.hpp"

#include "alignguard/errors.hpp"

namespace alignguard {

namespace {

struct DefectName {
  DefectClass cls;
  const char* name;
};

constexpr DefectName kDefects[] = {
    {DefectClass::AliasWriteSuppressed, "ALIAS_WRITE_SUPPRESSED"},
    {DefectClass::StaleCacheReuse, "STALE_CACHE_REUSE"},
    {DefectClass::BoundaryParamMishandled, "BOUNDARY_PARAM_MISHANDLED"},
    {DefectClass::PrecisionDowncast, "PRECISION_DOWNCAST"},
    {DefectClass::LayoutMisread, "LAYOUT_MISREAD"},
    {DefectClass::SequenceMisfold, "SEQUENCE_MISFOLD"},
    {DefectClass::RngDivergence, "RNG_DIVERGENCE"},
};

}  // namespace

std::string to_string(DefectClass c) {
  for (const auto& e : kDefects)
    if (e.cls == c) return e.name;
  throw std::logic_error("unknown DefectClass");
}

std::optional<DefectClass> defect_class_from_string(const std::string& s) {
  for (const auto& e : kDefects)
    if (s == e.name) return e.cls;
  return std::nullopt;
}

std::vector<DefectClass> all_defect_classes() {
  std::vector<DefectClass> out;
  for (const auto& e : kDefects) out.push_back(e.cls);
  return out;
}

std::vector<TriggerFamily> families_exposing(DefectClass c) {
  switch (c) {
    case DefectClass::AliasWriteSuppressed:
      return {TriggerFamily::AliasThenInplace};
    case DefectClass::StaleCacheReuse:
      return {TriggerFamily::RepeatedExecutionState};
    case DefectClass::BoundaryParamMishandled:
      return {TriggerFamily::NondefaultParamsEdgeInputs, TriggerFamily::UnhandledBoundary};
    case DefectClass::PrecisionDowncast:
      return {TriggerFamily::ExtremeValues, TriggerFamily::OptimizationSequence};
    case DefectClass::LayoutMisread:
      return {TriggerFamily::LayoutMutationSequence};
    case DefectClass::SequenceMisfold:
      return {TriggerFamily::OptimizationSequence};
    case DefectClass::RngDivergence:
      return {TriggerFamily::NonComputationalOps};
  }
  return {};
}

Json ExecutionBackend::to_json() const {
  Json doc;
  doc["id"] = id;
  doc["kind"] = kind == Kind::RealCompiler ? "real_compiler" : "defect_simulator";
  doc["config"] = config;
  Json defects_doc = Json::object();
  for (const auto& [cls, params] : defects) defects_doc[to_string(cls)] = params;
  doc["defects"] = defects_doc;
  return doc;
}

ExecutionBackend ExecutionBackend::from_json(const Json& doc) {
  ExecutionBackend backend;
  std::string kind = doc.value("kind", "defect_simulator");
  if (kind == "real_compiler") {
    backend.kind = Kind::RealCompiler;
  } else if (kind == "defect_simulator") {
    backend.kind = Kind::DefectSimulator;
  } else {
    throw ConfigError("unknown backend kind: " + kind);
  }
  backend.config = doc.value("config", Json::object());
  if (doc.contains("defects")) {
    for (const auto& [name, params] : doc["defects"].items()) {
      auto cls = defect_class_from_string(name);
      if (!cls) throw ConfigError("unknown defect class: " + name);
      backend.defects[*cls] = params;
    }
  }
  backend.id = doc.value("id", "");
  if (backend.id.empty()) {
    if (backend.kind == Kind::RealCompiler) {
      backend.id = "real";
    } else {
      ExecutionBackend derived = configure_simulator(backend.defects);
      backend.id = derived.id;
    }
  }
  return backend;
}

Json ExecutionBackend::worker_config() const {
  Json doc;
  doc["kind"] = kind == Kind::RealCompiler ? "real_compiler" : "defect_simulator";
  doc["config"] = config;
  Json defects_doc = Json::object();
  for (const auto& [cls, params] : defects) defects_doc[to_string(cls)] = params;
  doc["defects"] = defects_doc;
  return doc;
}

ExecutionBackend configure_simulator(const std::map<DefectClass, Json>& defects) {
  ExecutionBackend backend;
  backend.kind = ExecutionBackend::Kind::DefectSimulator;
  for (const auto& [cls, params] : defects) {
    if (!params.is_object()) throw ConfigError("defect params must be an object");
    if (cls == DefectClass::StaleCacheReuse) {
      int threshold = params.value("threshold", 1);
      if (threshold < 1)
        throw ConfigError("STALE_CACHE_REUSE threshold must be >= 1");
      Json normalized = params;
      normalized["threshold"] = threshold;
      backend.defects[cls] = normalized;
    } else {
      backend.defects[cls] = params;
    }
  }
  if (backend.defects.empty()) {
    backend.id = "sim:clean";
  } else {
    std::string spec;
    for (const auto& [cls, params] : backend.defects)
      spec += to_string(cls) + params.dump() + ";";
    backend.id = "sim:" + short_hash(spec).substr(0, 8);
  }
  return backend;
}

ExecutionBackend configure_simulator(const std::set<DefectClass>& defects) {
  std::map<DefectClass, Json> with_params;
  for (auto cls : defects) with_params[cls] = Json::object();
  return configure_simulator(with_params);
}

ExecutionBackend configure_real_compiler(const Json& config) {
  ExecutionBackend backend;
  backend.kind = ExecutionBackend::Kind::RealCompiler;
  backend.config = config;
  backend.id = "real";
  if (config.contains("id")) backend.id = config["id"].get<std::string>();
  return backend;
}

}  // namespace alignguard
