#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "alignguard/taxonomy.hpp"
#include "alignguard/util.hpp"

namespace alignguard {

// Fault classes the simulator backend can inject into the subject run.
enum class DefectClass {
  AliasWriteSuppressed,     // in-place writes through aliases not propagated
  StaleCacheReuse,          // iterations past a threshold replay a cached output
  BoundaryParamMishandled,  // negative dims mis-normalized for a listed op set
  PrecisionDowncast,        // matmul-family intermediates truncated to half
  LayoutMisread,            // non-contiguous inputs read as if contiguous
  SequenceMisfold,          // fusion-prone chains evaluated with a bad constant
  RngDivergence,            // divergent RNG stream for *_like ops on
                            // non-contiguous inputs
};

std::string to_string(DefectClass c);
std::optional<DefectClass> defect_class_from_string(const std::string& s);
std::vector<DefectClass> all_defect_classes();

// Builtin trigger families able to expose each defect class.
std::vector<TriggerFamily> families_exposing(DefectClass c);

struct ExecutionBackend {
  enum class Kind { RealCompiler, DefectSimulator };

  std::string id;
  Kind kind = Kind::DefectSimulator;
  // Simulator: defect name -> params. Real: framework pin, device, etc.
  Json config = Json::object();
  std::map<DefectClass, Json> defects;

  Json to_json() const;
  static ExecutionBackend from_json(const Json& doc);

  // Worker-protocol backend document.
  Json worker_config() const;
};

// Validates per-class params (e.g. STALE_CACHE_REUSE threshold >= 1) and
// derives a stable backend id from the enabled set.
ExecutionBackend configure_simulator(const std::map<DefectClass, Json>& defects);
ExecutionBackend configure_simulator(const std::set<DefectClass>& defects);

ExecutionBackend configure_real_compiler(const Json& config = Json::object());

}  // namespace alignguard
