#pragma once

#include <optional>
#include <string>

#include "alignguard/tensor_value.hpp"

namespace alignguard {

struct MismatchDetail {
  std::string reason;  // "structure" | "shape" | "dtype" | "values"
  std::string path;    // container path of the first mismatching leaf
  std::string dtype;   // dtype of that leaf ("none" for structure faults)
  std::int64_t first_flat_index = -1;
  double max_abs_diff = 0.0;
  double max_rel_diff = 0.0;
  double reference_value = 0.0;  // at the first violating element
  double subject_value = 0.0;
};

struct ComparisonResult {
  bool equal = true;
  std::optional<MismatchDetail> detail;
};

// Tolerance-aware structural comparison. Shapes, dtypes, and container
// layout must match exactly; elementwise |subject - reference| <=
// atol + rtol * |reference| per dtype; NaN equality per the spec flag;
// infinities must match by sign. Shape/dtype/structure disagreement is a
// mismatch verdict, not an error.
ComparisonResult compare_tensors(const Value& reference, const Value& subject,
                                 const ToleranceSpec& tol);

}  // namespace alignguard
