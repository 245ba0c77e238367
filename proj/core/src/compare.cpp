#include "alignguard/compare.hpp"

#include <cmath>

namespace alignguard {

namespace {

ComparisonResult mismatch(std::string reason, std::string path, std::string dtype) {
  ComparisonResult res;
  res.equal = false;
  MismatchDetail d;
  d.reason = std::move(reason);
  d.path = std::move(path);
  d.dtype = std::move(dtype);
  res.detail = std::move(d);
  return res;
}

ComparisonResult compare_tensor_leaf(const TensorData& ref, const TensorData& sub,
                                     const ToleranceSpec& tol, const std::string& path) {
  if (ref.dtype != sub.dtype) return mismatch("dtype", path, ref.dtype);
  if (ref.shape != sub.shape) return mismatch("shape", path, ref.dtype);

  auto [rtol, atol] = tol.lookup(ref.dtype);
  std::int64_t n = ref.numel();
  std::int64_t first = -1;
  double max_abs = 0.0, max_rel = 0.0;
  double ref_at = 0.0, sub_at = 0.0;

  for (std::int64_t i = 0; i < n; ++i) {
    double r, s;
    if (ref.is_floating()) {
      r = ref.fdata[static_cast<size_t>(i)];
      s = sub.fdata[static_cast<size_t>(i)];
    } else {
      r = static_cast<double>(ref.idata[static_cast<size_t>(i)]);
      s = static_cast<double>(sub.idata[static_cast<size_t>(i)]);
    }
    bool ok;
    if (std::isnan(r) || std::isnan(s)) {
      ok = tol.nan_equal && std::isnan(r) && std::isnan(s);
    } else if (std::isinf(r) || std::isinf(s)) {
      ok = r == s;
    } else {
      double diff = std::abs(s - r);
      ok = diff <= atol + rtol * std::abs(r);
      if (diff > max_abs) max_abs = diff;
      if (std::abs(r) > 0 && diff / std::abs(r) > max_rel) max_rel = diff / std::abs(r);
    }
    if (!ok && first < 0) {
      first = i;
      ref_at = r;
      sub_at = s;
    }
  }
  if (first >= 0) {
    auto res = mismatch("values", path, ref.dtype);
    res.detail->first_flat_index = first;
    res.detail->max_abs_diff = max_abs;
    res.detail->max_rel_diff = max_rel;
    res.detail->reference_value = ref_at;
    res.detail->subject_value = sub_at;
    return res;
  }
  return {};
}

ComparisonResult compare_rec(const Value& ref, const Value& sub,
                             const ToleranceSpec& tol, const std::string& path) {
  if (ref.kind != sub.kind) return mismatch("structure", path, "none");
  switch (ref.kind) {
    case Value::Kind::Tensor:
      return compare_tensor_leaf(ref.tensor, sub.tensor, tol, path);
    case Value::Kind::Scalar: {
      if (ref.scalar_dtype != sub.scalar_dtype)
        return mismatch("structure", path, ref.scalar_dtype);
      if (ref.scalar_dtype == "float") {
        TensorData r{"float64", {}, {ref.scalar_f}, {}};
        TensorData s{"float64", {}, {sub.scalar_f}, {}};
        return compare_tensor_leaf(r, s, tol, path);
      }
      if (ref.scalar_i != sub.scalar_i) {
        auto res = mismatch("values", path, ref.scalar_dtype);
        res.detail->first_flat_index = 0;
        res.detail->reference_value = static_cast<double>(ref.scalar_i);
        res.detail->subject_value = static_cast<double>(sub.scalar_i);
        res.detail->max_abs_diff =
            std::abs(static_cast<double>(ref.scalar_i - sub.scalar_i));
        return res;
      }
      return {};
    }
    case Value::Kind::List: {
      if (ref.items.size() != sub.items.size())
        return mismatch("structure", path, "none");
      for (size_t i = 0; i < ref.items.size(); ++i) {
        auto res = compare_rec(ref.items[i], sub.items[i], tol,
                               path + "[" + std::to_string(i) + "]");
        if (!res.equal) return res;
      }
      return {};
    }
    case Value::Kind::Dict: {
      if (ref.fields.size() != sub.fields.size())
        return mismatch("structure", path, "none");
      auto rit = ref.fields.begin();
      auto sit = sub.fields.begin();
      for (; rit != ref.fields.end(); ++rit, ++sit) {
        if (rit->first != sit->first) return mismatch("structure", path, "none");
        auto res = compare_rec(rit->second, sit->second, tol, path + "." + rit->first);
        if (!res.equal) return res;
      }
      return {};
    }
    case Value::Kind::Str:
      if (ref.str != sub.str) return mismatch("values", path, "str");
      return {};
    case Value::Kind::None:
      return {};
  }
  return {};
}

}  // namespace

ComparisonResult compare_tensors(const Value& reference, const Value& subject,
                                 const ToleranceSpec& tol) {
  return compare_rec(reference, subject, tol, "");
}

}  // namespace alignguard
