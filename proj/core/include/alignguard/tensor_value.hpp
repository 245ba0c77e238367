#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "alignguard/util.hpp"

namespace alignguard {

// Tensor payload from the worker protocol. Floating data is held as
// doubles; integer and bool data exactly in a separate lane.
struct TensorData {
  std::string dtype;
  std::vector<std::int64_t> shape;
  std::vector<double> fdata;        // floating dtypes
  std::vector<std::int64_t> idata;  // integer / bool dtypes

  bool is_floating() const;
  std::int64_t numel() const;
};

// Nested worker value: tensors, scalars, and containers thereof.
struct Value {
  enum class Kind { Tensor, Scalar, List, Dict, None, Str };

  Kind kind = Kind::None;
  TensorData tensor;                  // Kind::Tensor
  std::string scalar_dtype;           // Kind::Scalar: "int" | "float" | "bool"
  double scalar_f = 0.0;
  std::int64_t scalar_i = 0;
  std::string str;                    // Kind::Str
  std::vector<Value> items;           // Kind::List
  std::map<std::string, Value> fields;  // Kind::Dict

  static Value tensor1d(std::vector<double> data, const std::string& dtype = "float32");
  static Value tensor_of(std::vector<std::int64_t> shape, std::vector<double> data,
                         const std::string& dtype = "float32");
  static Value scalar(double v);
  static Value scalar(std::int64_t v);
  static Value list(std::vector<Value> items);
  static Value dict(std::map<std::string, Value> fields);
};

Value decode_value(const Json& doc);
Json encode_value(const Value& value);

// Compact one-line rendering for reports: 0-d tensors as scalars, small
// tensors as nested lists, large ones elided with shape info.
std::string render_value(const Value& value, size_t max_elems = 64);

// Per-dtype close-assertion tolerances.
struct ToleranceSpec {
  std::map<std::string, std::pair<double, double>> per_dtype;  // dtype -> (rtol, atol)
  bool nan_equal = false;

  // Framework-standard defaults: float32 (1.3e-6, 1e-5), float64
  // (1e-7, 1e-7), float16/bfloat16 (1e-3, 1e-3), integers and bool exact.
  static ToleranceSpec defaults();

  std::pair<double, double> lookup(const std::string& dtype) const;

  Json to_json() const;
  static ToleranceSpec from_json(const Json& doc);
};

}  // namespace alignguard
