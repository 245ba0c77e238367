#include "alignguard/tensor_value.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "alignguard/json.hpp"

#include "alignguard/errors.hpp"

namespace alignguard {

namespace {

bool dtype_is_floating(const std::string& dtype) {
  return dtype.rfind("float", 0) == 0 || dtype == "bfloat16" || dtype == "half" ||
         dtype == "double";
}

double special_or_number(const Json& v, const std::string& what) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  if (v.is_boolean()) return v.get<bool>() ? 1.0 : 0.0;
  throw FormatError(what + ": non-numeric tensor element");
}

Json float_to_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

}  // namespace

bool TensorData::is_floating() const { return dtype_is_floating(dtype); }

std::int64_t TensorData::numel() const {
  std::int64_t n = 1;
  for (auto s : shape) n *= s;
  return n;
}

Value Value::tensor1d(std::vector<double> data, const std::string& dtype) {
  return tensor_of({static_cast<std::int64_t>(data.size())}, std::move(data), dtype);
}

Value Value::tensor_of(std::vector<std::int64_t> shape, std::vector<double> data,
                       const std::string& dtype) {
  Value v;
  v.kind = Kind::Tensor;
  v.tensor.dtype = dtype;
  v.tensor.shape = std::move(shape);
  if (dtype_is_floating(dtype)) {
    v.tensor.fdata = std::move(data);
  } else {
    v.tensor.idata.reserve(data.size());
    for (double d : data) v.tensor.idata.push_back(static_cast<std::int64_t>(d));
  }
  return v;
}

Value Value::scalar(double v) {
  Value out;
  out.kind = Kind::Scalar;
  out.scalar_dtype = "float";
  out.scalar_f = v;
  return out;
}

Value Value::scalar(std::int64_t v) {
  Value out;
  out.kind = Kind::Scalar;
  out.scalar_dtype = "int";
  out.scalar_i = v;
  return out;
}

Value Value::list(std::vector<Value> items) {
  Value out;
  out.kind = Kind::List;
  out.items = std::move(items);
  return out;
}

Value Value::dict(std::map<std::string, Value> fields) {
  Value out;
  out.kind = Kind::Dict;
  out.fields = std::move(fields);
  return out;
}

Value decode_value(const Json& doc) {
  if (!doc.is_object() || !doc.contains("__kind__"))
    throw FormatError("worker value: missing __kind__");
  const std::string kind = doc["__kind__"].get<std::string>();
  Value v;
  if (kind == "tensor") {
    v.kind = Value::Kind::Tensor;
    v.tensor.dtype = doc.value("dtype", "float32");
    for (const auto& s : doc.at("shape")) v.tensor.shape.push_back(s.get<std::int64_t>());
    const auto& data = doc.at("data");
    if (v.tensor.is_floating()) {
      v.tensor.fdata.reserve(data.size());
      for (const auto& e : data) v.tensor.fdata.push_back(special_or_number(e, "tensor"));
    } else {
      v.tensor.idata.reserve(data.size());
      for (const auto& e : data) {
        if (e.is_boolean())
          v.tensor.idata.push_back(e.get<bool>() ? 1 : 0);
        else if (e.is_number_integer())
          v.tensor.idata.push_back(e.get<std::int64_t>());
        else
          v.tensor.idata.push_back(static_cast<std::int64_t>(special_or_number(e, "tensor")));
      }
    }
    auto n = static_cast<size_t>(v.tensor.numel());
    size_t got = v.tensor.is_floating() ? v.tensor.fdata.size() : v.tensor.idata.size();
    if (got != n)
      throw FormatError("tensor: data length " + std::to_string(got) +
                        " does not match shape numel " + std::to_string(n));
  } else if (kind == "scalar") {
    v.kind = Value::Kind::Scalar;
    v.scalar_dtype = doc.value("dtype", "float");
    const auto& val = doc.at("value");
    if (v.scalar_dtype == "bool") {
      v.scalar_i = val.get<bool>() ? 1 : 0;
    } else if (v.scalar_dtype == "int") {
      v.scalar_i = val.get<std::int64_t>();
    } else {
      v.scalar_f = special_or_number(val, "scalar");
    }
  } else if (kind == "list") {
    v.kind = Value::Kind::List;
    for (const auto& item : doc.at("items")) v.items.push_back(decode_value(item));
  } else if (kind == "dict") {
    v.kind = Value::Kind::Dict;
    for (const auto& [key, item] : doc.at("items").items())
      v.fields.emplace(key, decode_value(item));
  } else if (kind == "none") {
    v.kind = Value::Kind::None;
  } else if (kind == "str") {
    v.kind = Value::Kind::Str;
    v.str = doc.value("value", "");
  } else {
    throw FormatError("worker value: unknown kind '" + kind + "'");
  }
  return v;
}

Json encode_value(const Value& value) {
  Json doc;
  switch (value.kind) {
    case Value::Kind::Tensor: {
      doc["__kind__"] = "tensor";
      doc["dtype"] = value.tensor.dtype;
      doc["shape"] = value.tensor.shape;
      Json data = Json::array();
      if (value.tensor.is_floating()) {
        for (double v : value.tensor.fdata) data.push_back(float_to_json(v));
      } else {
        for (auto v : value.tensor.idata) data.push_back(v);
      }
      doc["data"] = data;
      break;
    }
    case Value::Kind::Scalar:
      doc["__kind__"] = "scalar";
      doc["dtype"] = value.scalar_dtype;
      if (value.scalar_dtype == "bool")
        doc["value"] = value.scalar_i != 0;
      else if (value.scalar_dtype == "int")
        doc["value"] = value.scalar_i;
      else
        doc["value"] = float_to_json(value.scalar_f);
      break;
    case Value::Kind::List: {
      doc["__kind__"] = "list";
      Json items = Json::array();
      for (const auto& item : value.items) items.push_back(encode_value(item));
      doc["items"] = items;
      break;
    }
    case Value::Kind::Dict: {
      doc["__kind__"] = "dict";
      Json items = Json::object();
      for (const auto& [key, item] : value.fields) items[key] = encode_value(item);
      doc["items"] = items;
      break;
    }
    case Value::Kind::None:
      doc["__kind__"] = "none";
      break;
    case Value::Kind::Str:
      doc["__kind__"] = "str";
      doc["value"] = value.str;
      break;
  }
  return doc;
}

namespace {

std::string format_number(double v, bool is_int) {
  std::ostringstream ss;
  if (is_int) {
    ss << static_cast<std::int64_t>(v);
  } else if (std::isnan(v)) {
    ss << "nan";
  } else if (std::isinf(v)) {
    ss << (v > 0 ? "inf" : "-inf");
  } else if (v == static_cast<std::int64_t>(v) && std::abs(v) < 1e15) {
    ss << static_cast<std::int64_t>(v);
  } else {
    ss.precision(8);
    ss << v;
  }
  return ss.str();
}

void render_tensor_rec(const TensorData& t, size_t dim, size_t& cursor,
                       std::ostringstream& out) {
  if (dim == t.shape.size()) {
    bool is_int = !t.is_floating();
    double v = is_int ? static_cast<double>(t.idata[cursor]) : t.fdata[cursor];
    out << format_number(v, is_int);
    ++cursor;
    return;
  }
  out << "[";
  for (std::int64_t i = 0; i < t.shape[dim]; ++i) {
    if (i) out << ", ";
    render_tensor_rec(t, dim + 1, cursor, out);
  }
  out << "]";
}

}  // namespace

std::string render_value(const Value& value, size_t max_elems) {
  std::ostringstream out;
  switch (value.kind) {
    case Value::Kind::Tensor: {
      const auto& t = value.tensor;
      if (static_cast<size_t>(t.numel()) > max_elems) {
        out << "tensor(shape=[";
        for (size_t i = 0; i < t.shape.size(); ++i)
          out << (i ? ", " : "") << t.shape[i];
        out << "], dtype=" << t.dtype << ")";
      } else if (t.shape.empty()) {
        bool is_int = !t.is_floating();
        out << format_number(is_int ? static_cast<double>(t.idata[0]) : t.fdata[0],
                             is_int);
      } else {
        size_t cursor = 0;
        render_tensor_rec(t, 0, cursor, out);
      }
      break;
    }
    case Value::Kind::Scalar:
      if (value.scalar_dtype == "bool")
        out << (value.scalar_i ? "True" : "False");
      else if (value.scalar_dtype == "int")
        out << value.scalar_i;
      else
        out << format_number(value.scalar_f, false);
      break;
    case Value::Kind::List: {
      out << "[";
      for (size_t i = 0; i < value.items.size(); ++i)
        out << (i ? ", " : "") << render_value(value.items[i], max_elems);
      out << "]";
      break;
    }
    case Value::Kind::Dict: {
      out << "{";
      bool first = true;
      for (const auto& [key, item] : value.fields) {
        if (!first) out << ", ";
        out << key << ": " << render_value(item, max_elems);
        first = false;
      }
      out << "}";
      break;
    }
    case Value::Kind::None:
      out << "None";
      break;
    case Value::Kind::Str:
      out << "'" << value.str << "'";
      break;
  }
  return out.str();
}

ToleranceSpec ToleranceSpec::defaults() {
  ToleranceSpec spec;
  spec.per_dtype = {
      {"float16", {1e-3, 1e-3}},
      {"bfloat16", {1e-3, 1e-3}},
      {"float32", {1.3e-6, 1e-5}},
      {"float64", {1e-7, 1e-7}},
  };
  spec.nan_equal = false;
  return spec;
}

std::pair<double, double> ToleranceSpec::lookup(const std::string& dtype) const {
  auto it = per_dtype.find(dtype);
  if (it != per_dtype.end()) return it->second;
  if (dtype_is_floating(dtype)) {
    auto f32 = per_dtype.find("float32");
    if (f32 != per_dtype.end()) return f32->second;
  }
  return {0.0, 0.0};  // integers, bool, unknown: exact
}

Json ToleranceSpec::to_json() const {
  Json doc = Json::object();
  for (const auto& [dtype, pair] : per_dtype)
    doc[dtype] = Json::array({pair.first, pair.second});
  Json out;
  out["per_dtype"] = doc;
  out["nan_equal"] = nan_equal;
  return out;
}

ToleranceSpec ToleranceSpec::from_json(const Json& doc) {
  ToleranceSpec spec = defaults();
  if (doc.is_null()) return spec;
  if (doc.contains("per_dtype")) {
    for (const auto& [dtype, pair] : doc["per_dtype"].items()) {
      double rtol = pair.at(0).get<double>();
      double atol = pair.at(1).get<double>();
      if (rtol < 0 || atol < 0)
        throw ConfigError("tolerances must be non-negative for dtype " + dtype);
      spec.per_dtype[dtype] = {rtol, atol};
    }
  }
  if (doc.contains("nan_equal")) spec.nan_equal = doc["nan_equal"].get<bool>();
  return spec;
}

}  // namespace alignguard
