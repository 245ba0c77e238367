#include "alignguard/test_case.hpp"

#include <sstream>

#include "alignguard/json.hpp"

#include "alignguard/errors.hpp"

namespace alignguard {

std::string to_string(PipelineSpec::Kind kind) {
  switch (kind) {
    case PipelineSpec::Kind::SingleRunDifferential:
      return "single_run_differential";
    case PipelineSpec::Kind::RepeatedExecution:
      return "repeated_execution";
    case PipelineSpec::Kind::Custom:
      return "custom";
  }
  throw std::logic_error("unknown pipeline kind");
}

std::optional<PipelineSpec::Kind> pipeline_kind_from_string(const std::string& s) {
  if (s == "single_run_differential") return PipelineSpec::Kind::SingleRunDifferential;
  if (s == "repeated_execution") return PipelineSpec::Kind::RepeatedExecution;
  if (s == "custom") return PipelineSpec::Kind::Custom;
  return std::nullopt;
}

Json PipelineSpec::to_json() const {
  Json doc;
  doc["kind"] = to_string(kind);
  if (kind == Kind::RepeatedExecution) {
    doc["repeat_count"] = repeat_count;
    doc["state_mutation_hook"] =
        state_mutation_hook.empty() ? Json(nullptr) : Json(state_mutation_hook);
  }
  if (kind == Kind::Custom) doc["custom_source"] = custom_source;
  doc["tolerance_override"] =
      tolerance_override ? tolerance_override->to_json() : Json(nullptr);
  return doc;
}

PipelineSpec PipelineSpec::from_json(const Json& doc) {
  PipelineSpec spec;
  auto kind = pipeline_kind_from_string(doc.value("kind", ""));
  if (!kind) throw FormatError("pipeline: unknown kind '" + doc.value("kind", "") + "'");
  spec.kind = *kind;
  if (spec.kind == Kind::RepeatedExecution) {
    spec.repeat_count = doc.value("repeat_count", 0);
    if (doc.contains("state_mutation_hook") && !doc["state_mutation_hook"].is_null())
      spec.state_mutation_hook = doc["state_mutation_hook"].get<std::string>();
  }
  if (spec.kind == Kind::Custom) spec.custom_source = doc.value("custom_source", "");
  if (doc.contains("tolerance_override") && !doc["tolerance_override"].is_null())
    spec.tolerance_override = ToleranceSpec::from_json(doc["tolerance_override"]);
  auto violations = spec.validate();
  if (!violations.empty()) throw FormatError("pipeline: " + violations.front());
  return spec;
}

std::vector<std::string> PipelineSpec::validate() const {
  std::vector<std::string> out;
  if (kind == Kind::RepeatedExecution && repeat_count < 2)
    out.push_back("repeat_count must be >= 2 for repeated_execution");
  if (kind == Kind::Custom && trim(custom_source).empty())
    out.push_back("custom pipeline requires custom_source");
  if (kind != Kind::Custom && !custom_source.empty())
    out.push_back("custom_source only allowed for kind=custom");
  return out;
}

Json TestCase::to_json() const {
  Json doc;
  doc["format"] = "alignguard.test_case.v1";
  doc["id"] = id;
  doc["model_source"] = model_source;
  doc["input_spec"] = input_spec;
  doc["compile_args"] = compile_args;
  doc["pipeline"] = pipeline.to_json();
  if (origin) {
    doc["origin"] = {{"file", origin->file}, {"test_name", origin->test_name}};
  } else {
    doc["origin"] = nullptr;
  }
  doc["parent_id"] = parent_id ? Json(*parent_id) : Json(nullptr);
  doc["applied_rule_id"] = applied_rule_id ? Json(*applied_rule_id) : Json(nullptr);
  return doc;
}

TestCase TestCase::from_json(const Json& doc) {
  TestCase tc;
  tc.id = doc.value("id", "");
  tc.model_source = doc.at("model_source").get<std::string>();
  tc.input_spec = doc.at("input_spec").get<std::string>();
  tc.compile_args = doc.value("compile_args", Json::object());
  tc.pipeline = PipelineSpec::from_json(doc.at("pipeline"));
  if (doc.contains("origin") && !doc["origin"].is_null()) {
    tc.origin = CaseOrigin{doc["origin"].value("file", ""),
                           doc["origin"].value("test_name", "")};
  }
  if (doc.contains("parent_id") && !doc["parent_id"].is_null())
    tc.parent_id = doc["parent_id"].get<std::string>();
  if (doc.contains("applied_rule_id") && !doc["applied_rule_id"].is_null())
    tc.applied_rule_id = doc["applied_rule_id"].get<std::string>();
  return tc;
}

std::string TestCase::canonical_payload() const {
  Json doc = to_json();
  doc.erase("id");
  return canonical_dump(doc);
}

void TestCase::assign_id() { id = short_hash(canonical_payload()); }

std::vector<std::string> TestCase::shallow_validate() const {
  std::vector<std::string> out;
  if (trim(model_source).empty()) out.push_back("model_source is empty");
  if (trim(input_spec).empty()) out.push_back("input_spec is empty");
  if (!compile_args.is_object()) out.push_back("compile_args must be an object");
  auto pipeline_violations = pipeline.validate();
  out.insert(out.end(), pipeline_violations.begin(), pipeline_violations.end());
  if (model_source.find("class Model") == std::string::npos)
    out.push_back("model_source must define class Model");
  if (input_spec.find("def gen_input") == std::string::npos)
    out.push_back("input_spec must define gen_input");
  return out;
}

std::string json_to_python_literal(const Json& doc) {
  switch (doc.type()) {
    case Json::value_t::null:
      return "None";
    case Json::value_t::boolean:
      return doc.get<bool>() ? "True" : "False";
    case Json::value_t::array: {
      std::string out = "[";
      bool first = true;
      for (const auto& item : doc) {
        if (!first) out += ", ";
        out += json_to_python_literal(item);
        first = false;
      }
      return out + "]";
    }
    case Json::value_t::object: {
      std::string out = "{";
      bool first = true;
      for (const auto& [key, item] : doc.items()) {
        if (!first) out += ", ";
        out += "\"" + key + "\": " + json_to_python_literal(item);
        first = false;
      }
      return out + "}";
    }
    default:
      return doc.dump();
  }
}

std::string render_test_file(const TestCase& tc) {
  std::ostringstream out;
  out << "import torch\n\n\n";
  out << trim(tc.model_source) << "\n\n\n";
  out << trim(tc.input_spec) << "\n\n\n";
  out << "compiler_args = " << json_to_python_literal(tc.compile_args) << "\n\n\n";

  if (!tc.pipeline.state_mutation_hook.empty())
    out << trim(tc.pipeline.state_mutation_hook) << "\n\n\n";

  if (tc.pipeline.kind == PipelineSpec::Kind::Custom) {
    out << trim(tc.pipeline.custom_source) << "\n\n\n";
  }

  out << "def _clone(value):\n"
         "    if isinstance(value, torch.Tensor):\n"
         "        return value.clone()\n"
         "    if isinstance(value, (list, tuple)):\n"
         "        return type(value)(_clone(v) for v in value)\n"
         "    return value\n\n\n";
  out << "def _compile_subject(model, args):\n"
         "    args = dict(args)\n"
         "    if args.pop(\"fallback_random\", False):\n"
         "        try:\n"
         "            torch._inductor.config.fallback_random = True\n"
         "        except AttributeError:\n"
         "            pass\n"
         "    return torch.compile(model, **args)\n\n\n";

  out << "def testing_pipeline(model_factory, gen_input, compiler_args):\n"
         "    torch.manual_seed(0)\n"
         "    reference_model = model_factory()\n"
         "    torch.manual_seed(0)\n"
         "    subject_model = model_factory()\n"
         "    torch.manual_seed(1)\n"
         "    args = gen_input()\n"
         "    if not isinstance(args, tuple):\n"
         "        args = (args,) if args is not None else ()\n"
         "    ref_args = [_clone(a) for a in args]\n"
         "    sub_args = [_clone(a) for a in args]\n"
         "    compiled = _compile_subject(subject_model, compiler_args)\n";

  switch (tc.pipeline.kind) {
    case PipelineSpec::Kind::SingleRunDifferential:
      out << "    expected = reference_model(*ref_args)\n"
             "    actual = compiled(*sub_args)\n"
             "    torch.testing.assert_close(actual, expected)\n"
             "    for sub_arg, ref_arg in zip(sub_args, ref_args):\n"
             "        if isinstance(ref_arg, torch.Tensor):\n"
             "            torch.testing.assert_close(sub_arg, ref_arg)\n";
      break;
    case PipelineSpec::Kind::RepeatedExecution: {
      out << "    for iteration in range(" << tc.pipeline.repeat_count << "):\n"
             "        expected = reference_model(*ref_args)\n"
             "        actual = compiled(*sub_args)\n"
             "        torch.testing.assert_close(actual, expected)\n";
      if (!tc.pipeline.state_mutation_hook.empty()) {
        out << "        if iteration + 1 < " << tc.pipeline.repeat_count << ":\n"
               "            mutate_state(reference_model, ref_args, iteration + 1)\n"
               "            mutate_state(subject_model, sub_args, iteration + 1)\n";
      }
      break;
    }
    case PipelineSpec::Kind::Custom:
      out << "    class _Ctx:\n"
             "        model_factory = staticmethod(model_factory)\n"
             "        gen_input_fn = staticmethod(gen_input)\n"
             "        compile_model = staticmethod(\n"
             "            lambda m: _compile_subject(m, compiler_args))\n"
             "        @staticmethod\n"
             "        def record_iteration(reference, subject):\n"
             "            torch.testing.assert_close(subject, reference)\n"
             "    pipeline(_Ctx)\n";
      break;
  }
  out << "    print(\"ok\")\n\n\n";
  out << "if __name__ == \"__main__\":\n"
         "    testing_pipeline(Model, gen_input, compiler_args)\n";
  return out.str();
}

}  // namespace alignguard
