#include "alignguard/rules.hpp"

#include <algorithm>

#include "alignguard/errors.hpp"
#include "alignguard/json.hpp"

namespace alignguard {

std::string to_string(TargetComponent c) {
  switch (c) {
    case TargetComponent::ModelStructure:
      return "model_structure";
    case TargetComponent::InputData:
      return "input_data";
    case TargetComponent::CompilationArguments:
      return "compilation_arguments";
    case TargetComponent::TestingPipeline:
      return "testing_pipeline";
  }
  throw std::logic_error("unknown TargetComponent");
}

std::optional<TargetComponent> target_component_from_string(const std::string& s) {
  if (s == "model_structure") return TargetComponent::ModelStructure;
  if (s == "input_data") return TargetComponent::InputData;
  if (s == "compilation_arguments") return TargetComponent::CompilationArguments;
  if (s == "testing_pipeline") return TargetComponent::TestingPipeline;
  return std::nullopt;
}

std::optional<TargetComponent> target_component_from_loose_string(const std::string& s) {
  std::string low = to_lower(trim(s));
  std::replace(low.begin(), low.end(), ' ', '_');
  std::replace(low.begin(), low.end(), '-', '_');
  if (auto direct = target_component_from_string(low)) return direct;
  if (low.find("model") != std::string::npos) return TargetComponent::ModelStructure;
  if (low.find("input") != std::string::npos) return TargetComponent::InputData;
  if (low.find("compil") != std::string::npos)
    return TargetComponent::CompilationArguments;
  if (low.find("pipeline") != std::string::npos || low.find("test") != std::string::npos)
    return TargetComponent::TestingPipeline;
  return std::nullopt;
}

std::string to_string(MatchResult r) {
  switch (r) {
    case MatchResult::Match:
      return "match";
    case MatchResult::NoMatch:
      return "no-match";
    case MatchResult::Unknown:
      return "unknown";
  }
  throw std::logic_error("unknown MatchResult");
}

std::vector<std::string> MutationRule::validate() const {
  std::vector<std::string> out;
  if (rule_id.empty()) out.push_back("rule_id is empty");
  if (trim(action).empty()) out.push_back("action is empty");
  if (trim(example_before).empty() || trim(example_after).empty())
    out.push_back("example pair is incomplete");
  if (example_before == example_after)
    out.push_back("example_before equals example_after");
  if (is_builtin()) {
    if (condition.matcher.is_null()) out.push_back("builtin rule lacks a matcher");
    if (builtin_key.empty()) out.push_back("builtin rule lacks a transform key");
  }
  return out;
}

Json MutationRule::to_json() const {
  Json doc;
  doc["rule_id"] = rule_id;
  doc["target_component"] = to_string(target_component);
  doc["condition"] = {{"description", condition.description},
                      {"matcher", condition.matcher}};
  doc["action"] = action;
  doc["example_before"] = example_before;
  doc["example_after"] = example_after;
  if (provenance.kind == RuleProvenance::Kind::Llm) {
    doc["provenance"] = {{"kind", "llm"}, {"bug_id", provenance.bug_id}};
  } else {
    doc["provenance"] = {{"kind", "builtin"},
                         {"trigger_family", to_string(provenance.family)}};
  }
  doc["builtin_key"] = builtin_key;
  doc["params"] = params;
  return doc;
}

MutationRule MutationRule::from_json(const Json& doc) {
  MutationRule rule;
  rule.rule_id = doc.at("rule_id").get<std::string>();
  auto target = target_component_from_string(doc.value("target_component", ""));
  if (!target) throw FormatError("rule: unknown target_component");
  rule.target_component = *target;
  rule.condition.description = doc["condition"].value("description", "");
  rule.condition.matcher = doc["condition"].value("matcher", Json(nullptr));
  rule.action = doc.value("action", "");
  rule.example_before = doc.value("example_before", "");
  rule.example_after = doc.value("example_after", "");
  const auto& prov = doc.at("provenance");
  if (prov.value("kind", "") == "llm") {
    rule.provenance.kind = RuleProvenance::Kind::Llm;
    rule.provenance.bug_id = prov.value("bug_id", "");
  } else {
    rule.provenance.kind = RuleProvenance::Kind::Builtin;
    auto family = trigger_family_from_string(prov.value("trigger_family", ""));
    if (!family) throw FormatError("rule: unknown builtin trigger_family");
    rule.provenance.family = *family;
  }
  rule.builtin_key = doc.value("builtin_key", "");
  rule.params = doc.value("params", Json::object());
  return rule;
}

namespace {

std::set<std::string> names_of(const Json& matcher, const char* field) {
  std::set<std::string> out;
  for (const auto& n : matcher.value(field, Json::array()))
    out.insert(n.get<std::string>());
  return out;
}

}  // namespace

bool eval_matcher(const Json& matcher, const CaseFacts& facts, const TestCase& tc) {
  if (matcher.is_null()) throw PreconditionError("eval_matcher on null matcher");
  const std::string op = matcher.value("op", "");
  const std::string component = matcher.value("component", "");

  if (op == "true") return true;
  if (op == "and") {
    for (const auto& arg : matcher.at("args"))
      if (!eval_matcher(arg, facts, tc)) return false;
    return true;
  }
  if (op == "or") {
    for (const auto& arg : matcher.at("args"))
      if (eval_matcher(arg, facts, tc)) return true;
    return false;
  }
  if (op == "not") return !eval_matcher(matcher.at("arg"), facts, tc);

  if (op == "contains-call") {
    auto names = names_of(matcher, "names");
    bool need_name_arg0 = matcher.value("arg0_name", false);
    for (const auto& call : facts.calls) {
      if (!component.empty() && call.component != component) continue;
      if (!names.count(call.name)) continue;
      if (need_name_arg0) {
        bool ok = false;
        if (!call.recv.empty()) {
          ok = true;  // method call on a simple name: the receiver is the site
        } else if (!call.args.empty() && call.args[0].is_name) {
          ok = true;
        }
        if (!ok) continue;
      }
      return true;
    }
    return false;
  }
  if (op == "defines-alias-via") {
    auto names = names_of(matcher, "names");
    for (const auto& alias : facts.aliases) {
      if (!component.empty() && alias.component != component) continue;
      if (names.count(alias.op)) return true;
    }
    return false;
  }
  if (op == "has-inplace-op") {
    for (const auto& site : facts.inplace) {
      if (!component.empty() && site.component != component) continue;
      return true;
    }
    return false;
  }
  if (op == "pipeline-kind-is") {
    return to_string(tc.pipeline.kind) == matcher.value("kind", "");
  }
  if (op == "uses-dtype") {
    auto want = names_of(matcher, "dtypes");
    auto have = facts.created_dtypes();
    for (const auto& d : want)
      if (have.count(d)) return true;
    return false;
  }
  if (op == "has-param") {
    auto calls = names_of(matcher, "calls");
    const std::string param = matcher.value("param", "");
    for (const auto& call : facts.calls) {
      if (!component.empty() && call.component != component) continue;
      if (!calls.count(call.name)) continue;
      if (call.kwargs.count(param)) return true;
    }
    return false;
  }
  throw FormatError("unknown matcher op: " + op);
}

MatchResult match_condition(const MutationRule& rule, const CaseFacts& facts,
                            const TestCase& tc, std::string* diagnostic) {
  if (rule.condition.matcher.is_null()) return MatchResult::Unknown;
  try {
    return eval_matcher(rule.condition.matcher, facts, tc) ? MatchResult::Match
                                                           : MatchResult::NoMatch;
  } catch (const Error& e) {
    if (diagnostic) *diagnostic = e.what();
    return MatchResult::Unknown;
  }
}

MatchResult match_condition(const MutationRule& rule, const TestCase& tc,
                            std::string* diagnostic) {
  if (rule.condition.matcher.is_null()) return MatchResult::Unknown;
  try {
    CaseFacts facts = analyze_case(tc);
    return match_condition(rule, facts, tc, diagnostic);
  } catch (const Error& e) {
    if (diagnostic) *diagnostic = e.what();
    return MatchResult::Unknown;
  }
}

namespace {

Json call_matcher(std::initializer_list<const char*> names,
                  const char* component = nullptr, bool arg0_name = false) {
  Json m;
  m["op"] = "contains-call";
  Json arr = Json::array();
  for (const char* n : names) arr.push_back(n);
  m["names"] = arr;
  if (component) m["component"] = component;
  if (arg0_name) m["arg0_name"] = true;
  return m;
}

MutationRule make_builtin(const std::string& key, TriggerFamily family,
                          TargetComponent target, Json matcher,
                          std::string description, std::string action,
                          std::string before, std::string after, Json params) {
  MutationRule rule;
  rule.rule_id = "builtin-" + key;
  rule.target_component = target;
  rule.condition.description = std::move(description);
  rule.condition.matcher = std::move(matcher);
  rule.action = std::move(action);
  rule.example_before = std::move(before);
  rule.example_after = std::move(after);
  rule.provenance.kind = RuleProvenance::Kind::Builtin;
  rule.provenance.family = family;
  rule.builtin_key = key;
  rule.params = std::move(params);
  return rule;
}

std::vector<MutationRule> build_library() {
  std::vector<MutationRule> rules;

  // (a) in-place mutation on a freshly created alias, with the base tensor
  // checked after execution.
  rules.push_back(make_builtin(
      "alias-inplace", TriggerFamily::AliasThenInplace,
      TargetComponent::ModelStructure,
      Json{{"op", "defines-alias-via"},
           {"names", Json::array({"view", "reshape", "expand", "permute", "transpose",
                                  "narrow", "unfold", "squeeze", "unsqueeze",
                                  "flatten", "slice"})},
           {"component", "model"}},
      "the model structure assigns an alias/view of a tensor to a variable",
      "insert an in-place mutation on the alias right after it is created and "
      "keep returning through the alias so the base tensor is compared too",
      "class Model(torch.nn.Module):\n"
      "    def forward(self, x):\n"
      "        y = x.expand(2, *x.shape)\n"
      "        return y\n"
      "\n"
      "def gen_input():\n"
      "    return (torch.tensor([0, 1, 2, 3, 4, 5]),)\n",
      "class Model(torch.nn.Module):\n"
      "    def forward(self, x):\n"
      "        y = x.expand(2, *x.shape)\n"
      "        y[0, 0] = 5\n"
      "        return y\n"
      "\n"
      "def gen_input():\n"
      "    return (torch.tensor([0, 1, 2, 3, 4, 5]),)\n",
      Json{{"variants", Json::array({"indexed_write", "add_inplace", "mul_inplace"})}}));

  // (b) non-contiguous layout interposed before a layout-sensitive consumer.
  rules.push_back(make_builtin(
      "layout-interpose", TriggerFamily::LayoutMutationSequence,
      TargetComponent::ModelStructure,
      call_matcher({"matmul", "mm", "addmm", "softmax", "cumsum"}, "model", true),
      "the model calls a layout-sensitive consumer on a plain tensor variable",
      "materialize a value-identical but non-contiguous layout of the consumer's "
      "input (transpose, copy, transpose back) before the call",
      "class Model(torch.nn.Module):\n"
      "    def forward(self, x):\n"
      "        return torch.softmax(x, 1)\n"
      "\n"
      "def gen_input():\n"
      "    return (torch.arange(6, dtype=torch.float32).reshape(2, 3),)\n",
      "class Model(torch.nn.Module):\n"
      "    def forward(self, x):\n"
      "        ag_nc = x.transpose(0, x.dim() - 1).contiguous().transpose(0, x.dim() - 1)\n"
      "        return torch.softmax(ag_nc, 1)\n"
      "\n"
      "def gen_input():\n"
      "    return (torch.arange(6, dtype=torch.float32).reshape(2, 3),)\n",
      Json{{"variants", Json::array({"transpose_roundtrip", "stack_stride"})}}));

  // (c1) explicit dim parameter rewritten to its negative form.
  rules.push_back(make_builtin(
      "boundary-dim", TriggerFamily::NondefaultParamsEdgeInputs,
      TargetComponent::ModelStructure,
      Json{{"op", "has-param"},
           {"calls", Json::array({"softmax", "cumsum", "unsqueeze", "squeeze",
                                  "narrow", "cat", "stack", "split", "sum", "mean"})},
           {"param", "dim"},
           {"component", "model"}},
      "the model calls an operator with an explicit dim= parameter",
      "rewrite the dim parameter to the equivalent negative index (dim=-1)",
      "class Model(torch.nn.Module):\n"
      "    def forward(self, x):\n"
      "        return torch.softmax(x, dim=1)\n"
      "\n"
      "def gen_input():\n"
      "    return (torch.arange(6, dtype=torch.float32).reshape(2, 3),)\n",
      "class Model(torch.nn.Module):\n"
      "    def forward(self, x):\n"
      "        return torch.softmax(x, dim=-1)\n"
      "\n"
      "def gen_input():\n"
      "    return (torch.arange(6, dtype=torch.float32).reshape(2, 3),)\n",
      Json{{"variants", Json::array({"negative_dim"})}}));

  // (c2) non-default dtype on an input tensor creation.
  rules.push_back(make_builtin(
      "dtype-flip", TriggerFamily::NondefaultParamsEdgeInputs,
      TargetComponent::InputData,
      Json{{"op", "and"},
           {"args",
            Json::array({call_matcher({"tensor", "zeros", "ones", "full", "arange",
                                       "rand", "randn", "linspace"},
                                      "input"),
                         Json{{"op", "uses-dtype"},
                              {"dtypes", Json::array({"float32"})}}})}},
      "the input builder creates a default-precision floating tensor",
      "rewrite the creation to an unusual dtype (float64)",
      "def gen_input():\n"
      "    return (torch.arange(6, dtype=torch.float32).reshape(2, 3),)\n"
      "\n"
      "class Model(torch.nn.Module):\n"
      "    def forward(self, x):\n"
      "        return x * 0.5\n",
      "def gen_input():\n"
      "    return (torch.arange(6, dtype=torch.float64).reshape(2, 3),)\n"
      "\n"
      "class Model(torch.nn.Module):\n"
      "    def forward(self, x):\n"
      "        return x * 0.5\n",
      Json{{"variants", Json::array({"float64"})}}));

  // (c3) edge-case input: first tensor argument emptied along dim 0.
  rules.push_back(make_builtin(
      "empty-input", TriggerFamily::CornerCase, TargetComponent::InputData,
      call_matcher({"tensor", "zeros", "ones", "full", "arange", "rand", "randn"},
                   "input"),
      "the input builder creates at least one tensor",
      "slice the first tensor argument to zero length along its first dimension",
      "def gen_input():\n"
      "    return (torch.arange(6, dtype=torch.float32),)\n"
      "\n"
      "class Model(torch.nn.Module):\n"
      "    def forward(self, x):\n"
      "        return x * 2\n",
      "def _ag_base_gen_input():\n"
      "    return (torch.arange(6, dtype=torch.float32),)\n"
      "\n"
      "def gen_input():\n"
      "    ag_args = list(_ag_base_gen_input())\n"
      "    for ag_i, ag_v in enumerate(ag_args):\n"
      "        if hasattr(ag_v, 'dim') and ag_v.dim() > 0:\n"
      "            ag_args[ag_i] = ag_v[0:0]\n"
      "            break\n"
      "    return tuple(ag_args)\n"
      "\n"
      "class Model(torch.nn.Module):\n"
      "    def forward(self, x):\n"
      "        return x * 2\n",
      Json{{"variants", Json::array({"empty_first_dim"})}}));

  // (c4) boundary value injected into a floating input.
  rules.push_back(make_builtin(
      "inf-boundary", TriggerFamily::UnhandledBoundary, TargetComponent::InputData,
      Json{{"op", "uses-dtype"}, {"dtypes", Json::array({"float32", "float64"})}},
      "the input builder produces floating tensors",
      "set one element of the first floating tensor argument to infinity",
      "def gen_input():\n"
      "    return (torch.arange(6, dtype=torch.float32),)\n"
      "\n"
      "class Model(torch.nn.Module):\n"
      "    def forward(self, x):\n"
      "        return x + 1\n",
      "def _ag_base_gen_input():\n"
      "    return (torch.arange(6, dtype=torch.float32),)\n"
      "\n"
      "def gen_input():\n"
      "    ag_args = list(_ag_base_gen_input())\n"
      "    for ag_v in ag_args:\n"
      "        if hasattr(ag_v, 'dim') and ag_v.dim() > 0 and ag_v.is_floating_point():\n"
      "            ag_v[(0,) * ag_v.dim()] = float('inf')\n"
      "            break\n"
      "    return tuple(ag_args)\n"
      "\n"
      "class Model(torch.nn.Module):\n"
      "    def forward(self, x):\n"
      "        return x + 1\n",
      Json{{"variants", Json::array({"inf_first_element"})}}));

  // (d) extreme magnitudes fed to numerically sensitive operators.
  rules.push_back(make_builtin(
      "extreme-scale", TriggerFamily::ExtremeValues, TargetComponent::InputData,
      call_matcher({"exp", "log", "tanh", "softmax", "sqrt", "pow", "sigmoid",
                    "acosh", "lgamma", "polygamma", "matmul", "mm", "addmm"},
                   "model"),
      "the model calls a numerically sensitive operator",
      "scale floating inputs to extreme magnitudes so numerical error is amplified",
      "def gen_input():\n"
      "    return (torch.arange(6, dtype=torch.float32).reshape(2, 3),)\n"
      "\n"
      "class Model(torch.nn.Module):\n"
      "    def forward(self, x):\n"
      "        return torch.log(x + 1.5)\n",
      "def _ag_base_gen_input():\n"
      "    return (torch.arange(6, dtype=torch.float32).reshape(2, 3),)\n"
      "\n"
      "def gen_input():\n"
      "    ag_args = list(_ag_base_gen_input())\n"
      "    for ag_i, ag_v in enumerate(ag_args):\n"
      "        if hasattr(ag_v, 'dim') and ag_v.is_floating_point():\n"
      "            ag_args[ag_i] = ag_v * 100000.0\n"
      "    return tuple(ag_args)\n"
      "\n"
      "class Model(torch.nn.Module):\n"
      "    def forward(self, x):\n"
      "        return torch.log(x + 1.5)\n",
      Json{{"variants", Json::array({"scale_1e5", "scale_1e-7"})}}));

  // (e) fusion-prone operator chains appended after the model's result.
  rules.push_back(make_builtin(
      "fusion-chain", TriggerFamily::OptimizationSequence,
      TargetComponent::ModelStructure, Json{{"op", "true"}},
      "always applicable: chains are appended to the model output",
      "append a fusion-prone computation chain (matmul+exp, split+cat, "
      "split+stack+tanh, unsqueeze+mul-neg-div) to the returned value",
      "class Model(torch.nn.Module):\n"
      "    def forward(self, x):\n"
      "        return x * 2\n"
      "\n"
      "def gen_input():\n"
      "    return (torch.arange(6, dtype=torch.float32),)\n",
      "class Model(torch.nn.Module):\n"
      "    def forward(self, x):\n"
      "        ag_ret = x * 2\n"
      "        ag_src = ag_ret[0] if isinstance(ag_ret, tuple) else ag_ret\n"
      "        ag_flat = ag_src.reshape(-1)\n"
      "        ag_out = torch.exp(torch.matmul(ag_flat, ag_flat) * 0.001)\n"
      "        return (ag_ret, ag_out)\n"
      "\n"
      "def gen_input():\n"
      "    return (torch.arange(6, dtype=torch.float32),)\n",
      Json{{"variants", Json::array({"matmul_exp", "split_cat", "split_stack_tanh",
                                     "unsqueeze_mul_neg_div"})}}));

  // (f) single-run pipeline converted to repeated execution with a state
  // mutation hook between iterations.
  rules.push_back(make_builtin(
      "repeat-state", TriggerFamily::RepeatedExecutionState,
      TargetComponent::TestingPipeline,
      Json{{"op", "pipeline-kind-is"}, {"kind", "single_run_differential"}},
      "the testing pipeline runs the compiled model exactly once",
      "convert the pipeline to repeated execution (default 6 iterations) with "
      "a hook that perturbs inputs or module attributes between iterations, "
      "comparing against eager per iteration",
      "class Model(torch.nn.Module):\n"
      "    def forward(self, x):\n"
      "        return x * 2\n"
      "\n"
      "def gen_input():\n"
      "    return (torch.arange(6, dtype=torch.float32),)\n",
      "class Model(torch.nn.Module):\n"
      "    def forward(self, x):\n"
      "        return x * 2\n"
      "\n"
      "def gen_input():\n"
      "    return (torch.arange(6, dtype=torch.float32),)\n"
      "\n"
      "def mutate_state(model, args, iteration):\n"
      "    if args and hasattr(args[0], 'add_'):\n"
      "        args[0].add_(1)\n",
      Json{{"variants", Json::array({"input_perturb", "attr_step"})},
           {"repeat_count", 6}}));

  // (g1) host-language control flow wrapped around the model result.
  rules.push_back(make_builtin(
      "control-flow-wrap", TriggerFamily::NonComputationalOps,
      TargetComponent::ModelStructure, Json{{"op", "true"}},
      "always applicable: wraps the return value in python-level control flow",
      "route the returned value through host-language control flow over "
      "tensor-derived quantities (loop bounds from dim())",
      "class Model(torch.nn.Module):\n"
      "    def forward(self, x):\n"
      "        return x * 2\n"
      "\n"
      "def gen_input():\n"
      "    return (torch.arange(6, dtype=torch.float32),)\n",
      "class Model(torch.nn.Module):\n"
      "    def forward(self, x):\n"
      "        ag_ret = x * 2\n"
      "        ag_out = ag_ret\n"
      "        for ag_i in range(int(ag_out.dim()) + 1):\n"
      "            ag_out = ag_out * 1\n"
      "        return ag_out\n"
      "\n"
      "def gen_input():\n"
      "    return (torch.arange(6, dtype=torch.float32),)\n",
      Json{{"variants", Json::array({"dim_loop"})}}));

  // (g2) RNG seeding inside the model plus a random-producing op on a
  // non-contiguous view.
  rules.push_back(make_builtin(
      "rng-seed-inside", TriggerFamily::NonComputationalOps,
      TargetComponent::ModelStructure,
      Json{{"op", "uses-dtype"}, {"dtypes", Json::array({"float32", "float64"})}},
      "the test produces floating tensors the model can add noise to",
      "seed the generator inside the model and draw a random tensor shaped "
      "like a non-contiguous view of the result; pin the RNG via the "
      "fallback-random compile argument",
      "class Model(torch.nn.Module):\n"
      "    def forward(self, x):\n"
      "        return x * 2\n"
      "\n"
      "def gen_input():\n"
      "    return (torch.arange(6, dtype=torch.float32),)\n",
      "class Model(torch.nn.Module):\n"
      "    def forward(self, x):\n"
      "        ag_ret = x * 2\n"
      "        torch.manual_seed(0)\n"
      "        ag_nc = ag_ret.expand(2, *ag_ret.shape)\n"
      "        ag_noise = torch.randn_like(ag_nc)\n"
      "        return ag_ret + ag_noise[0]\n"
      "\n"
      "def gen_input():\n"
      "    return (torch.arange(6, dtype=torch.float32),)\n",
      Json{{"variants", Json::array({"randn_on_view"})}}));

  // (g3) execution-context toggles on the compilation arguments.
  rules.push_back(make_builtin(
      "context-toggle", TriggerFamily::ExecutionContextMutation,
      TargetComponent::CompilationArguments, Json{{"op", "true"}},
      "always applicable: compilation arguments are present on every case",
      "toggle a compilation-context setting (dynamic shapes, compile mode)",
      "class Model(torch.nn.Module):\n"
      "    def forward(self, x):\n"
      "        return x * 2\n"
      "\n"
      "def gen_input():\n"
      "    return (torch.arange(6, dtype=torch.float32),)\n",
      "class Model(torch.nn.Module):\n"
      "    def forward(self, x):\n"
      "        return x * 2\n"
      "\n"
      "def gen_input():\n"
      "    return (torch.arange(6, dtype=torch.float32),)\n"
      "\n"
      "# compiler_args gains {\"dynamic\": True}\n",
      Json{{"variants", Json::array({"dynamic_toggle", "mode_default"})}}));

  return rules;
}

}  // namespace

std::vector<MutationRule> builtin_rules() {
  // Rebuilt per call from constants: stable ids, stable order.
  return build_library();
}

std::vector<MutationRule> builtin_rules(const std::set<TriggerFamily>& filter) {
  auto all = builtin_rules();
  std::vector<MutationRule> out;
  for (auto family : filter) {
    bool any = false;
    for (const auto& rule : all) {
      if (rule.provenance.family == family) any = true;
    }
    if (!any)
      throw ConfigError("no builtin rules for trigger family: " + to_string(family));
  }
  for (const auto& rule : all) {
    if (filter.count(rule.provenance.family)) out.push_back(rule);
  }
  return out;
}

void save_rule(const MutationRule& rule, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  save_json_file(dir / (rule.rule_id + ".json"), rule.to_json());
}

std::vector<MutationRule> load_rules_dir(const std::filesystem::path& dir) {
  std::vector<MutationRule> rules;
  if (!std::filesystem::exists(dir)) return rules;
  std::vector<std::filesystem::path> paths;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.path().extension() == ".json") paths.push_back(entry.path());
  std::sort(paths.begin(), paths.end());
  for (const auto& p : paths) rules.push_back(MutationRule::from_json(load_json_file(p)));
  return rules;
}

}  // namespace alignguard
