#include "alignguard/mutator.hpp"

#include <algorithm>
#include <regex>
#include <sstream>

#include "alignguard/case_facts.hpp"
#include "alignguard/corpus.hpp"
#include "alignguard/errors.hpp"
#include "alignguard/json.hpp"

namespace alignguard {

std::string to_string(ValidationVerdict::Status s) {
  switch (s) {
    case ValidationVerdict::Status::Valid:
      return "valid";
    case ValidationVerdict::Status::SyntaxError:
      return "syntax_error";
    case ValidationVerdict::Status::DeterminismViolation:
      return "determinism_violation";
    case ValidationVerdict::Status::TemplateViolation:
      return "template_violation";
    case ValidationVerdict::Status::NoChange:
      return "no_change";
  }
  throw std::logic_error("unknown validation status");
}

Json Mutant::to_json() const {
  Json doc;
  doc["test_case"] = test_case.to_json();
  doc["diff"] = diff;
  doc["path"] = path == Path::Llm ? "llm" : "builtin";
  doc["validity"] = {{"status", to_string(validity.status)},
                     {"detail", validity.detail}};
  return doc;
}

Mutant Mutant::from_json(const Json& doc) {
  Mutant m;
  m.test_case = TestCase::from_json(doc.at("test_case"));
  m.diff = doc.value("diff", "");
  m.path = doc.value("path", "builtin") == "llm" ? Path::Llm : Path::Builtin;
  const auto& v = doc.value("validity", Json::object());
  std::string status = v.value("status", "valid");
  if (status == "valid") m.validity.status = ValidationVerdict::Status::Valid;
  else if (status == "syntax_error") m.validity.status = ValidationVerdict::Status::SyntaxError;
  else if (status == "determinism_violation")
    m.validity.status = ValidationVerdict::Status::DeterminismViolation;
  else if (status == "template_violation")
    m.validity.status = ValidationVerdict::Status::TemplateViolation;
  else m.validity.status = ValidationVerdict::Status::NoChange;
  m.validity.detail = v.value("detail", "");
  return m;
}

namespace {

struct SourceLines {
  std::vector<std::string> lines;

  explicit SourceLines(const std::string& text) : lines(split_lines(text)) {}

  std::string text() const { return join_lines(lines); }

  std::string indent_of(int line) const {
    const std::string& l = lines.at(static_cast<size_t>(line - 1));
    size_t i = 0;
    while (i < l.size() && (l[i] == ' ' || l[i] == '\t')) ++i;
    return l.substr(0, i);
  }

  // Insert `block` (unindented lines) after `line`, prefixed with `indent`.
  void insert_after(int line, const std::vector<std::string>& block,
                    const std::string& indent) {
    std::vector<std::string> prefixed;
    for (const auto& b : block) prefixed.push_back(indent + b);
    lines.insert(lines.begin() + line, prefixed.begin(), prefixed.end());
  }

  void replace_span(int first, int last, const std::vector<std::string>& block,
                    const std::string& indent) {
    std::vector<std::string> prefixed;
    for (const auto& b : block) prefixed.push_back(indent + b);
    lines.erase(lines.begin() + (first - 1), lines.begin() + last);
    lines.insert(lines.begin() + (first - 1), prefixed.begin(), prefixed.end());
  }

  // Replace [col, end_col) on `line` (0-based columns as the bridge reports).
  void replace_cols(int line, int col, int end_col, const std::string& text) {
    std::string& l = lines.at(static_cast<size_t>(line - 1));
    l = l.substr(0, static_cast<size_t>(col)) + text +
        l.substr(static_cast<size_t>(end_col));
  }

  void insert_at_col(int line, int col, const std::string& text) {
    std::string& l = lines.at(static_cast<size_t>(line - 1));
    l = l.substr(0, static_cast<size_t>(col)) + text + l.substr(static_cast<size_t>(col));
  }
};

std::string wrap_input_builder(const std::string& input_spec,
                               const std::vector<std::string>& wrapper_body) {
  // Rename the original builder and append a wrapping gen_input.
  std::regex def_pat("\\bdef\\s+gen_input\\b");
  std::string renamed =
      std::regex_replace(input_spec, def_pat, "def _ag_base_gen_input",
                         std::regex_constants::format_first_only);
  std::ostringstream out;
  out << trim(renamed) << "\n\n\ndef gen_input():\n";
  out << "    ag_args = list(_ag_base_gen_input())\n";
  for (const auto& line : wrapper_body) out << "    " << line << "\n";
  out << "    return tuple(ag_args)\n";
  return out.str();
}

int variant_index(const MutationRule& rule, const TestCase& seed,
                  std::uint64_t campaign_seed, size_t count) {
  if (count <= 1) return 0;
  DeterministicRng rng(campaign_seed ^ fnv1a64(rule.rule_id + ":" + seed.id));
  return static_cast<int>(rng.next_below(count));
}

std::string chosen_variant(const MutationRule& rule, const TestCase& seed,
                           std::uint64_t campaign_seed) {
  const auto& variants = rule.params.value("variants", Json::array());
  if (variants.empty()) return "";
  int idx = variant_index(rule, seed, campaign_seed, variants.size());
  return variants[static_cast<size_t>(idx)].get<std::string>();
}

struct TransformResult {
  bool declined = false;
  std::string reason;
  TestCase mutated;
};

TransformResult decline(const std::string& reason) {
  TransformResult r;
  r.declined = true;
  r.reason = reason;
  return r;
}

// ---- builtin transforms --------------------------------------------------

TransformResult transform_alias_inplace(const TestCase& seed, const CaseFacts& facts,
                                        const std::string& variant) {
  const AliasSite* site = nullptr;
  for (const auto& alias : facts.aliases) {
    if (alias.component != "model") continue;
    if (!site || alias.line < site->line) site = &alias;
  }
  if (!site) return decline("no alias site in model structure");

  SourceLines model(seed.model_source);
  std::string indent = model.indent_of(site->line);
  std::vector<std::string> block;
  if (variant == "add_inplace") {
    block.push_back(site->target + ".add_(1)");
  } else if (variant == "mul_inplace") {
    block.push_back(site->target + ".mul_(2)");
  } else {
    if (site->op == "expand" && site->nargs >= 2) {
      block.push_back(site->target + "[0, 0] = 5");
    } else {
      block.push_back(site->target + "[(0,) * " + site->target + ".dim()] = 5");
    }
  }
  model.insert_after(site->line, block, indent);

  TransformResult result;
  result.mutated = seed;
  result.mutated.model_source = model.text();

  // The standard pipelines compare inputs after execution, which covers the
  // base tensor when it is a forward parameter; otherwise return it too.
  bool base_is_param = false;
  if (facts.model && facts.model->forward) {
    for (const auto& arg : facts.model->forward->args)
      if (arg == site->base) base_is_param = true;
  }
  if (!base_is_param && facts.model && facts.model->forward &&
      facts.model->forward->return_line > 0 &&
      !facts.model->forward->return_expr.empty()) {
    // Line numbers shift by the block inserted above.
    int shift = static_cast<int>(block.size());
    int ret_line = facts.model->forward->return_line;
    int ret_end = facts.model->forward->return_end_line;
    if (ret_line > site->line) {
      ret_line += shift;
      ret_end += shift;
    }
    SourceLines shifted(result.mutated.model_source);
    std::string ret_indent = shifted.indent_of(ret_line);
    std::vector<std::string> ret_block = {
        "return (" + facts.model->forward->return_expr + ", " + site->base + ")"};
    shifted.replace_span(ret_line, ret_end, ret_block, ret_indent);
    result.mutated.model_source = shifted.text();
  }
  return result;
}

TransformResult transform_layout_interpose(const TestCase& seed, const CaseFacts& facts,
                                           const std::string& variant) {
  static const std::set<std::string> kConsumers = {"matmul", "mm", "addmm", "softmax",
                                                   "cumsum"};
  const CallSite* site = nullptr;
  for (const auto& call : facts.calls) {
    if (call.component != "model" || !kConsumers.count(call.name)) continue;
    bool usable = (!call.args.empty() && call.args[0].is_name) || !call.recv.empty();
    if (!usable) continue;
    if (!site || call.line < site->line) site = &call;
  }
  if (!site) return decline("no layout-sensitive consumer with a simple-name input");

  SourceLines model(seed.model_source);
  std::string input_name;
  if (!site->args.empty() && site->args[0].is_name) {
    input_name = site->args[0].text;
    model.replace_cols(site->args[0].line, site->args[0].col, site->args[0].end_col,
                       "ag_nc");
  } else {
    input_name = site->recv;
    model.replace_cols(site->line, site->col,
                       site->col + static_cast<int>(input_name.size()), "ag_nc");
  }
  std::string indent = model.indent_of(site->line);
  std::vector<std::string> block;
  if (variant == "stack_stride") {
    block.push_back("ag_nc = torch.stack([" + input_name + ", " + input_name +
                    "], dim=-1)[..., 0]");
  } else {
    block.push_back("ag_nc = " + input_name + ".transpose(0, " + input_name +
                    ".dim() - 1).contiguous().transpose(0, " + input_name +
                    ".dim() - 1)");
  }
  model.insert_after(site->line - 1, block, indent);

  TransformResult result;
  result.mutated = seed;
  result.mutated.model_source = model.text();
  return result;
}

TransformResult transform_boundary_dim(const TestCase& seed, const CaseFacts& facts,
                                       const std::string&) {
  static const std::set<std::string> kOps = {"softmax", "cumsum", "unsqueeze",
                                             "squeeze",  "narrow", "cat",
                                             "stack",    "split",  "sum",
                                             "mean"};
  for (const auto& call : facts.calls) {
    if (call.component != "model" || !kOps.count(call.name)) continue;
    auto it = call.kwargs.find("dim");
    if (it == call.kwargs.end()) continue;
    const auto& kw = it->second;
    if (!kw.literal.is_number_integer() || kw.literal.get<int>() < 0) continue;
    SourceLines model(seed.model_source);
    model.replace_cols(kw.line, kw.col, kw.end_col, "-1");
    TransformResult result;
    result.mutated = seed;
    result.mutated.model_source = model.text();
    return result;
  }
  return decline("no call with a rewritable non-negative dim parameter");
}

TransformResult transform_dtype_flip(const TestCase& seed, const CaseFacts& facts,
                                     const std::string&) {
  // Prefer rewriting an explicit float32 dtype; otherwise add the kwarg to a
  // default-float creation.
  for (const auto& call : facts.calls) {
    if (call.component != "input") continue;
    auto it = call.kwargs.find("dtype");
    if (it == call.kwargs.end()) continue;
    if (it->second.dotted == "torch.float32" || it->second.dotted == "float32") {
      SourceLines input(seed.input_spec);
      input.replace_cols(it->second.line, it->second.col, it->second.end_col,
                         "torch.float64");
      TransformResult result;
      result.mutated = seed;
      result.mutated.input_spec = input.text();
      return result;
    }
  }
  static const std::set<std::string> kDefaultFloat = {"rand", "randn", "zeros",
                                                      "ones", "linspace"};
  for (const auto& call : facts.calls) {
    if (call.component != "input" || !kDefaultFloat.count(call.name)) continue;
    if (call.kwargs.count("dtype")) continue;
    SourceLines input(seed.input_spec);
    input.insert_at_col(call.end_line, call.end_col - 1, ", dtype=torch.float64");
    TransformResult result;
    result.mutated = seed;
    result.mutated.input_spec = input.text();
    return result;
  }
  return decline("no float32 creation to rewrite in the input builder");
}

TransformResult transform_input_wrapper(const TestCase& seed,
                                        const std::vector<std::string>& body) {
  if (seed.input_spec.find("def gen_input") == std::string::npos)
    return decline("input builder not found");
  TransformResult result;
  result.mutated = seed;
  result.mutated.input_spec = wrap_input_builder(seed.input_spec, body);
  return result;
}

TransformResult transform_empty_input(const TestCase& seed, const CaseFacts&,
                                      const std::string&) {
  return transform_input_wrapper(
      seed, {"for ag_i, ag_v in enumerate(ag_args):",
             "    if hasattr(ag_v, 'dim') and ag_v.dim() > 0:",
             "        ag_args[ag_i] = ag_v[0:0]", "        break"});
}

TransformResult transform_inf_boundary(const TestCase& seed, const CaseFacts&,
                                       const std::string&) {
  return transform_input_wrapper(
      seed, {"for ag_v in ag_args:",
             "    if hasattr(ag_v, 'dim') and ag_v.dim() > 0 and ag_v.is_floating_point():",
             "        ag_v[(0,) * ag_v.dim()] = float('inf')", "        break"});
}

TransformResult transform_extreme_scale(const TestCase& seed, const CaseFacts&,
                                        const std::string& variant) {
  std::string factor = variant == "scale_1e-7" ? "1e-07" : "100000.0";
  return transform_input_wrapper(
      seed, {"for ag_i, ag_v in enumerate(ag_args):",
             "    if hasattr(ag_v, 'dim') and ag_v.is_floating_point():",
             "        ag_args[ag_i] = ag_v * " + factor});
}

TransformResult transform_fusion_chain(const TestCase& seed, const CaseFacts& facts,
                                       const std::string& variant) {
  if (!facts.model || !facts.model->forward || facts.model->forward->return_line == 0 ||
      facts.model->forward->return_expr.empty())
    return decline("model forward has no return expression");
  const auto& fwd = *facts.model->forward;

  std::vector<std::string> block = {
      "ag_ret = (" + fwd.return_expr + ")",
      "ag_src = ag_ret[0] if isinstance(ag_ret, tuple) else ag_ret",
      "ag_flat = ag_src.reshape(-1)",
  };
  if (variant == "split_cat") {
    block.push_back("ag_parts = torch.split(ag_flat, 1)");
    block.push_back("ag_out = torch.cat(ag_parts)");
  } else if (variant == "split_stack_tanh") {
    block.push_back("ag_parts = torch.split(ag_flat, 1)");
    block.push_back("ag_out = torch.tanh(torch.stack(ag_parts))");
  } else if (variant == "unsqueeze_mul_neg_div") {
    block.push_back("ag_u = ag_flat.unsqueeze(0)");
    block.push_back("ag_out = (ag_u * 3).neg() / 2");
  } else {  // matmul_exp
    block.push_back("ag_out = torch.exp(torch.matmul(ag_flat, ag_flat) * 0.001)");
  }
  block.push_back("return (ag_ret, ag_out)");

  SourceLines model(seed.model_source);
  std::string indent = model.indent_of(fwd.return_line);
  model.replace_span(fwd.return_line, fwd.return_end_line, block, indent);

  TransformResult result;
  result.mutated = seed;
  result.mutated.model_source = model.text();
  return result;
}

TransformResult transform_repeat_state(const TestCase& seed, const CaseFacts&,
                                       const std::string& variant, int repeat_count) {
  if (seed.pipeline.kind != PipelineSpec::Kind::SingleRunDifferential)
    return decline("pipeline is not single-run differential");
  TransformResult result;
  result.mutated = seed;
  result.mutated.pipeline.kind = PipelineSpec::Kind::RepeatedExecution;
  result.mutated.pipeline.repeat_count = repeat_count;
  if (variant == "attr_step") {
    result.mutated.pipeline.state_mutation_hook =
        "def mutate_state(model, args, iteration):\n"
        "    setattr(model, 'ag_step', iteration)\n";
  } else {
    result.mutated.pipeline.state_mutation_hook =
        "def mutate_state(model, args, iteration):\n"
        "    for ag_v in args:\n"
        "        if hasattr(ag_v, 'add_'):\n"
        "            ag_v.add_(1)\n"
        "            break\n";
  }
  return result;
}

TransformResult transform_control_flow_wrap(const TestCase& seed, const CaseFacts& facts,
                                            const std::string&) {
  if (!facts.model || !facts.model->forward || facts.model->forward->return_line == 0 ||
      facts.model->forward->return_expr.empty())
    return decline("model forward has no return expression");
  const auto& fwd = *facts.model->forward;
  std::vector<std::string> block = {
      "ag_ret = (" + fwd.return_expr + ")",
      "ag_out = ag_ret[0] if isinstance(ag_ret, tuple) else ag_ret",
      "for ag_i in range(int(ag_out.dim()) + 1):",
      "    ag_out = ag_out * 1",
      "return ag_out",
  };
  SourceLines model(seed.model_source);
  std::string indent = model.indent_of(fwd.return_line);
  model.replace_span(fwd.return_line, fwd.return_end_line, block, indent);
  TransformResult result;
  result.mutated = seed;
  result.mutated.model_source = model.text();
  return result;
}

TransformResult transform_rng_seed_inside(const TestCase& seed, const CaseFacts& facts,
                                          const std::string&) {
  if (!facts.model || !facts.model->forward || facts.model->forward->return_line == 0 ||
      facts.model->forward->return_expr.empty())
    return decline("model forward has no return expression");
  const auto& fwd = *facts.model->forward;
  std::vector<std::string> block = {
      "ag_ret = (" + fwd.return_expr + ")",
      "ag_base = ag_ret[0] if isinstance(ag_ret, tuple) else ag_ret",
      "torch.manual_seed(0)",
      "ag_nc = ag_base.expand(2, *ag_base.shape)",
      "ag_noise = torch.randn_like(ag_nc)",
      "return ag_base + ag_noise[0]",
  };
  SourceLines model(seed.model_source);
  std::string indent = model.indent_of(fwd.return_line);
  model.replace_span(fwd.return_line, fwd.return_end_line, block, indent);
  TransformResult result;
  result.mutated = seed;
  result.mutated.model_source = model.text();
  result.mutated.compile_args["fallback_random"] = true;
  return result;
}

TransformResult transform_context_toggle(const TestCase& seed, const CaseFacts&,
                                         const std::string& variant) {
  TransformResult result;
  result.mutated = seed;
  Json& args = result.mutated.compile_args;
  if (variant == "mode_default") {
    std::string current = args.value("mode", "");
    args["mode"] = current == "default" ? "reduce-overhead" : "default";
  } else {
    bool current = args.value("dynamic", false);
    args["dynamic"] = !current;
  }
  return result;
}

TransformResult apply_builtin(const MutationRule& rule, const TestCase& seed,
                              const CaseFacts& facts, const std::string& variant) {
  const std::string& key = rule.builtin_key;
  if (key == "alias-inplace") return transform_alias_inplace(seed, facts, variant);
  if (key == "layout-interpose") return transform_layout_interpose(seed, facts, variant);
  if (key == "boundary-dim") return transform_boundary_dim(seed, facts, variant);
  if (key == "dtype-flip") return transform_dtype_flip(seed, facts, variant);
  if (key == "empty-input") return transform_empty_input(seed, facts, variant);
  if (key == "inf-boundary") return transform_inf_boundary(seed, facts, variant);
  if (key == "extreme-scale") return transform_extreme_scale(seed, facts, variant);
  if (key == "fusion-chain") return transform_fusion_chain(seed, facts, variant);
  if (key == "repeat-state")
    return transform_repeat_state(seed, facts, variant,
                                  rule.params.value("repeat_count", 6));
  if (key == "control-flow-wrap") return transform_control_flow_wrap(seed, facts, variant);
  if (key == "rng-seed-inside") return transform_rng_seed_inside(seed, facts, variant);
  if (key == "context-toggle") return transform_context_toggle(seed, facts, variant);
  throw Error("unknown builtin transform key: " + key);
}

}  // namespace

CompletionRequest build_mutation_prompt(const MutationRule& rule,
                                        const TestCase& seed,
                                        const GatewayConfig& config,
                                        const std::string& issue_context) {
  std::ostringstream user;
  user << "Task: Apply the mutation plan to the seed test case.\n\n";
  user << "Input:\n";
  user << "Mutation Plan:\n";
  user << "  Target Mutable Component: " << to_string(rule.target_component) << "\n";
  user << "  Condition: " << rule.condition.description << "\n";
  user << "  Action: " << rule.action << "\n";
  user << "  Example Mutation: " << rule.example_before << " -> " << rule.example_after
       << "\n\n";
  if (!issue_context.empty())
    user << "Issue Report (context):\n<<<ISSUE\n" << issue_context << "\nISSUE\n\n";
  user << "Seed Code:\n```python\n" << render_test_file(seed) << "```\n\n";
  user << "Output (a single JSON object):\n"
          "{\n"
          "  \"Mutated Code\": \"<the full mutated test file, or NOT_APPLICABLE "
          "when the condition does not hold for this seed>\",\n"
          "  \"Explanation\": \"<brief explanation of how the plan was applied>\"\n"
          "}\n\n";
  user << "Constraints:\n"
          "- Avoid breaking the constraints of the original seed code; keep the "
          "template structure (Model class, gen_input, compiler_args, "
          "testing_pipeline) intact.\n"
          "- Avoid introducing syntax errors or semantic errors that are not "
          "related to the mutation plan.\n"
          "- Avoid introducing randomness that may lead to non-deterministic "
          "test results; seed any generator you add.\n";

  CompletionRequest req;
  req.model_name = config.mutation_model_name;
  req.temperature = config.temperature;
  req.system_text =
      "You are a precise code-mutation engine for compiler test cases. You "
      "apply mutation plans without changing anything else.";
  req.user_text = user.str();
  req.stage = "mutate:" + rule.rule_id + ":" + seed.id;
  return req;
}

ValidationVerdict validate_mutant(const TestCase& seed, const TestCase& mutant,
                                  const std::string& diff) {
  ValidationVerdict verdict;

  if (auto err = python_parse_error(mutant.model_source)) {
    verdict.status = ValidationVerdict::Status::SyntaxError;
    verdict.detail = "model_source: " + *err;
    return verdict;
  }
  if (auto err = python_parse_error(mutant.input_spec)) {
    verdict.status = ValidationVerdict::Status::SyntaxError;
    verdict.detail = "input_spec: " + *err;
    return verdict;
  }
  if (!mutant.pipeline.state_mutation_hook.empty()) {
    if (auto err = python_parse_error(mutant.pipeline.state_mutation_hook)) {
      verdict.status = ValidationVerdict::Status::SyntaxError;
      verdict.detail = "state_mutation_hook: " + *err;
      return verdict;
    }
  }
  if (mutant.pipeline.kind == PipelineSpec::Kind::Custom) {
    if (auto err = python_parse_error(mutant.pipeline.custom_source)) {
      verdict.status = ValidationVerdict::Status::SyntaxError;
      verdict.detail = "custom_source: " + *err;
      return verdict;
    }
  }

  auto lint = lint_determinism(mutant);
  if (!lint.empty()) {
    verdict.status = ValidationVerdict::Status::DeterminismViolation;
    verdict.detail = lint.front().kind + ": " + lint.front().call + " (" +
                     lint.front().component + " line " +
                     std::to_string(lint.front().line) + ")";
    return verdict;
  }

  auto shallow = mutant.shallow_validate();
  if (!shallow.empty()) {
    verdict.status = ValidationVerdict::Status::TemplateViolation;
    verdict.detail = shallow.front();
    return verdict;
  }
  try {
    CaseFacts facts = analyze_case(mutant);
    if (!facts.model || !facts.model->forward) {
      verdict.status = ValidationVerdict::Status::TemplateViolation;
      verdict.detail = "mutant lacks a Model class with forward";
      return verdict;
    }
    if (!facts.input_fn) {
      verdict.status = ValidationVerdict::Status::TemplateViolation;
      verdict.detail = "mutant lacks a gen_input function";
      return verdict;
    }
  } catch (const Error& e) {
    verdict.status = ValidationVerdict::Status::TemplateViolation;
    verdict.detail = e.what();
    return verdict;
  }

  if (trim(diff).empty() || mutant.canonical_payload() == seed.canonical_payload()) {
    verdict.status = ValidationVerdict::Status::NoChange;
    verdict.detail = "mutant is identical to its seed";
    return verdict;
  }
  return verdict;
}

MutationOutcome mutate(const MutationRule& rule, const TestCase& seed,
                       std::uint64_t campaign_seed, Gateway* gateway,
                       const std::string& issue_context) {
  CaseFacts facts = analyze_case(seed);
  std::string diagnostic;
  MatchResult match = match_condition(rule, facts, seed, &diagnostic);
  if (match == MatchResult::NoMatch)
    throw PreconditionError("mutate called with a non-matching rule (" +
                            rule.rule_id + " on " + seed.id + ")");

  MutationOutcome outcome;
  TestCase mutated;

  if (rule.is_builtin()) {
    std::string variant = chosen_variant(rule, seed, campaign_seed);
    TransformResult t = apply_builtin(rule, seed, facts, variant);
    if (t.declined) {
      outcome.kind = MutationOutcome::Kind::Declined;
      outcome.reason = t.reason;
      return outcome;
    }
    mutated = std::move(t.mutated);
  } else {
    if (!gateway)
      throw PreconditionError("llm rule requires a configured gateway");
    CompletionRequest req =
        build_mutation_prompt(rule, seed, gateway->config(), issue_context);
    Json doc = gateway->complete_structured(req, {"Mutated Code"});
    std::string code = doc["Mutated Code"].is_string()
                           ? doc["Mutated Code"].get<std::string>()
                           : doc["Mutated Code"].dump();
    if (trim(code) == "NOT_APPLICABLE" || trim(code).empty()) {
      outcome.kind = MutationOutcome::Kind::Declined;
      outcome.reason = "mutator declared the rule inapplicable";
      return outcome;
    }
    std::string reason, detail;
    auto restandardized = standardize_raw_test("llm-mutant.py", code, &reason, &detail);
    if (!restandardized) {
      // Surface as an (invalid) mutant rather than a decline so the
      // campaign logs it against the validity gate.
      mutated = seed;
      mutated.model_source = code;  // keeps the raw text for diagnostics
      mutated.parent_id = seed.id;
      mutated.applied_rule_id = rule.rule_id;
      mutated.origin.reset();
      mutated.assign_id();
      Mutant m;
      m.test_case = mutated;
      m.path = Mutant::Path::Llm;
      m.diff = unified_diff(seed.canonical_payload(), mutated.canonical_payload(),
                            "seed", "mutant");
      m.validity.status = ValidationVerdict::Status::TemplateViolation;
      m.validity.detail = reason + ": " + detail;
      outcome.mutant = std::move(m);
      return outcome;
    }
    mutated = std::move(*restandardized);
    if (mutated.compile_args.empty()) mutated.compile_args = seed.compile_args;
  }

  mutated.parent_id = seed.id;
  mutated.applied_rule_id = rule.rule_id;
  mutated.origin.reset();
  mutated.assign_id();

  Mutant m;
  m.test_case = mutated;
  m.path = rule.is_builtin() ? Mutant::Path::Builtin : Mutant::Path::Llm;
  m.diff = unified_diff(seed.canonical_payload(), mutated.canonical_payload(), "seed",
                        "mutant");
  m.validity = validate_mutant(seed, mutated, m.diff);
  outcome.mutant = std::move(m);
  return outcome;
}

BatchResult batch_mutate(const std::vector<MutationRule>& rules,
                         const std::vector<TestCase>& seeds, size_t budget,
                         std::uint64_t campaign_seed, Gateway* gateway) {
  if (budget == 0) throw PreconditionError("batch_mutate: budget must be positive");

  struct Pair {
    const MutationRule* rule;
    const TestCase* seed;
  };
  std::vector<Pair> pairs;
  for (const auto& rule : rules)
    for (const auto& seed : seeds) pairs.push_back({&rule, &seed});
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.rule->rule_id != b.rule->rule_id) return a.rule->rule_id < b.rule->rule_id;
    return a.seed->id < b.seed->id;
  });
  DeterministicRng rng(campaign_seed);
  deterministic_shuffle(pairs, rng);

  BatchResult result;
  for (const auto& pair : pairs) {
    if (result.mutants.size() >= budget) break;
    BatchEntry entry;
    entry.rule_id = pair.rule->rule_id;
    entry.seed_id = pair.seed->id;
    try {
      MatchResult match = match_condition(*pair.rule, *pair.seed);
      if (match == MatchResult::NoMatch) {
        entry.event = "no-match";
        result.log.push_back(entry);
        continue;
      }
      MutationOutcome outcome = mutate(*pair.rule, *pair.seed, campaign_seed, gateway);
      if (outcome.kind == MutationOutcome::Kind::Declined) {
        entry.event = "declined";
        entry.detail = outcome.reason;
      } else if (outcome.mutant->validity.status == ValidationVerdict::Status::Valid) {
        entry.event = "produced";
        entry.detail = outcome.mutant->test_case.id;
        result.mutants.push_back(std::move(*outcome.mutant));
      } else {
        entry.event = "invalid";
        entry.detail = to_string(outcome.mutant->validity.status) + ": " +
                       outcome.mutant->validity.detail;
      }
    } catch (const Error& e) {
      entry.event = "error";
      entry.detail = e.what();
    }
    result.log.push_back(entry);
  }
  return result;
}

}  // namespace alignguard
