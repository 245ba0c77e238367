#include "alignguard/case_facts.hpp"

#include "alignguard/errors.hpp"
#include "alignguard/json.hpp"
#include "alignguard/python_runtime.hpp"

namespace alignguard {

namespace {

ArgSite parse_arg(const Json& doc) {
  ArgSite a;
  a.text = doc.value("text", "");
  a.is_name = doc.value("is_name", false);
  a.line = doc.value("line", 0);
  a.col = doc.value("col", 0);
  a.end_line = doc.value("end_line", 0);
  a.end_col = doc.value("end_col", 0);
  return a;
}

CallSite parse_call(const Json& doc) {
  CallSite c;
  c.component = doc.value("component", "");
  c.name = doc.value("name", "");
  c.dotted = doc.value("dotted", "");
  if (doc.contains("recv") && !doc["recv"].is_null()) c.recv = doc["recv"].get<std::string>();
  c.line = doc.value("line", 0);
  c.col = doc.value("col", 0);
  c.end_line = doc.value("end_line", 0);
  c.end_col = doc.value("end_col", 0);
  for (const auto& a : doc.value("args", Json::array())) c.args.push_back(parse_arg(a));
  if (doc.contains("kwargs")) {
    for (const auto& [key, kw] : doc["kwargs"].items()) {
      KwargSite site;
      site.text = kw.value("text", "");
      site.literal = kw.contains("value") ? kw["value"] : Json(nullptr);
      if (kw.contains("dotted") && !kw["dotted"].is_null())
        site.dotted = kw["dotted"].get<std::string>();
      site.line = kw.value("line", 0);
      site.col = kw.value("col", 0);
      site.end_line = kw.value("end_line", 0);
      site.end_col = kw.value("end_col", 0);
      c.kwargs[key] = site;
    }
  }
  c.has_star_args = doc.value("has_star_args", false);
  c.nargs = doc.value("nargs", 0);
  return c;
}

LintCall parse_lint_call(const Json& doc) {
  LintCall l;
  l.component = doc.value("component", "");
  l.name = doc.value("name", "");
  l.dotted = doc.value("dotted", "");
  l.line = doc.value("line", 0);
  return l;
}

std::vector<StmtSpan> parse_stmts(const Json& doc) {
  std::vector<StmtSpan> out;
  for (const auto& s : doc) {
    StmtSpan span;
    span.line = s.value("line", 0);
    span.end_line = s.value("end_line", 0);
    span.is_return = s.value("is_return", false);
    span.kind = s.value("kind", "");
    out.push_back(span);
  }
  return out;
}

}  // namespace

bool CaseFacts::contains_call(const std::set<std::string>& names,
                              const std::string& component) const {
  return first_call(names, component) != nullptr;
}

const CallSite* CaseFacts::first_call(const std::set<std::string>& names,
                                      const std::string& component) const {
  const CallSite* best = nullptr;
  for (const auto& call : calls) {
    if (!component.empty() && call.component != component) continue;
    if (!names.count(call.name)) continue;
    if (!best || call.line < best->line ||
        (call.line == best->line && call.col < best->col)) {
      best = &call;
    }
  }
  return best;
}

std::set<std::string> CaseFacts::created_dtypes() const {
  std::set<std::string> out;
  for (const auto& c : creations) {
    if (!c.dtype.empty()) {
      out.insert(c.dtype);
    } else if (c.fn == "rand" || c.fn == "randn" || c.fn == "rand_like" ||
               c.fn == "randn_like" || c.fn == "linspace" || c.fn == "zeros" ||
               c.fn == "ones" || c.has_float_literal) {
      out.insert("float32");
    }
  }
  return out;
}

std::optional<std::string> python_parse_error(const std::string& source) {
  Json req;
  req["op"] = "parse_check";
  req["source"] = source;
  Json res = bridge_call(req);
  if (res.value("ok", false)) return std::nullopt;
  std::string msg = res.value("error", "syntax error");
  if (res.contains("line")) msg += " (line " + std::to_string(res.value("line", 0)) + ")";
  return msg;
}

CaseFacts analyze_case(const TestCase& tc) {
  Json req;
  req["op"] = "facts";
  req["model_source"] = tc.model_source;
  req["input_spec"] = tc.input_spec;
  if (!tc.pipeline.state_mutation_hook.empty())
    req["extra_source"] = tc.pipeline.state_mutation_hook;
  Json res = bridge_call(req);
  if (res.contains("ok") && !res.value("ok", true))
    throw FormatError("component does not parse: " + res.value("error", "?"));

  CaseFacts facts;
  for (const auto& c : res.value("calls", Json::array())) facts.calls.push_back(parse_call(c));
  for (const auto& a : res.value("aliases", Json::array())) {
    AliasSite site;
    site.component = a.value("component", "");
    site.target = a.value("target", "");
    site.base = a.value("base", "");
    site.op = a.value("op", "");
    site.line = a.value("line", 0);
    site.nargs = a.value("nargs", 0);
    site.has_star_args = a.value("has_star_args", false);
    facts.aliases.push_back(site);
  }
  for (const auto& i : res.value("inplace", Json::array())) {
    InplaceSite site;
    site.component = i.value("component", "");
    site.kind = i.value("kind", "");
    site.target = i.value("target", "");
    site.op = i.value("op", "");
    site.line = i.value("line", 0);
    facts.inplace.push_back(site);
  }
  for (const auto& c : res.value("creations", Json::array())) {
    CreationSite site;
    site.component = c.value("component", "");
    site.fn = c.value("fn", "");
    if (c.contains("dtype") && !c["dtype"].is_null()) site.dtype = c["dtype"].get<std::string>();
    site.line = c.value("line", 0);
    site.has_float_literal = c.value("has_float_literal", false);
    facts.creations.push_back(site);
  }
  for (const auto& l : res.value("literals", Json::array())) {
    LiteralSite site;
    site.component = l.value("component", "");
    site.value = l.value("value", 0.0);
    site.is_int = l.value("is_int", false);
    site.line = l.value("line", 0);
    site.col = l.value("col", 0);
    site.end_col = l.value("end_col", 0);
    facts.literals.push_back(site);
  }
  for (const auto& s : res.value("seed_calls", Json::array()))
    facts.seed_calls.push_back(parse_lint_call(s));
  for (const auto& r : res.value("random_calls", Json::array()))
    facts.random_calls.push_back(parse_lint_call(r));
  for (const auto& t : res.value("time_calls", Json::array()))
    facts.time_calls.push_back(parse_lint_call(t));

  if (res.contains("model") && !res["model"].is_null()) {
    const auto& m = res["model"];
    ModelInfo info;
    info.class_name = m.value("class_name", "");
    info.line = m.value("line", 0);
    info.end_line = m.value("end_line", 0);
    if (m.contains("forward") && !m["forward"].is_null()) {
      const auto& f = m["forward"];
      ForwardInfo fwd;
      fwd.args = f.value("args", std::vector<std::string>{});
      fwd.body = parse_stmts(f.value("body", Json::array()));
      fwd.indent = f.value("indent", 8);
      fwd.return_line = f["return_line"].is_null() ? 0 : f.value("return_line", 0);
      fwd.return_end_line =
          f["return_end_line"].is_null() ? 0 : f.value("return_end_line", 0);
      if (f.contains("return_expr") && !f["return_expr"].is_null())
        fwd.return_expr = f["return_expr"].get<std::string>();
      fwd.return_is_tuple = f.value("return_is_tuple", false);
      info.forward = fwd;
    }
    facts.model = info;
  }
  if (res.contains("input_fn") && !res["input_fn"].is_null()) {
    const auto& f = res["input_fn"];
    InputFnInfo info;
    info.name = f.value("name", "");
    info.line = f.value("line", 0);
    info.end_line = f.value("end_line", 0);
    info.body = parse_stmts(f.value("body", Json::array()));
    info.indent = f.value("indent", 4);
    info.return_line = f["return_line"].is_null() ? 0 : f.value("return_line", 0);
    if (f.contains("return_expr") && !f["return_expr"].is_null())
      info.return_expr = f["return_expr"].get<std::string>();
    facts.input_fn = info;
  }
  return facts;
}

}  // namespace alignguard
