#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "alignguard/test_case.hpp"
#include "alignguard/util.hpp"

namespace alignguard {

// Structural facts about a test case's components, extracted by the
// python ast bridge. Line numbers are 1-based within each component.

struct ArgSite {
  std::string text;
  bool is_name = false;
  int line = 0, col = 0, end_line = 0, end_col = 0;
};

struct KwargSite {
  std::string text;
  Json literal;  // null when not a literal
  std::string dotted;
  int line = 0, col = 0, end_line = 0, end_col = 0;
};

struct CallSite {
  std::string component;  // "model" | "input" | "extra"
  std::string name;       // last dotted segment
  std::string dotted;
  std::string recv;  // receiver when a simple name, else empty
  int line = 0, col = 0, end_line = 0, end_col = 0;
  std::vector<ArgSite> args;
  std::map<std::string, KwargSite> kwargs;
  bool has_star_args = false;
  int nargs = 0;
};

struct AliasSite {
  std::string component;
  std::string target;
  std::string base;
  std::string op;  // view op name, or "slice"
  int line = 0;
  int nargs = 0;
  bool has_star_args = false;
};

struct InplaceSite {
  std::string component;
  std::string kind;  // "setitem" | "augassign" | "method"
  std::string target;
  std::string op;
  int line = 0;
};

struct CreationSite {
  std::string component;
  std::string fn;
  std::string dtype;  // empty when unspecified
  int line = 0;
  bool has_float_literal = false;
};

struct LintCall {
  std::string component;
  std::string name;
  std::string dotted;
  int line = 0;
};

struct LiteralSite {
  std::string component;
  double value = 0;
  bool is_int = false;
  int line = 0, col = 0, end_col = 0;
};

struct StmtSpan {
  int line = 0, end_line = 0;
  bool is_return = false;
  std::string kind;
};

struct ForwardInfo {
  std::vector<std::string> args;  // excluding self
  std::vector<StmtSpan> body;
  int indent = 8;
  int return_line = 0, return_end_line = 0;
  std::string return_expr;
  bool return_is_tuple = false;
};

struct ModelInfo {
  std::string class_name;
  int line = 0, end_line = 0;
  std::optional<ForwardInfo> forward;
};

struct InputFnInfo {
  std::string name;
  int line = 0, end_line = 0;
  std::vector<StmtSpan> body;
  int indent = 4;
  int return_line = 0;
  std::string return_expr;
};

struct CaseFacts {
  std::vector<CallSite> calls;
  std::vector<AliasSite> aliases;
  std::vector<InplaceSite> inplace;
  std::vector<CreationSite> creations;
  std::vector<LiteralSite> literals;
  std::vector<LintCall> seed_calls;
  std::vector<LintCall> random_calls;
  std::vector<LintCall> time_calls;
  std::optional<ModelInfo> model;
  std::optional<InputFnInfo> input_fn;

  bool contains_call(const std::set<std::string>& names,
                     const std::string& component = "") const;
  const CallSite* first_call(const std::set<std::string>& names,
                             const std::string& component = "") const;
  bool has_inplace() const { return !inplace.empty(); }
  std::set<std::string> created_dtypes() const;
};

// Throws FormatError when a component does not parse.
CaseFacts analyze_case(const TestCase& tc);

// Syntax check of a single source; nullopt when it parses.
std::optional<std::string> python_parse_error(const std::string& source);

}  // namespace alignguard
