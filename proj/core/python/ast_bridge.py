"""Structural analysis service over python test sources.

Reads one JSON request on stdin and writes one JSON reply on stdout.
Operations:
  parse_check  {source}                       -> {ok, error?, line?}
  facts        {model_source, input_spec}     -> structural facts for
               matcher evaluation, determinism lint, and transforms
  ingest_scan  {source}                       -> raw test-file structure
               for the standardizer
"""

import ast
import json
import sys

VIEW_OPS = {"view", "reshape", "expand", "expand_as", "permute", "transpose",
            "t", "narrow", "unfold", "squeeze", "unsqueeze", "flatten",
            "detach", "chunk", "split"}

RANDOM_CALLS = {"rand", "randn", "randint", "randperm", "rand_like",
                "randn_like", "normal", "bernoulli", "multinomial",
                "random", "uniform", "gauss", "choice", "shuffle",
                "randrange", "sample"}

SEED_CALLS = {"manual_seed", "seed"}

TIME_CALLS = {"time", "perf_counter", "monotonic", "now", "today",
              "process_time", "time_ns", "urandom", "uuid4", "uuid1"}

CREATION_CALLS = {"tensor", "zeros", "ones", "full", "arange", "empty",
                  "rand", "randn", "randint", "linspace", "zeros_like",
                  "ones_like", "full_like", "rand_like", "randn_like"}

FLOAT_DTYPES = {"float16", "float32", "float64", "half", "float", "double",
                "bfloat16"}


def _dotted(node):
    parts = []
    while isinstance(node, ast.Attribute):
        parts.append(node.attr)
        node = node.value
    if isinstance(node, ast.Name):
        parts.append(node.id)
    elif isinstance(node, ast.Call):
        parts.append("()")
    parts.reverse()
    return ".".join(parts)


def _literal(node):
    try:
        return ast.literal_eval(node)
    except (ValueError, SyntaxError):
        return None


def _seg(source, node):
    try:
        return ast.get_source_segment(source, node) or ""
    except Exception:
        return ""


class _CallCollector(ast.NodeVisitor):
    def __init__(self, source, component):
        self.source = source
        self.component = component
        self.calls = []

    def visit_Call(self, node):
        dotted = _dotted(node.func)
        name = dotted.split(".")[-1] if dotted else ""
        recv = None
        if isinstance(node.func, ast.Attribute) and isinstance(node.func.value, ast.Name):
            recv = node.func.value.id
        args = []
        has_star = False
        for a in node.args:
            if isinstance(a, ast.Starred):
                has_star = True
                args.append({"text": "*" + _seg(self.source, a.value), "is_name": False,
                             "line": a.lineno, "col": a.col_offset,
                             "end_line": a.end_lineno, "end_col": a.end_col_offset})
            else:
                args.append({"text": _seg(self.source, a),
                             "is_name": isinstance(a, ast.Name),
                             "line": a.lineno, "col": a.col_offset,
                             "end_line": a.end_lineno, "end_col": a.end_col_offset})
        kwargs = {}
        for kw in node.keywords:
            if kw.arg is None:
                continue
            kwargs[kw.arg] = {"text": _seg(self.source, kw.value),
                              "value": _literal(kw.value),
                              "dotted": _dotted(kw.value) if isinstance(
                                  kw.value, (ast.Attribute, ast.Name)) else None,
                              "line": kw.value.lineno, "col": kw.value.col_offset,
                              "end_line": kw.value.end_lineno,
                              "end_col": kw.value.end_col_offset}
        self.calls.append({
            "component": self.component,
            "name": name,
            "dotted": dotted,
            "recv": recv,
            "line": node.lineno,
            "col": node.col_offset,
            "end_line": node.end_lineno,
            "end_col": node.end_col_offset,
            "args": args,
            "kwargs": kwargs,
            "has_star_args": has_star,
            "nargs": len(node.args),
        })
        self.generic_visit(node)


def _collect_component(source, component):
    tree = ast.parse(source)
    collector = _CallCollector(source, component)
    collector.visit(tree)

    aliases = []
    inplace = []
    creations = []
    literals = []
    seeds = []
    randoms = []
    times = []

    for node in ast.walk(tree):
        if isinstance(node, ast.Assign) and len(node.targets) == 1 and \
                isinstance(node.targets[0], ast.Name):
            target = node.targets[0].id
            value = node.value
            if isinstance(value, ast.Call) and isinstance(value.func, ast.Attribute):
                op = value.func.attr
                base = value.func.value
                # Module-level calls (torch.split(...)) are not method views.
                if op in VIEW_OPS and isinstance(base, ast.Name) and \
                        base.id not in ("torch", "nn", "F", "np", "numpy", "math"):
                    aliases.append({"component": component, "target": target,
                                    "base": base.id, "op": op, "line": node.lineno,
                                    "end_line": node.end_lineno,
                                    "nargs": len(value.args),
                                    "has_star_args": any(isinstance(a, ast.Starred)
                                                         for a in value.args)})
            elif isinstance(value, ast.Subscript) and isinstance(value.value, ast.Name):
                aliases.append({"component": component, "target": target,
                                "base": value.value.id, "op": "slice",
                                "line": node.lineno, "end_line": node.end_lineno,
                                "nargs": 0, "has_star_args": False})
        if isinstance(node, ast.Assign) and any(isinstance(t, ast.Subscript)
                                                for t in node.targets):
            sub = next(t for t in node.targets if isinstance(t, ast.Subscript))
            root = sub.value
            while isinstance(root, (ast.Subscript, ast.Attribute)):
                root = root.value
            inplace.append({"component": component, "kind": "setitem",
                            "target": root.id if isinstance(root, ast.Name) else "",
                            "line": node.lineno})
        if isinstance(node, ast.AugAssign):
            root = node.target
            while isinstance(root, (ast.Subscript, ast.Attribute)):
                root = root.value
            inplace.append({"component": component, "kind": "augassign",
                            "target": root.id if isinstance(root, ast.Name) else "",
                            "line": node.lineno})
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Attribute) and \
                node.func.attr.endswith("_") and not node.func.attr.startswith("_"):
            root = node.func.value
            while isinstance(root, (ast.Subscript, ast.Attribute)):
                root = root.value
            inplace.append({"component": component, "kind": "method",
                            "target": root.id if isinstance(root, ast.Name) else "",
                            "op": node.func.attr, "line": node.lineno})
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and \
                not isinstance(node.value, bool):
            literals.append({"component": component, "value": node.value,
                             "is_int": isinstance(node.value, int),
                             "line": node.lineno, "col": node.col_offset,
                             "end_col": node.end_col_offset})

    float_literal_lines = set()
    for node in ast.walk(tree):
        if isinstance(node, ast.Constant) and isinstance(node.value, float):
            float_literal_lines.update(range(node.lineno, (node.end_lineno or node.lineno) + 1))

    for call in collector.calls:
        if call["name"] in CREATION_CALLS:
            dtype = None
            kw = call["kwargs"].get("dtype")
            if kw and kw.get("dotted"):
                dtype = kw["dotted"].split(".")[-1]
            has_float = any(line in float_literal_lines
                            for line in range(call["line"], call["end_line"] + 1))
            creations.append({"component": component, "fn": call["name"],
                              "dtype": dtype, "line": call["line"],
                              "has_float_literal": has_float})
        if call["name"] in SEED_CALLS:
            seeds.append({"component": component, "name": call["name"],
                          "line": call["line"], "dotted": call["dotted"]})
        if call["name"] in RANDOM_CALLS:
            randoms.append({"component": component, "name": call["name"],
                            "line": call["line"], "dotted": call["dotted"]})
        if call["name"] in TIME_CALLS:
            times.append({"component": component, "name": call["name"],
                          "line": call["line"], "dotted": call["dotted"]})

    out = {
        "calls": collector.calls,
        "aliases": aliases,
        "inplace": inplace,
        "creations": creations,
        "literals": literals,
        "seed_calls": seeds,
        "random_calls": randoms,
        "time_calls": times,
    }

    for node in tree.body:
        if isinstance(node, ast.ClassDef):
            fwd = None
            for item in node.body:
                if isinstance(item, ast.FunctionDef) and item.name == "forward":
                    stmts = [{"line": s.lineno, "end_line": s.end_lineno,
                              "is_return": isinstance(s, ast.Return),
                              "kind": type(s).__name__}
                             for s in item.body]
                    ret = next((s for s in item.body if isinstance(s, ast.Return)), None)
                    fwd = {
                        "args": [a.arg for a in item.args.args if a.arg != "self"],
                        "body": stmts,
                        "indent": item.body[0].col_offset if item.body else 8,
                        "return_line": ret.lineno if ret else None,
                        "return_end_line": ret.end_lineno if ret else None,
                        "return_expr": _seg(source, ret.value) if ret and ret.value else None,
                        "return_is_tuple": bool(ret and isinstance(ret.value, ast.Tuple)),
                    }
            out["model"] = {"class_name": node.name, "line": node.lineno,
                            "end_line": node.end_lineno, "forward": fwd}
        if isinstance(node, ast.FunctionDef) and component == "input":
            stmts = [{"line": s.lineno, "end_line": s.end_lineno,
                      "is_return": isinstance(s, ast.Return),
                      "kind": type(s).__name__}
                     for s in node.body]
            ret = next((s for s in node.body if isinstance(s, ast.Return)), None)
            out["input_fn"] = {
                "name": node.name, "line": node.lineno, "end_line": node.end_lineno,
                "body": stmts,
                "indent": node.body[0].col_offset if node.body else 4,
                "return_line": ret.lineno if ret else None,
                "return_expr": _seg(source, ret.value) if ret and ret.value else None,
            }
    return out


def op_parse_check(req):
    try:
        ast.parse(req.get("source", ""))
        return {"ok": True}
    except SyntaxError as e:
        return {"ok": False, "error": str(e.msg), "line": e.lineno or 0}


def op_facts(req):
    result = {}
    model_src = req.get("model_source", "")
    input_src = req.get("input_spec", "")
    hook_src = req.get("extra_source", "")
    model = _collect_component(model_src, "model")
    inp = _collect_component(input_src, "input")
    merged = {}
    for key in ("calls", "aliases", "inplace", "creations", "literals",
                "seed_calls", "random_calls", "time_calls"):
        merged[key] = model.get(key, []) + inp.get(key, [])
    if hook_src:
        extra = _collect_component(hook_src, "extra")
        for key in merged:
            merged[key] = merged[key] + extra.get(key, [])
    merged["model"] = model.get("model")
    merged["input_fn"] = inp.get("input_fn")
    result.update(merged)
    return result


def op_ingest_scan(req):
    source = req.get("source", "")
    tree = ast.parse(source)
    collector = _CallCollector(source, "file")
    collector.visit(tree)

    classes = []
    functions = []
    for node in tree.body:
        if isinstance(node, ast.ClassDef):
            classes.append({
                "name": node.name,
                "line": node.lineno,
                "end_line": node.end_lineno,
                "bases": [_dotted(b) for b in node.bases],
                "methods": [m.name for m in node.body if isinstance(m, ast.FunctionDef)],
                "has_forward": any(isinstance(m, ast.FunctionDef) and m.name == "forward"
                                   for m in node.body),
            })
        elif isinstance(node, ast.FunctionDef):
            calls = []
            for sub in ast.walk(node):
                if isinstance(sub, ast.Call):
                    calls.append(_dotted(sub.func))
            decorators = []
            for d in node.decorator_list:
                decorators.append(_dotted(d.func) if isinstance(d, ast.Call) else _dotted(d))
            functions.append({
                "name": node.name,
                "line": node.lineno,
                "end_line": node.end_lineno,
                "args": [a.arg for a in node.args.args],
                "calls": calls,
                "decorators": decorators,
                "returns_value": any(isinstance(s, ast.Return) and s.value is not None
                                     for s in ast.walk(node)),
            })

    loops = []
    for node in ast.walk(tree):
        if isinstance(node, ast.For) and isinstance(node.iter, ast.Call):
            fn = _dotted(node.iter.func)
            n = None
            if fn == "range" and len(node.iter.args) == 1:
                n = _literal(node.iter.args[0])
            body_calls = []
            for sub in ast.walk(node):
                if isinstance(sub, ast.Call):
                    body_calls.append(_dotted(sub.func))
            loops.append({"line": node.lineno, "end_line": node.end_lineno,
                          "iter_call": fn, "range_n": n, "body_calls": body_calls})

    assigns = []
    for node in ast.walk(tree):
        if isinstance(node, ast.Assign) and len(node.targets) == 1:
            assigns.append({"target": _dotted(node.targets[0]),
                            "value_literal": _literal(node.value),
                            "line": node.lineno})

    device_markers = []
    for node in ast.walk(tree):
        if isinstance(node, ast.Constant) and isinstance(node.value, str):
            low = node.value.lower()
            if low.startswith(("cuda", "mps", "xpu")) or low in ("gpu",):
                device_markers.append(node.value)
        if isinstance(node, ast.Attribute) and node.attr in ("cuda", "mps"):
            device_markers.append(node.attr)

    return {
        "classes": classes,
        "functions": functions,
        "calls": collector.calls,
        "for_loops": loops,
        "assigns": assigns,
        "device_markers": device_markers,
        "imports": [n.names[0].name for n in ast.walk(tree)
                    if isinstance(n, ast.Import) and n.names],
    }


def main():
    raw = sys.stdin.read()
    try:
        req = json.loads(raw)
    except json.JSONDecodeError:
        print(json.dumps({"ok": False, "error": "malformed request"}))
        return 0
    op = req.get("op")
    try:
        if op == "parse_check":
            out = op_parse_check(req)
        elif op == "facts":
            out = op_facts(req)
        elif op == "ingest_scan":
            out = op_ingest_scan(req)
        else:
            out = {"ok": False, "error": "unknown op %r" % op}
    except SyntaxError as e:
        out = {"ok": False, "error": "syntax error: %s" % e.msg, "line": e.lineno or 0}
    print(json.dumps(out, allow_nan=False))
    return 0


if __name__ == "__main__":
    sys.exit(main())
